"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat 3]

Each row times one kernel on both backends and checks that the outputs are
bit-identical.
"""

import argparse
import time

import numpy as np

from facestyle import kernels, synth


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def same(a, b):
    if isinstance(a, (list, tuple)):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def cases():
    rng = np.random.default_rng(0)
    p, g = rng.normal(size=(100, 50, 3)), rng.normal(size=(120, 50, 3))
    amps = rng.uniform(0.5, 1.5, size=(50, 3, 2))
    bins = np.array([3.0, 7.0])
    phases = rng.uniform(0, 2 * np.pi, size=(50, 3, 2))
    cfg, profiles = synth.load_corpus_config()

    def corpus(impl):
        saved = kernels._impl
        kernels._impl = impl
        try:
            return [s.frames for _, s in synth.generate_corpus(cfg, profiles)]
        finally:
            kernels._impl = saved

    return [
        ("dtw 100x120 frames, N=50", lambda m: kernels.dtw_cost(p, g, impl=m)),
        ("normals n=150000", lambda m: kernels.normals(12345, 150_000, impl=m)),
        ("uniforms n=150000", lambda m: kernels.uniforms(12345, 150_000, impl=m)),
        ("sinusoids T=100, N=50, B=2", lambda m: kernels.sinusoids(amps, bins, phases, 100, impl=m)),
        ("reference corpus (320 seqs)", corpus),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    impls = kernels.backends()
    if "compiled" not in impls:
        print("compiled extension not built; only the python backend is available")
    print(f"{'kernel':32} {'python s':>10} {'compiled s':>11} {'speedup':>8}  identical")
    for name, fn in cases():
        tp, op = best_of(lambda: fn(impls["python"]), args.repeat)
        if "compiled" in impls:
            tc, oc = best_of(lambda: fn(impls["compiled"]), args.repeat)
            print(f"{name:32} {tp:10.4f} {tc:11.4f} {tp / tc:7.1f}x  {same(op, oc)}")
        else:
            print(f"{name:32} {tp:10.4f} {'-':>11} {'-':>8}")


if __name__ == "__main__":
    main()
