"""Compiled and pure-Python backends must agree bit for bit."""

import numpy as np
import pytest

from facestyle import kernels
from facestyle.synth import splitmix64_next

BACKENDS = kernels.backends()
needs_both = pytest.mark.skipif("compiled" not in BACKENDS, reason="extension not built")


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_block_matches_scalar_reference(name):
    out, state = kernels.splitmix64_block(2024, 6, impl=BACKENDS[name])
    s = 2024
    for v in out:
        value, s = splitmix64_next(s)
        assert int(v) == value
    assert state == s


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_normals_odd_count_discards_last(name):
    impl = BACKENDS[name]
    z5, s5 = kernels.normals(7, 5, impl=impl)
    z6, s6 = kernels.normals(7, 6, impl=impl)
    assert np.array_equal(z5, z6[:5]) and s5 == s6


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_normals_are_roughly_standard(name):
    z, _ = kernels.normals(1, 20000, impl=BACKENDS[name])
    assert abs(z.mean()) < 0.03 and abs(z.std() - 1) < 0.03


@needs_both
def test_backends_identical():
    py, c = BACKENDS["python"], BACKENDS["compiled"]
    for seed in (0, 1, 2**63 + 5, 2**64 - 1):
        assert np.array_equal(kernels.uniforms(seed, 101, py)[0], kernels.uniforms(seed, 101, c)[0])
        zp, sp = kernels.normals(seed, 101, py)
        zc, sc = kernels.normals(seed, 101, c)
        assert zp.tobytes() == zc.tobytes() and sp == sc
    rng = np.random.default_rng(0)
    amps, ph = rng.normal(size=(4, 3, 2)), rng.uniform(0, 6.2, size=(4, 3, 2))
    bins = np.array([2.0, 5.0])
    assert kernels.sinusoids(amps, bins, ph, 33, py).tobytes() == kernels.sinusoids(amps, bins, ph, 33, c).tobytes()
    for t1, t2, n in ((1, 1, 1), (5, 9, 3), (40, 31, 12)):
        a, b = rng.normal(size=(t1, n, 3)), rng.normal(size=(t2, n, 3))
        assert kernels.dtw_cost(a, b, py) == kernels.dtw_cost(a, b, c)


@needs_both
def test_backends_identical_at_scale():
    # libm disagreements (e.g. a fused sincos) show up only every few thousand draws
    py, c = BACKENDS["python"], BACKENDS["compiled"]
    zp, _ = kernels.normals(12345, 200_000, py)
    zc, _ = kernels.normals(12345, 200_000, c)
    assert zp.tobytes() == zc.tobytes()
    rng = np.random.default_rng(1)
    amps, ph = rng.normal(size=(50, 3, 3)), rng.uniform(0, 6.3, size=(50, 3, 3))
    bins = np.array([1.0, 6.0, 17.0])
    assert kernels.sinusoids(amps, bins, ph, 200, py).tobytes() == kernels.sinusoids(amps, bins, ph, 200, c).tobytes()
