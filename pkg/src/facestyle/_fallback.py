"""Pure-Python versions of the compiled kernels.

Every function reproduces ``_kernels`` bit for bit: same operation order,
libm transcendental functions via :mod:`math`, IEEE add/mul/sqrt only.
"""

import math

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1
TWO_PI = 6.283185307179586
INV_2_53 = 1.0 / 9007199254740992.0


def _mix_array(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


def splitmix64_block(state, n):
    # the stream is counter based: draw k mixes state + (k+1)*GAMMA
    counters = np.arange(1, n + 1, dtype=np.uint64) * np.uint64(GAMMA) + np.uint64(state)
    with np.errstate(over="ignore"):
        out = _mix_array(counters)
    return out, (state + n * GAMMA) & MASK64


def uniforms(state, n):
    raw, state = splitmix64_block(state, n)
    return (raw >> np.uint64(11)).astype(np.float64) * INV_2_53, state


def normals(state, n):
    pairs = (n + 1) // 2
    u, state = uniforms(state, 2 * pairs)
    out = np.empty(2 * pairs, dtype=np.float64)
    log, cos, sin, sqrt = math.log, math.cos, math.sin, math.sqrt
    ul = u.tolist()
    for k in range(pairs):
        u1 = 1.0 - ul[2 * k]
        theta = TWO_PI * ul[2 * k + 1]
        r = sqrt(-2.0 * log(u1))
        out[2 * k] = r * cos(theta)
        out[2 * k + 1] = r * sin(theta)
    return out[:n].copy(), state


def sinusoids(amps, bins, phases, T):
    n, _, nb = amps.shape
    out = np.empty((T, n, 3), dtype=np.float64)
    sin = math.sin
    a = amps.tolist()
    p = phases.tolist()
    f = [float(x) for x in bins]
    dT = float(T)
    for t in range(T):
        ft = float(t)
        for v in range(n):
            av, pv = a[v], p[v]
            for c in range(3):
                acc = 0.0
                ac, pc = av[c], pv[c]
                for b in range(nb):
                    acc = acc + ac[b] * sin(TWO_PI * f[b] * ft / dT + pc[b])
                out[t, v, c] = acc
    return out


def _cost_row(pred, i, gt):
    d = pred[i][None, :, :] - gt
    norms = np.sqrt(d[:, :, 0] * d[:, :, 0] + d[:, :, 1] * d[:, :, 1] + d[:, :, 2] * d[:, :, 2])
    acc = np.zeros(gt.shape[0])
    for v in range(gt.shape[1]):
        acc = acc + norms[:, v]
    return (acc / gt.shape[1]).tolist()


def dtw_cost(pred, gt):
    t1, t2 = pred.shape[0], gt.shape[0]
    prev = [0.0] * t2
    for i in range(t1):
        row = _cost_row(pred, i, gt)
        cur = [0.0] * t2
        for j in range(t2):
            c = row[j]
            if i == 0 and j == 0:
                cur[j] = c
                continue
            if i == 0:
                best = cur[j - 1]
            elif j == 0:
                best = prev[j]
            else:
                best = prev[j - 1]
                if prev[j] < best:
                    best = prev[j]
                if cur[j - 1] < best:
                    best = cur[j - 1]
            cur[j] = best + c
        prev = cur
    return prev[t2 - 1]
