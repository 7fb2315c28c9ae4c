"""Discrete Brownian excursions, real trees coded by excursions, and
the glued CRT spaces with a 3-regular kernel.

Excursions are +-1 walk bridges cyclically shifted at their first
minimum and scaled by 1/sqrt(N); the tree pseudo-metric is
d(s,t) = h(s) + h(t) - 2 min over [s,t].
"""

import math
from collections import namedtuple

import numpy as np
from scipy.sparse.csgraph import shortest_path

from .metric import FiniteMetricMeasureSpace
from .multigraph import Multigraph, components
from .samplers import DegreeSequence, configuration_model


class ExcursionPath:
    """Nonnegative path on a uniform grid of [0,1], zero at both ends."""

    def __init__(self, values):
        self.values = np.asarray(values, dtype=float)
        self.n_grid = len(self.values) - 1
        if self.values[0] != 0.0 or self.values[-1] != 0.0:
            raise ValueError("endpoints must be zero")
        if np.any(self.values < 0):
            raise ValueError("excursion must be nonnegative")

    def area(self):
        # endpoints are zero, so the trapezoid rule is the plain mean
        return float(self.values.mean())

    def value_at(self, x):
        """Piecewise-linear interpolation at x in [0,1]."""
        pos = x * self.n_grid
        lo = int(math.floor(pos))
        if lo >= self.n_grid:
            return float(self.values[-1])
        frac = pos - lo
        return float((1 - frac) * self.values[lo] + frac * self.values[lo + 1])


def _bridge_batch(batch, n_grid, rng):
    steps = np.ones((batch, n_grid), dtype=np.int8)
    steps[:, n_grid // 2:] = -1
    steps = rng.permuted(steps, axis=1)
    walk = np.zeros((batch, n_grid + 1), dtype=np.int32)
    np.cumsum(steps, axis=1, out=walk[:, 1:])
    return walk


def brownian_excursion_values(batch, n_grid, rng):
    """Batch of excursion value arrays, shape (batch, n_grid + 1)."""
    walk = _bridge_batch(batch, n_grid, rng)
    kstar = np.argmin(walk[:, :-1], axis=1)
    idx = (kstar[:, None] + np.arange(n_grid + 1)[None, :]) % n_grid
    rolled = np.take_along_axis(walk[:, :-1], idx, axis=1)
    exc = rolled - walk[np.arange(batch), kstar][:, None]
    exc[:, -1] = 0
    return exc / math.sqrt(n_grid)


def brownian_excursion(n_grid, rng):
    """Single discrete standard Brownian excursion.

    n_grid must be a power of two, at least 2.
    """
    if n_grid < 2 or n_grid & (n_grid - 1):
        raise ValueError("grid size must be a power of two, >= 2")
    return ExcursionPath(brownian_excursion_values(1, n_grid, rng)[0])


class _RangeMin:
    """Sparse-table range minimum over an array (inclusive ends)."""

    def __init__(self, values):
        v = np.asarray(values, dtype=float)
        levels = [v]
        k = 1
        while 2 * k <= len(v):
            prev = levels[-1]
            levels.append(np.minimum(prev[:-k], prev[k:]))
            k *= 2
        self.levels = levels

    def query(self, i, j):
        if i > j:
            i, j = j, i
        span = j - i + 1
        k = span.bit_length() - 1
        lv = self.levels[k]
        return min(lv[i], lv[j - (1 << k) + 1])


def excursion_distance(rmq, h, i, j):
    return h[i] + h[j] - 2.0 * rmq.query(i, j)


def tree_from_excursion(exc, q, rng):
    """Finite tree sample from the excursion metric.

    Draws q uniform grid times plus time 0 (the root); uniform mass 1/q
    sits on the non-root points.
    """
    if q < 1:
        raise ValueError("q >= 1 required")
    h = exc.values
    n_grid = exc.n_grid
    times = [0] + [int(x) for x in rng.integers(0, n_grid + 1, size=q)]
    rmq = _RangeMin(h)
    k = len(times)
    d = np.zeros((k, k))
    for a in range(k):
        for b in range(a + 1, k):
            d[a, b] = d[b, a] = excursion_distance(rmq, h, times[a], times[b])
    masses = np.full(k, 1.0 / q)
    masses[0] = 0.0
    space = FiniteMetricMeasureSpace(d, masses, check_triangle=False)
    space.times = times
    return space


def sample_crt(n_grid, q, rng):
    """Finite sample of the tree coded by twice an excursion; the
    root-to-point distance is Rayleigh in the limit."""
    exc = brownian_excursion(n_grid, rng)
    doubled = ExcursionPath(2.0 * exc.values)
    return tree_from_excursion(doubled, q, rng)


def prev_crossing(x, level, exc):
    """sup{y in [0, x) : f(y) = level} on the piecewise-linear path;
    -inf when empty."""
    n_grid = exc.n_grid
    v = exc.values
    pos = x * n_grid
    lo = int(math.floor(pos))
    if lo < pos and lo + 1 <= n_grid:
        # partial segment [lo/N, x); f is linear with the full-segment slope
        a, b = v[lo], v[lo + 1]
        fx = exc.value_at(x)
        if min(a, fx) <= level <= max(a, fx):
            if a == b:
                if a == level:
                    return x  # flat at the level: sup of [lo/N, x) is x
            else:
                y = (lo + (level - a) / (b - a)) / n_grid
                if y < x:
                    return y
    for seg in range(lo - 1, -1, -1):
        a, b = v[seg], v[seg + 1]
        if min(a, b) <= level <= max(a, b):
            if a == b:
                y = min((seg + 1) / n_grid, x)
            else:
                y = (seg + (level - a) / (b - a)) / n_grid
            if y < x:
                return y
    return -math.inf


def next_drop(x, level, exc):
    """inf{y in (x, 1] : f(y) < level}; +inf when empty."""
    n_grid = exc.n_grid
    v = exc.values
    pos = x * n_grid
    lo = int(math.floor(pos))
    fx = exc.value_at(x)
    if fx < level and x < 1.0:
        return x  # f dips below the level immediately after x
    if lo + 1 <= n_grid and lo < pos:
        b = v[lo + 1]
        if b < level:
            return x + (level - fx) / (b - fx) * ((lo + 1) / n_grid - x)
        lo += 1
    else:
        lo = int(pos)
    for seg in range(lo, n_grid):
        a, b = v[seg], v[seg + 1]
        y0 = seg / n_grid
        if a < level and y0 > x:
            return y0
        if b < level:
            if a == b:
                continue
            y = (seg + (level - a) / (b - a)) / n_grid
            if y > x:
                return y
    if v[n_grid] < level:
        return 1.0
    return math.inf


GluedSpace = namedtuple(
    "GluedSpace",
    "space kernel kernel_lengths X Y gamma_half gamma_sum total_core_length")


def _assemble(n_hub, hub_edges, hub_weights, frag_points, masses):
    """Shortest-path assembly of a glued space.

    frag_points: list of (hub_a, hub_b, dist_a, dist_b, within) blocks;
    each block contributes len(within) points connected to its two hubs
    and to each other by their tree distances.
    """
    sizes = [len(b[4]) for b in frag_points]
    total = n_hub + sum(sizes)
    big = np.full((total, total), np.inf)
    np.fill_diagonal(big, 0.0)
    for (a, b), w in zip(hub_edges, hub_weights):
        big[a, b] = min(big[a, b], w)
        big[b, a] = big[a, b]
    offset = n_hub
    for (ha, hb, da, db, within) in frag_points:
        k = len(within)
        for i in range(k):
            gi = offset + i
            big[gi, ha] = big[ha, gi] = min(big[gi, ha], da[i])
            big[gi, hb] = big[hb, gi] = min(big[gi, hb], db[i])
            for j in range(i + 1, k):
                gj = offset + j
                big[gi, gj] = big[gj, gi] = within[i][j]
        offset += k
    dist = shortest_path(big, method="D", directed=False)
    return FiniteMetricMeasureSpace(dist, masses, check_triangle=False)


def connected_cubic_multigraph(n, rng, max_attempts=10000):
    """3-regular configuration model conditioned to be connected."""
    d = DegreeSequence([3] * n)
    for _ in range(max_attempts):
        g = configuration_model(d, rng)
        if len(components(g)) == 1:
            return g
    raise RuntimeError("connected 3-regular rejection cap exceeded")


def construct_H_s(s, n_grid, q, rng):
    """Glued space on a connected 3-regular kernel: r = 3(s-1) CRTs,
    Dirichlet(1/2,...,1/2) masses via Gamma(1/2) ratios, distances
    rescaled by sqrt(X_i), glued root-to-sampled-point along the
    kernel edges."""
    if s < 2:
        raise ValueError("s >= 2 required")
    if n_grid < 2 or n_grid & (n_grid - 1):
        raise ValueError("grid size must be a power of two, >= 2")
    nk = 2 * (s - 1)
    r = 3 * (s - 1)
    kern = connected_cubic_multigraph(nk, rng)
    gamma_half = rng.gamma(0.5, 1.0, size=r)
    gamma_sum = float(gamma_half.sum())
    X = gamma_half / gamma_sum

    exc = brownian_excursion_values(r, n_grid, rng) * 2.0
    z_times = rng.integers(0, n_grid + 1, size=r)
    Y = exc[np.arange(r), z_times].astype(float)  # root-to-target distances
    kernel_lengths = np.sqrt(X) * Y

    # allocate the q sampled points to fragments by mass
    counts = rng.multinomial(q, X) if q > 0 else np.zeros(r, dtype=int)
    frag_points = []
    masses = [0.0] * nk
    for i in range(r):
        k = int(counts[i])
        ha, hb = kern.edges[i]
        if k == 0:
            frag_points.append((ha, hb, [], [], []))
            continue
        times = [int(x) for x in rng.integers(0, n_grid + 1, size=k)]
        rmq = _RangeMin(exc[i])
        scale = math.sqrt(X[i])
        da = [scale * excursion_distance(rmq, exc[i], 0, t) for t in times]
        db = [scale * excursion_distance(rmq, exc[i], int(z_times[i]), t) for t in times]
        within = [[scale * excursion_distance(rmq, exc[i], a, b) for b in times]
                  for a in times]
        frag_points.append((ha, hb, da, db, within))
        masses.extend([1.0 / q] * k)
    masses = np.array(masses)
    if q == 0:
        masses[:] = 1.0 / nk  # degenerate: uniform on the kernel hubs
    space = _assemble(nk, kern.edges, kernel_lengths, frag_points, masses)
    return GluedSpace(space, kern, kernel_lengths, X, Y, gamma_half,
                      gamma_sum, float(kernel_lengths.sum()))


def sample_tilted_excursion(s, n_grid, rng, area_cap=1.2, max_attempts=200000):
    """Excursion tilted by (integral of e)^s, by rejection with an
    adaptive area envelope: overshoots raise the cap and restart."""
    cap = area_cap
    for _ in range(max_attempts):
        e = brownian_excursion(n_grid, rng)
        a = e.area()
        if a > cap:
            cap = 1.1 * a
            continue
        if rng.random() < (a / cap) ** s:
            return e
    raise RuntimeError("area-tilt rejection cap exceeded")


def construct_H_s_tilted(s, n_grid, q, rng):
    """Alternate construction: area-tilted excursion, s area-biased
    times with uniform sub-levels, gluing each time to the previous
    crossing of its level; distances doubled."""
    if s < 2:
        raise ValueError("s >= 2 required")
    exc = sample_tilted_excursion(s, n_grid, rng)
    h = exc.values
    weights = h / h.sum()
    y_idx = rng.choice(n_grid + 1, size=s, p=weights)
    y = y_idx / n_grid
    levels = rng.random(s) * h[y_idx]
    x = np.array([prev_crossing(y[i], levels[i], exc) for i in range(s)])
    assert np.all(np.isfinite(x)), "prev crossing must exist below a positive level"

    times = [int(v) for v in rng.integers(0, n_grid + 1, size=q)]
    rmq = _RangeMin(h)

    def d_path(a_pos, b_pos):
        # distance on the coded tree between two real positions
        ia, ib = a_pos * n_grid, b_pos * n_grid
        fa, fb = exc.value_at(a_pos), exc.value_at(b_pos)
        lo, hi = min(ia, ib), max(ia, ib)
        lo_c, hi_f = int(math.ceil(lo)), int(math.floor(hi))
        m = min(fa, fb)
        if lo_c <= hi_f:
            m = min(m, rmq.query(lo_c, hi_f))
        return fa + fb - 2.0 * m

    # nodes: root, sampled points, then (x_i, y_i) glue pairs
    positions = [0.0] + [t / n_grid for t in times]
    glue_a = []
    glue_b = []
    for i in range(s):
        glue_a.append(len(positions))
        positions.append(float(x[i]))
        glue_b.append(len(positions))
        positions.append(float(y[i]))
    k = len(positions)
    big = np.full((k, k), np.inf)
    np.fill_diagonal(big, 0.0)
    for a in range(k):
        for b in range(a + 1, k):
            big[a, b] = big[b, a] = d_path(positions[a], positions[b])
    for i in range(s):
        big[glue_a[i], glue_b[i]] = big[glue_b[i], glue_a[i]] = 0.0
    dist = 2.0 * shortest_path(big, method="D", directed=False)
    masses = np.zeros(k)
    if q:
        masses[1:q + 1] = 1.0 / q
    else:
        masses[0] = 1.0
    space = FiniteMetricMeasureSpace(dist, masses, check_triangle=False)
    space.surplus = s
    return space
