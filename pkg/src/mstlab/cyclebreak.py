"""Cycle-breaking processes on multigraphs with edge lengths.

The discrete process resamples edges with replacement, length-biased
over the original edge list.  A sampled edge that is still present and
non-separating in its component is removed; a present bridge gets a
uniformly placed red point; resampling an absent edge changes nothing.
"""

from bisect import bisect_right
from fractions import Fraction

import numpy as np

from .multigraph import Multigraph, bridges, components, conne, is_connected
from .stats import EmpiricalLaw, canonical_edges, tv_distance


class CbdState:
    """State of one cycle-breaking run.

    removed is the ordered list of removed edge ids; sampled is the
    ordered list of distinct sampled edge ids; red points live on the
    carried graph.
    """

    def __init__(self, graph, mark_only=False):
        self.graph = graph.copy()
        self.mark_only = bool(mark_only)
        self.present = [True] * graph.m
        self.removed = []
        self.sampled = []
        self._sampled_set = set()
        self.k = 0
        self._cum = np.cumsum(self.graph.lengths)
        self.total_length = float(self._cum[-1]) if graph.m else 0.0
        self._bridge_cache = None
        self._surplus_left = graph.m - graph.n + len(components(graph))

    def _bridges(self):
        if self._bridge_cache is None:
            self._bridge_cache = bridges(self.graph, self.present)
        return self._bridge_cache

    def is_forest(self):
        return self._surplus_left == 0

    def current(self, drop_marks=False):
        """The multigraph after the steps so far (CBD_k)."""
        ids = [i for i in range(self.graph.m) if self.present[i]]
        g = self.graph.subgraph_edges(ids, keep_marks=not drop_marks)
        return g

    def surviving_ids(self):
        """Edges never sampled so far (present and unmarked)."""
        return [i for i in range(self.graph.m)
                if self.present[i] and i not in self._sampled_set]


def cbd_step(state, rng):
    """One step: length-biased resample, then remove / mark / no-op."""
    if state.total_length <= 0.0:
        raise ValueError("cycle breaking needs positive total length")
    r = rng.random() * state.total_length
    eid = int(bisect_right(state._cum, r))
    if eid >= state.graph.m:
        eid = state.graph.m - 1
    state.k += 1
    if eid not in state._sampled_set:
        state._sampled_set.add(eid)
        state.sampled.append(eid)
    if not state.present[eid]:
        return state
    if not state.mark_only and eid not in state._bridges():
        state.present[eid] = False
        state.removed.append(eid)
        state.graph.red_points.pop(eid, None)
        state._bridge_cache = None
        state._surplus_left -= 1
    else:
        offset = rng.random() * state.graph.lengths[eid]
        state.graph.mark_red(eid, offset)
    return state


def cbd_run(graph, steps, rng, mark_only=False):
    """Run a fixed number of steps; returns the state."""
    state = CbdState(graph, mark_only=mark_only)
    for _ in range(steps):
        cbd_step(state, rng)
    return state


def cbd_infty(graph, rng):
    """Run until the graph is a forest (removal count = total surplus,
    every remaining component has empty conne); from then on the
    multigraph never changes.

    Returns (forest, largest_tree, removal_order, red_points) where the
    largest tree carries lengths but no marks, and ties in size break
    by smallest vertex id.
    """
    state = CbdState(graph)
    while not state.is_forest():
        cbd_step(state, rng)
    return _finish(state)


def cbd_finish(state, rng):
    """Continue an existing run until forest; same outputs as cbd_infty."""
    if state.mark_only:
        raise ValueError("cannot reach a forest in mark-only mode")
    while not state.is_forest():
        cbd_step(state, rng)
    return _finish(state)


def _finish(state):
    forest = state.current()
    comp = components(forest)[0] if forest.n else set()
    largest = forest.induced(comp, keep_marks=False)
    red = {e: list(v) for e, v in state.graph.red_points.items()}
    return forest, largest, list(state.removed), red


def shape(g):
    """The multigraph without red points (and without lengths)."""
    out = Multigraph(g.n, g.edges)
    return out


def rem(g):
    """Drop every edge carrying at least one red point; keeps lengths."""
    ids = [i for i in range(g.m) if i not in g.red_points or not g.red_points[i]]
    return g.subgraph_edges(ids)


def cb_infty(graph, rng):
    """Continuum cycle breaking on a connected graph with lengths.

    sp(H) times: pick an edge from conne with probability proportional
    to length, cut it at a uniform position into two leaf stubs.  Total
    length is preserved exactly.
    """
    if not is_connected(graph):
        raise ValueError("cb_infty needs a connected graph")
    n = graph.n
    edges = list(graph.edges)
    lengths = list(graph.lengths)
    for _ in range(graph.m - graph.n + 1):
        g = Multigraph(n, edges, lengths)
        cand = sorted(conne(g))
        weights = np.array([lengths[i] for i in cand], dtype=float)
        total = weights.sum()
        if total <= 0:
            raise ValueError("no positive-length cycle edge to cut")
        r = rng.random() * total
        k = int(np.searchsorted(np.cumsum(weights), r, side="right"))
        k = min(k, len(cand) - 1)
        eid = cand[k]
        u, v = edges[eid]
        ell = lengths[eid]
        pos = rng.random() * ell
        # replace the edge by two stubs ending at fresh leaves
        edges[eid] = (u, n)
        lengths[eid] = pos
        edges.append((v, n + 1))
        lengths.append(ell - pos)
        n += 2
    return Multigraph(n, edges, lengths)


def cb_cbd_coupled(graph, rng):
    """Run CBD to the forest, then realize the continuum tree by
    splitting each removed edge at a uniform point instead.

    Returns (cbd_tree, cb_tree, hausdorff_bound) where the bound is the
    max removed-edge length; the discrete tree sits inside the
    continuum tree at Hausdorff distance at most that bound, which is
    asserted by construction (each stub hangs off a kept vertex).
    """
    if not is_connected(graph):
        raise ValueError("coupled run needs a connected graph")
    forest, largest, removed, _ = cbd_infty(graph, rng)
    n = graph.n
    edges, lengths = [], []
    for i in range(graph.m):
        if i in removed:
            u, v = graph.edges[i]
            ell = graph.lengths[i]
            pos = rng.random() * ell
            edges.append((u, n))
            lengths.append(pos)
            edges.append((v, n + 1))
            lengths.append(ell - pos)
            n += 2
        else:
            edges.append(graph.edges[i])
            lengths.append(graph.lengths[i])
    cb_tree = Multigraph(n, edges, lengths)
    bound = max((graph.lengths[i] for i in removed), default=0.0)
    assert bound <= (max(graph.lengths) if graph.m else 0.0)
    return largest, cb_tree, float(bound)


def exact_mst_law(g):
    """Exact law of the MST of Shape[g] under exchangeable pairwise
    distinct weights on conne (arbitrary elsewhere): reverse delete
    removes a uniform member of the current conne at every step.

    Returns {frozenset(edge ids): Fraction}.  Needs few enough edges to
    enumerate (<= ~10).
    """
    if g.m > 12:
        raise ValueError("exact MST law capped at 12 edges")
    if not is_connected(g):
        raise ValueError("exact MST law needs a connected graph")
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def law(present):
        removable = conne(g, set(present))
        if not removable:
            return {present: Fraction(1)}
        out = {}
        share = Fraction(1, len(removable))
        for e in removable:
            rest = tuple(i for i in present if i != e)
            for tree, p in law(rest).items():
                out[tree] = out.get(tree, Fraction(0)) + share * p
        return out

    raw = law(tuple(range(g.m)))
    return {frozenset(k): v for k, v in raw.items()}


def law_equivalence_test(g, replicas, rng):
    """TV distance between the empirical law of Shape[CBD_infty(g)]
    under exchangeable (unit) lengths and the exact MST law.

    The run loop samples uniformly among present edges, which is the
    law of the process's present-edge subsequence for unit lengths, and
    skips mark bookkeeping since the shape ignores red points.
    """
    exact = {tuple(sorted(k)): v for k, v in exact_mst_law(g).items()}
    sp = g.m - g.n + 1
    bridge_cache = {}
    emp = EmpiricalLaw()
    for _ in range(replicas):
        present = set(range(g.m))
        removals = 0
        while removals < sp:
            ids = sorted(present)
            eid = ids[int(rng.integers(0, len(ids)))]
            key = frozenset(present)
            if key not in bridge_cache:
                bridge_cache[key] = bridges(g, present)
            if eid not in bridge_cache[key]:
                present.discard(eid)
                removals += 1
        emp.add(tuple(sorted(present)))
    return tv_distance(emp, exact)
