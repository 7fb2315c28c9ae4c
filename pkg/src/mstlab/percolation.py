"""Percolation and the marking/half-edge couplings at criticality.

The Poisson-marking coupling realizes percolation at p = 1/(1+t) as the
surviving (never-sampled) edges of a cycle-breaking run with
exponential lengths, the half-edge coupling nests a thinned
configuration model inside a full one, and the pipeline produces the
critical-window largest component with its attach/avail measures.
"""

import math
from collections import namedtuple

import numpy as np

from .cyclebreak import CbdState, cbd_finish, cbd_run, cbd_step
from .multigraph import Multigraph, components, kernel
from .mst import UnionFind
from .samplers import DegreeSequence, configuration_model

PercOutcome = namedtuple("PercOutcome", "graph removed_ids survived_ids")

MarkingResult = namedtuple("MarkingResult", "shape rem survived_ids lengths state")


def perc(g, p, rng):
    """Independent Bernoulli(p) survival per edge."""
    if not (0.0 <= p <= 1.0):
        raise ValueError("p in [0,1] required")
    keep = rng.random(g.m) < p
    survived = [i for i in range(g.m) if keep[i]]
    removed = [i for i in range(g.m) if not keep[i]]
    return PercOutcome(g.subgraph_edges(survived), removed, survived)


def t_of_lambda(n, lam):
    """Solve 1/(1+t) = 1/2 + lambda / n^(1/3); requires |lam| < n^(1/3)/2."""
    half_window = 0.5 * n ** (1.0 / 3.0)
    if not abs(lam) < half_window:
        raise ValueError("lambda must satisfy |lambda| < n^(1/3)/2")
    x = 0.5 + lam * n ** (-1.0 / 3.0)
    return (1.0 - x) / x


def poisson_marking(h, t, rng):
    """Exponential(1) lengths, Poisson(t * ell) mark-only steps.

    Survivors (never-sampled edges) form Perc(H, 1/(1+t)) with iid
    Exponential(mean 1/(1+t)) lengths; returns their shape and the
    length-carrying remainder.
    """
    if t < 0:
        raise ValueError("t >= 0 required")
    lengths = rng.exponential(1.0, size=h.m)
    hexp = Multigraph(h.n, h.edges, lengths)
    ell = math.fsum(lengths)
    r = int(rng.poisson(t * ell)) if ell > 0 else 0
    state = cbd_run(hexp, r, rng, mark_only=True)
    survived = state.surviving_ids()
    remg = hexp.subgraph_edges(survived)
    shp = Multigraph(h.n, [h.edges[i] for i in survived])
    return MarkingResult(shp, remg, survived, lengths, state)


def half_edge_coupling(d, m, rng):
    """Lemma-style nesting: pick ell-2m half-edges uniformly and pair
    them (Q1), then pair the rest and overlay (Q2).

    Q1 is an edge-sublist of Q2 (shared edge ids first) and Q2 has
    degree sequence d.
    """
    if not isinstance(d, DegreeSequence):
        d = DegreeSequence(d)
    if 2 * m > d.ell:
        raise ValueError("2m <= sum of degrees required")
    owner = np.repeat(np.arange(len(d), dtype=np.int64), d.d)
    perm = rng.permutation(d.ell)
    chosen = owner[perm[: d.ell - 2 * m]]
    rest = owner[perm[d.ell - 2 * m:]]
    q1_edges = [(int(chosen[2 * i]), int(chosen[2 * i + 1])) for i in range(len(chosen) // 2)]
    extra = [(int(rest[2 * i]), int(rest[2 * i + 1])) for i in range(m)]
    q1 = Multigraph(len(d), q1_edges)
    q2 = Multigraph(len(d), q1_edges + extra)
    return q1, q2


def degree_stats_after_removal(n, m, rng):
    """Remove m uniform edges from a fresh 3-regular configuration
    model; return (degree histogram fractions for 0..3, criticality
    statistic n^(1/3) (sum d'^2 / sum d' - 2))."""
    if n % 2:
        raise ValueError("n must be even")
    total = 3 * n // 2
    if m > total:
        raise ValueError("cannot remove more than 3n/2 edges")
    half = np.repeat(np.arange(n, dtype=np.int64), 3)
    rng.shuffle(half)
    pairs = half.reshape(-1, 2)
    removed = rng.choice(total, size=m, replace=False)
    deg = np.full(n, 3, dtype=np.int64)
    np.subtract.at(deg, pairs[removed, 0], 1)
    np.subtract.at(deg, pairs[removed, 1], 1)
    hist = np.bincount(deg, minlength=4)[:4] / n
    s1 = deg.sum()
    if s1 == 0:
        raise ValueError("all edges removed: criticality statistic undefined")
    stat = n ** (1.0 / 3.0) * ((deg.astype(float) ** 2).sum() / s1 - 2.0)
    return hist, float(stat)


def criticality_prefactor(nu):
    """sigma1 / (sigma3 - 4 sigma1)^(2/3) for a degree pmf nu."""
    items = nu.items() if isinstance(nu, dict) else enumerate(nu)
    items = list(items)
    s1 = sum(k * p for k, p in items)
    s3 = sum(k ** 3 * p for k, p in items)
    if not s3 > 4 * s1:
        raise ValueError("requires sigma3 > 4 sigma1")
    return s1 / (s3 - 4 * s1) ** (2.0 / 3.0)


class PipelineResult:
    """Critical-window pipeline output.

    g13: the underlying 3-regular configuration model; frak_g1: the
    largest surviving component with its exponential lengths; g1: its
    shape (unit lengths); cbd trees of both, cut with the same removal
    sequence (the distinct-sample coupling).
    """

    def __init__(self, g13, lengths, r_steps, frak_g1, g1,
                 cbd_tree_g1, cbd_tree_frak, removal_order):
        self.g13 = g13
        self.lengths = lengths
        self.r_steps = r_steps
        self.frak_g1 = frak_g1
        self.g1 = g1
        self.cbd_tree_g1 = cbd_tree_g1
        self.cbd_tree_frak = cbd_tree_frak
        self.removal_order = removal_order


def g1_pipeline(n, lam, rng, variant="marks"):
    """Full pipeline at (n, lambda): exponential lengths on G_{n,3},
    Poisson(t * ell) cycle-breaking steps, Rem, largest component, then
    cycle-breaking of both the shaped and length-carrying versions.

    variant selects whether the first phase performs removals ("full",
    Def.-style) or only marks ("marks"); the Rem output is identical
    either way because every sampled edge is absent from it.
    """
    t = t_of_lambda(n, lam)
    g13 = configuration_model(DegreeSequence([3] * n), rng)
    lengths = rng.exponential(1.0, size=g13.m)
    gexp = Multigraph(n, g13.edges, lengths)
    ell = math.fsum(lengths)
    r = int(rng.poisson(t * ell))
    state = cbd_run(gexp, r, rng, mark_only=(variant == "marks"))
    survived = state.surviving_ids()
    remg = gexp.subgraph_edges(survived)
    comp = components(remg)[0] if remg.n else set()
    frak_g1 = remg.induced(comp)
    g1 = Multigraph(frak_g1.n, frak_g1.edges)

    from .cyclebreak import cbd_infty
    forest, cbd_frak, removal_order, _ = cbd_infty(frak_g1, rng)
    keep = [i for i in range(frak_g1.m) if i not in set(removal_order)]
    cbd_g1 = Multigraph(g1.n, [g1.edges[i] for i in keep])
    return PipelineResult(g13, lengths, r, frak_g1, g1, cbd_g1, cbd_frak, removal_order)


def g1_census(n, lam, rng):
    """Fast path for statistics of G1(n, lambda): sizes, surplus and
    kernel flags only, via direct marking (no bridge queries)."""
    t = t_of_lambda(n, lam)
    half = np.repeat(np.arange(n, dtype=np.int64), 3)
    rng.shuffle(half)
    pairs = half.reshape(-1, 2)
    nedges = pairs.shape[0]
    lengths = rng.exponential(1.0, size=nedges)
    ell = math.fsum(lengths)
    r = int(rng.poisson(t * ell))
    # r length-biased picks; survivors are the never-picked edges
    cum = np.cumsum(lengths)
    picks = np.searchsorted(cum, rng.random(r) * ell, side="right")
    hit = np.zeros(nedges, dtype=bool)
    hit[np.minimum(picks, nedges - 1)] = True
    surv = ~hit
    uf = UnionFind(n)
    for i in np.nonzero(surv)[0]:
        uf.union(int(pairs[i, 0]), int(pairs[i, 1]))
    sizes = {}
    first = {}
    for v in range(n):
        rt = uf.find(v)
        sizes[rt] = sizes.get(rt, 0) + 1
        if rt not in first:
            first[rt] = v
    big_root = max(sizes, key=lambda k: (sizes[k], -first[k]))
    members = [v for v in range(n) if uf.find(v) == big_root]
    member_set = set(members)
    sub_edges = [(int(pairs[i, 0]), int(pairs[i, 1])) for i in np.nonzero(surv)[0]
                 if int(pairs[i, 0]) in member_set]
    pos = {v: i for i, v in enumerate(members)}
    g1 = Multigraph(len(members), [(pos[u], pos[v]) for u, v in sub_edges])
    sp = g1.m - g1.n + 1
    kern = kernel(g1)
    return {
        "size": g1.n,
        "edges": g1.m,
        "surplus": sp,
        "kernel_defined": kern.kind == "core",
        "kernel_three_regular": kern.is_three_regular(),
    }


class MeasuredTree:
    """A tree multigraph with a probability mass per vertex."""

    def __init__(self, tree, masses, labels=None):
        self.tree = tree
        self.masses = np.asarray(masses, dtype=float)
        if self.masses.shape != (tree.n,):
            raise ValueError("one mass per vertex")
        if np.any(self.masses < 0) or abs(self.masses.sum() - 1.0) > 1e-9:
            raise ValueError("masses must be a probability vector")
        self.labels = labels


AttachAvail = namedtuple(
    "AttachAvail", "attach avail connected r_counts avail_degrees pendant_total")


def attach_avail_measures(n, lam, rng):
    """Attach and avail measures on the cut tree of G1(n, lambda).

    Runs the pipeline with the global forest retained: the first
    R(n, lambda) steps use the removing (Def.-style) process, then the
    run continues to the forest.  Pendant trees hanging off the cut
    tree of G1 supply the attach masses; degree deficiencies in the
    length-carrying largest component supply the avail masses.
    """
    t = t_of_lambda(n, lam)
    g13 = configuration_model(DegreeSequence([3] * n), rng)
    lengths = rng.exponential(1.0, size=g13.m)
    gexp = Multigraph(n, g13.edges, lengths)
    connected = len(components(g13)) == 1
    ell = math.fsum(lengths)
    r = int(rng.poisson(t * ell))
    state = cbd_run(gexp, r, rng, mark_only=False)
    survived = state.surviving_ids()
    remg = gexp.subgraph_edges(survived)
    comp = components(remg)[0] if remg.n else set()
    frak_g1 = remg.induced(comp)
    w = sorted(comp)

    # degree deficiency in the largest surviving component
    deg = {v: 0 for v in w}
    for u, v in frak_g1.edges:
        deg[frak_g1.vertex_labels[u]] += 1
        deg[frak_g1.vertex_labels[v]] += 1
    avail_deg = {v: 3 - deg[v] for v in w}

    forest, _, _, _ = cbd_finish(state, rng)
    # cut tree of G1 = final forest induced on the component's vertices;
    # a sampled edge inside a Rem-component is always removed (it closes
    # a cycle with surviving edges), so this induced graph is a tree
    in_w = set(w)
    tree_w = forest.induced(in_w)
    if connected:
        assert tree_w.m == len(w) - 1, "cut tree of G1 must be a tree"
    k = len(w)

    r_counts = {v: 0 for v in w}
    pendant = {v: 0 for v in w}
    if connected:
        # hanging trees: components of the forest minus W, each attached
        # to exactly one W-vertex by a single forest edge
        adj = forest.adjacency()
        seen = set(w)
        for s in range(n):
            if s in seen:
                continue
            stack = [s]
            seen.add(s)
            blob = [s]
            anchors = []
            while stack:
                u = stack.pop()
                for v, _ in adj[u]:
                    if v in in_w:
                        anchors.append(v)
                    elif v not in seen:
                        seen.add(v)
                        blob.append(v)
                        stack.append(v)
            anchors = set(anchors)
            assert len(anchors) == 1, "pendant component with multiple anchors"
            a = anchors.pop()
            r_counts[a] += 1
            pendant[a] += len(blob)
        attach_masses = np.array(
            [(1 + pendant[v]) / n for v in w], dtype=float)
    else:
        attach_masses = np.full(k, 1.0 / k)

    tot_avail = sum(avail_deg.values())
    if tot_avail == 0:
        avail_masses = np.full(k, 1.0 / k)
    else:
        avail_masses = np.array(
            [avail_deg[v] / tot_avail for v in w], dtype=float)

    attach = MeasuredTree(tree_w, attach_masses, labels=w)
    avail = MeasuredTree(tree_w, avail_masses, labels=w)
    return AttachAvail(attach, avail, connected,
                       r_counts, avail_deg, sum(pendant.values()))


JointSample = namedtuple(
    "JointSample", "m q1 q2 connected c1 slots pendant_sizes removed_extra")


def joint_sampler(n, lam, rng):
    """Five-step joint generation of the thinned graph, the full
    configuration model and the pendant multigraphs per available
    half-edge of the largest thinned component.

    (a) m ~ Binomial(3n/2, 1/2 - lambda n^(-1/3)); (b) Q1 from the
    half-edge coupling, largest component C1 with its available
    half-edges; (c) Q2 overlays the remaining pairings; (d) on
    connected Q2, a uniform permutation of the extra edges is scanned
    and each one removed unless it disconnects; (e) pendant multigraphs
    attached through each available half-edge are read off.
    """
    if n % 2:
        raise ValueError("n must be even")
    p_remove = 0.5 - lam * n ** (-1.0 / 3.0)
    if not (0.0 <= p_remove <= 1.0):
        raise ValueError("lambda outside the window")
    m = int(rng.binomial(3 * n // 2, p_remove))
    d = DegreeSequence([3] * n)

    owner = np.repeat(np.arange(n, dtype=np.int64), 3)
    perm = rng.permutation(d.ell)
    kept_half = perm[: d.ell - 2 * m]
    rest_half = perm[d.ell - 2 * m:]
    q1_edges = [(int(owner[kept_half[2 * i]]), int(owner[kept_half[2 * i + 1]]))
                for i in range(len(kept_half) // 2)]
    extra_edges = [(int(owner[rest_half[2 * i]]), int(owner[rest_half[2 * i + 1]]))
                   for i in range(m)]
    q1 = Multigraph(n, q1_edges)
    q2 = Multigraph(n, q1_edges + extra_edges)

    comps = components(q1)
    c1 = comps[0] if comps else set()
    # available half-edges of C1 vertices, ordered (vertex, slot)
    used = {v: 0 for v in c1}
    for u, v in q1_edges:
        if u in used:
            used[u] += 1
        if v in used:
            used[v] += 1
    slots = []
    for v in sorted(c1):
        for i in range(3 - used[v]):
            slots.append((v, i))
    # the extra edge owning each available half-edge, in slot order
    slot_edge = {}
    counters = {v: 0 for v in c1}
    for j, half in enumerate(rest_half):
        v = int(owner[half])
        if v in counters:
            slot_edge[(v, counters[v])] = len(q1_edges) + j // 2
            counters[v] += 1

    connected = len(components(q2)) == 1
    pendant_sizes = {s: 0 for s in slots}
    removed_extra = []
    if connected:
        order = rng.permutation(m)
        present = set(range(q2.m))
        from .multigraph import bridges
        bridge_set = None
        for idx in order:
            eid = len(q1_edges) + int(idx)
            if bridge_set is None:
                bridge_set = bridges(q2, present)
            if eid not in bridge_set:
                present.discard(eid)
                removed_extra.append(eid)
                bridge_set = None
        # every surviving extra edge was a bridge when scanned, hence is
        # a bridge of the final graph; each off-C1 blob hangs by one
        c1set = set(c1)
        uf = UnionFind(n)
        for i in present:
            u, v = q2.edges[i]
            if u not in c1set and v not in c1set:
                uf.union(u, v)
        csize = {}
        for x in range(n):
            if x not in c1set:
                root = uf.find(x)
                csize[root] = csize.get(root, 0) + 1
        for s in slots:
            eid = slot_edge.get(s)
            if eid is None or eid not in present:
                continue
            u, v = q2.edges[eid]
            x = v if u == s[0] else u
            assert x not in c1set, "surviving slot edge must leave C1"
            pendant_sizes[s] = csize[uf.find(x)]
    return JointSample(m, q1, q2, connected, sorted(c1), slots,
                       pendant_sizes, removed_extra)
