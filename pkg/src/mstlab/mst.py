"""Minimal spanning trees and their structural properties.

Kruskal construction, the minimax-path verification sweep, reverse
delete, the percolation restriction check, and the conditional MST
generator that produces the complete-graph MST jointly with a coupled
ER graph.
"""

import numpy as np

from .multigraph import Multigraph, components, conne, is_connected
from .rng import stream


class UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


class WeightedGraph:
    """Multigraph plus one weight per edge id.

    Weight ties are broken by edge id, so effective weights are always
    pairwise distinct and runs are deterministic given the seed.
    """

    def __init__(self, graph, w):
        self.graph = graph
        self.w = np.asarray(w, dtype=float)
        if self.w.shape != (graph.m,):
            raise ValueError("one weight per edge required")

    def order(self):
        """Edge ids sorted by (weight, edge id)."""
        return sorted(range(self.graph.m), key=lambda i: (self.w[i], i))


def mst(wg):
    """Edge ids of the MST of the largest component (Kruskal).

    Loops never enter; for disconnected inputs only the largest
    component (ties by smallest vertex id) is spanned.
    """
    g = wg.graph
    comp = components(g)[0] if g.n else set()
    uf = UnionFind(g.n)
    tree = []
    need = len(comp) - 1
    for i in wg.order():
        u, v = g.edges[i]
        if u == v or u not in comp:
            continue
        if uf.union(u, v):
            tree.append(i)
            if len(tree) == need:
                break
    return tree


def minimax_check(tree_edges, wg):
    """True iff for every vertex pair the tree path's maximum weight is
    minimal over all connecting paths.

    Verified by an incremental union-find sweep in weight order: when a
    non-tree edge arrives, its endpoints must already be joined by
    lighter tree edges.
    """
    g = wg.graph
    comp = components(g)[0] if g.n else set()
    tset = set(tree_edges)
    uf = UnionFind(g.n)
    cnt = 0
    for i in tree_edges:
        u, v = g.edges[i]
        if u == v or u not in comp or v not in comp:
            raise ValueError("tree contains a loop or leaves the component")
        cnt += 1
    if cnt != len(comp) - 1:
        raise ValueError("input does not span the largest component")
    for i in wg.order():
        u, v = g.edges[i]
        if u == v or u not in comp:
            continue
        if i in tset:
            uf.union(u, v)
        elif uf.find(u) != uf.find(v):
            return False
    return True


def reverse_delete(wg):
    """Repeatedly delete the heaviest member of conne; returns the MST.

    Requires a connected input.
    """
    g = wg.graph
    if not is_connected(g):
        raise ValueError("reverse delete needs a connected graph")
    present = set(range(g.m))
    while len(present) > g.n - 1:
        removable = conne(g, present)
        victim = max(removable, key=lambda i: (wg.w[i], i))
        present.discard(victim)
    return sorted(present)


def percolation_restriction_check(wg, u):
    """Check Observation: for each component C of the <=u subgraph, the
    MST of the whole graph restricted to C is the MST of C."""
    g = wg.graph
    low_ids = [i for i in range(g.m) if wg.w[i] <= u]
    sub = g.subgraph_edges(low_ids)
    whole = set(mst(wg))
    for comp in components(sub):
        restricted = {i for i in whole
                      if g.edges[i][0] in comp and g.edges[i][1] in comp}
        inner_ids = [i for i in low_ids
                     if g.edges[i][0] in comp and g.edges[i][1] in comp]
        gg = Multigraph(g.n, [g.edges[i] for i in inner_ids],
                        [g.lengths[i] for i in inner_ids])
        inner = mst(WeightedGraph(gg, [wg.w[i] for i in inner_ids]))
        if len(comp) == 1:
            if restricted:
                return False
            continue
        # compare as original edge ids; components() puts the largest
        # first, but here every component of the subgraph is checked
        if {inner_ids[j] for j in inner} != restricted:
            return False
    return True


class ConditionalMst:
    """Complete-graph MST generated conditionally on ER(n, lambda).

    tree_edges: list of (u, v, weight) spanning [n].
    er_components: components of ER(n, lambda), largest first.
    m_lambda: the (u, v, w) tree edges inside the largest component
    (the MST of that component, by the percolation restriction).
    """

    def __init__(self, n, tree_edges, er_components):
        self.n = n
        self.tree_edges = tree_edges
        self.er_components = er_components
        big = er_components[0] if er_components else set()
        self.m_lambda = [e for e in tree_edges if e[0] in big and e[1] in big]

    def pendant_masses(self):
        """|T_{v,lambda}| / n for v in the lambda-MST.

        T_{v,lambda} is the tree containing v once the lambda-MST edges
        are deleted from the full MST.
        """
        uf = UnionFind(self.n)
        skip = {(u, v) for u, v, _ in self.m_lambda}
        for u, v, _ in self.tree_edges:
            if (u, v) not in skip:
                uf.union(u, v)
        sizes = {}
        for x in range(self.n):
            r = uf.find(x)
            sizes[r] = sizes.get(r, 0) + 1
        big = self.er_components[0]
        return {v: sizes[uf.find(v)] / self.n for v in big}


def mst_conditional_on_er(proc, lam, rng):
    """Generate the MST of K_n conditionally on ER(n, lambda).

    Fresh Uniform[0, thr] weights go on the ER edges, fresh
    Uniform[thr, 1] weights on the pairs joining distinct ER
    components; deleting every edge that is the heaviest on some cycle
    of the union graph (equivalently, Kruskal on it) leaves a tree
    whose marginal law is the MST of a uniformly weighted K_n.
    """
    n = proc.n
    thr = proc.threshold(lam)
    er = proc.graph(lam)
    comps = components(er)
    label = [0] * n
    for ci, comp in enumerate(comps):
        for v in comp:
            label[v] = ci
    edges = list(er.edges)
    weights = list(thr * rng.random(er.m))
    for j in range(n):
        for i in range(j):
            if label[i] != label[j]:
                edges.append((i, j))
                weights.append(thr + (1.0 - thr) * rng.random())
    g = Multigraph(n, edges)
    wg = WeightedGraph(g, weights)
    tree = mst(wg)
    tree_edges = [(g.edges[i][0], g.edges[i][1], wg.w[i]) for i in tree]
    return ConditionalMst(n, tree_edges, comps)


def mst_of_complete_graph(m, rng, u0=None):
    """MST of K_m with iid Uniform[0,1] weights, exactly, via threshold
    layers: reveal pairs with weight <= u by geometric skipping and
    double u until the revealed graph is connected; its MST equals the
    MST of K_m by the percolation restriction property.

    Returns (edge array (k,2), weight array) of the revealed graph's
    MST input; run `mst` on it or use mst_tree_of_complete_graph.
    """
    npairs = m * (m - 1) // 2
    u_prev = 0.0
    u = u0 if u0 is not None else min(1.0, 4.0 * np.log(m) / m)
    have = {}
    while True:
        q = (u - u_prev) / (1.0 - u_prev)
        if q >= 1.0:
            for idx in range(npairs):
                if idx not in have:
                    have[idx] = u_prev + (1.0 - u_prev) * rng.random()
        else:
            pos = -1
            while True:
                step = int(np.ceil(np.log(max(rng.random(), 1e-300)) / np.log1p(-q)))
                pos += max(step, 1)
                if pos >= npairs:
                    break
                if pos not in have:
                    have[pos] = u_prev + (u - u_prev) * rng.random()
        # connectivity of the revealed graph
        uf = UnionFind(m)
        ncomp = m
        keys = np.fromiter(have.keys(), dtype=np.int64, count=len(have))
        b = np.ceil((np.sqrt(8.0 * (keys + 1) + 1) - 1) / 2).astype(np.int64)
        a = keys - b * (b - 1) // 2
        for x, y in zip(a, b):
            if uf.union(int(x), int(y)):
                ncomp -= 1
        if ncomp == 1:
            w = np.fromiter(have.values(), dtype=float, count=len(have))
            return np.stack([a, b], axis=1), w
        u_prev, u = u, min(1.0, 2.0 * u)


def mst_tree_of_complete_graph(m, rng):
    """Adjacency lists of the MST of K_m with iid uniform weights."""
    E, w = mst_of_complete_graph(m, rng)
    order = np.lexsort((np.arange(len(w)), w))
    uf = UnionFind(m)
    adj = [[] for _ in range(m)]
    cnt = 0
    for i in order:
        x, y = int(E[i, 0]), int(E[i, 1])
        if uf.union(x, y):
            adj[x].append(y)
            adj[y].append(x)
            cnt += 1
            if cnt == m - 1:
                break
    return adj
