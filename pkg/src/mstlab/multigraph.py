"""Multigraphs with edge lengths: components, surplus, bridges, kernel.

Vertices are 0..n-1.  Edges are an ordered list of (u, v) pairs; u == v
encodes a loop.  The position of an edge in the list is its identity:
samplers, tie-breaks and red marks all refer to edge ids, which keeps
runs reproducible.
"""

import heapq
import math
from collections import deque

import numpy as np


class Multigraph:
    """Labeled multigraph with nonnegative finite edge lengths.

    Instances are treated as immutable after construction, except for
    red marks (offsets in (0, len(e)) attached to edges by the
    cycle-breaking process).
    """

    def __init__(self, n, edges, lengths=None):
        self.n = int(n)
        self.edges = [(int(u), int(v)) for (u, v) in edges]
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError("edge endpoint out of range")
        if lengths is None:
            self.lengths = np.ones(len(self.edges), dtype=float)
        else:
            self.lengths = np.asarray(lengths, dtype=float).copy()
            if self.lengths.shape != (len(self.edges),):
                raise ValueError("one length per edge required")
            if not np.all(np.isfinite(self.lengths)) or np.any(self.lengths < 0):
                raise ValueError("lengths must be nonnegative and finite")
        self.red_points = {}  # edge id -> list of offsets in (0, len(e))

    @property
    def m(self):
        return len(self.edges)

    def degree(self, v):
        d = 0
        for u, w in self.edges:
            if u == v:
                d += 1
            if w == v:
                d += 1
        return d

    def degrees(self):
        d = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            d[u] += 1
            d[v] += 1
        return d

    def adjacency(self):
        """adj[v] = list of (neighbor, edge_id); loops appear once."""
        adj = [[] for _ in range(self.n)]
        for i, (u, v) in enumerate(self.edges):
            if u == v:
                adj[u].append((u, i))
            else:
                adj[u].append((v, i))
                adj[v].append((u, i))
        return adj

    def mark_red(self, edge_id, offset):
        length = self.lengths[edge_id]
        if not (0 <= offset <= length):
            raise ValueError("red offset outside edge")
        self.red_points.setdefault(edge_id, []).append(float(offset))

    def copy(self, drop_marks=False):
        g = Multigraph(self.n, self.edges, self.lengths)
        if not drop_marks:
            g.red_points = {k: list(v) for k, v in self.red_points.items()}
        return g

    def induced(self, vertices, keep_marks=False):
        """Sub-multigraph on a vertex subset (relabeled 0..k-1).

        Returns (graph, label_map) where label_map[new] = old id.
        """
        vs = sorted(vertices)
        pos = {v: i for i, v in enumerate(vs)}
        edges, lengths, old_ids = [], [], []
        for i, (u, v) in enumerate(self.edges):
            if u in pos and v in pos:
                edges.append((pos[u], pos[v]))
                lengths.append(self.lengths[i])
                old_ids.append(i)
        g = Multigraph(len(vs), edges, lengths)
        if keep_marks:
            for new_id, old in enumerate(old_ids):
                if old in self.red_points:
                    g.red_points[new_id] = list(self.red_points[old])
        g.edge_origin = old_ids
        g.vertex_labels = vs
        return g

    def subgraph_edges(self, edge_ids, keep_marks=False):
        """Same vertex set, restricted edge list (in edge-id order)."""
        ids = sorted(edge_ids)
        g = Multigraph(self.n, [self.edges[i] for i in ids],
                       self.lengths[ids] if ids else [])
        if keep_marks:
            for new_id, old in enumerate(ids):
                if old in self.red_points:
                    g.red_points[new_id] = list(self.red_points[old])
        g.edge_origin = ids
        return g

    def __repr__(self):
        return "Multigraph(n=%d, m=%d)" % (self.n, self.m)


def components(g):
    """Connected components as vertex sets, largest first.

    Ties in size are broken by the smallest contained vertex id.
    """
    seen = [False] * g.n
    adj = g.adjacency()
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for v, _ in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    dq.append(v)
        comps.append(set(comp))
    comps.sort(key=lambda c: (-len(c), min(c)))
    return comps


def is_connected(g):
    return g.n == 0 or len(components(g)) == 1


def surplus(g, component=None):
    """sp = |E| - |V| + 1 of the graph or of an induced component."""
    if component is None:
        if not is_connected(g):
            raise ValueError("surplus of a disconnected graph is undefined; pass a component")
        return g.m - g.n + 1
    comp = set(component)
    e = sum(1 for u, v in g.edges if u in comp and v in comp)
    return e - len(comp) + 1


def bridges(g, present=None):
    """Edge ids of bridges (loops and parallel copies are never bridges).

    `present` optionally restricts to a subset of edge ids (a bool mask
    or a set); absent edges are ignored entirely.
    """
    if present is None:
        alive = [True] * g.m
    elif isinstance(present, (set, frozenset)):
        alive = [i in present for i in range(g.m)]
    else:
        alive = list(present)
    adj = [[] for _ in range(g.n)]
    for i, (u, v) in enumerate(g.edges):
        if alive[i] and u != v:
            adj[u].append((v, i))
            adj[v].append((u, i))
    disc = [-1] * g.n
    low = [0] * g.n
    out = []
    timer = 0
    for root in range(g.n):
        if disc[root] != -1:
            continue
        # iterative Tarjan; skip the entering edge by id so parallel
        # edges are handled correctly
        stack = [(root, -1, iter(adj[root]))]
        disc[root] = low[root] = timer
        timer += 1
        while stack:
            u, in_edge, it = stack[-1]
            advanced = False
            for v, eid in it:
                if eid == in_edge:
                    continue
                if disc[v] == -1:
                    disc[v] = low[v] = timer
                    timer += 1
                    stack.append((v, eid, iter(adj[v])))
                    advanced = True
                    break
                low[u] = min(low[u], disc[v])
            if not advanced:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[u])
                    if low[u] > disc[p]:
                        out.append(in_edge)
    return set(out)


def conne(g, present=None):
    """Edges whose removal keeps their graph connected (non-bridges).

    Requires the (restricted) graph to be connected when `present` is
    None; with a restriction the check is per the caller.
    """
    if present is None:
        if not is_connected(g):
            raise ValueError("conne is defined for connected graphs")
        alive = set(range(g.m))
    elif isinstance(present, (set, frozenset)):
        alive = set(present)
    else:
        alive = {i for i, a in enumerate(present) if a}
    return alive - bridges(g, present)


class Kernel:
    """Kernel of a connected multigraph.

    kind == "core": `graph` is the min-degree-3 multigraph whose edge
    lengths are path-contraction sums; kind == "cycle" is the surplus-1
    sentinel carrying the cycle's total length; kind == "empty" is the
    surplus-0 sentinel.
    """

    def __init__(self, kind, graph=None, cycle_length=0.0):
        self.kind = kind
        self.graph = graph
        if kind == "core":
            self.total_length = float(math.fsum(graph.lengths))
        elif kind == "cycle":
            self.total_length = float(cycle_length)
        else:
            self.total_length = 0.0

    def surplus(self):
        if self.kind == "empty":
            return 0
        if self.kind == "cycle":
            return 1
        return self.graph.m - self.graph.n + 1

    def is_three_regular(self):
        if self.kind != "core":
            return False
        return all(d == 3 for d in self.graph.degrees())

    def __repr__(self):
        return "Kernel(kind=%r, L=%.4g)" % (self.kind, self.total_length)


def kernel(g):
    """2-core then contraction of degree-2 paths, with summed lengths.

    Surplus 0 gives the Empty sentinel, surplus 1 the Cycle sentinel
    (the core is a bare cycle, so the min-degree-3 representation does
    not apply).
    """
    if not is_connected(g):
        raise ValueError("kernel is defined for connected graphs")
    sp = g.m - g.n + 1
    if sp == 0:
        return Kernel("empty")

    # 2-core: iteratively strip degree-1 vertices
    deg = g.degrees().copy()
    alive_e = [True] * g.m
    alive_v = [True] * g.n
    adj = g.adjacency()
    dq = deque(v for v in range(g.n) if deg[v] == 1)
    while dq:
        u = dq.popleft()
        if not alive_v[u] or deg[u] != 1:
            continue
        alive_v[u] = False
        for v, eid in adj[u]:
            if alive_e[eid]:
                alive_e[eid] = False
                deg[u] -= 1
                deg[v] -= 1
                if alive_v[v] and deg[v] == 1:
                    dq.append(v)
                break

    core_len = math.fsum(g.lengths[i] for i in range(g.m) if alive_e[i])
    if sp == 1:
        return Kernel("cycle", cycle_length=core_len)

    branch = [v for v in range(g.n) if alive_v[v] and deg[v] >= 3]
    pos = {v: i for i, v in enumerate(branch)}
    core_adj = [[] for _ in range(g.n)]
    for i, (u, v) in enumerate(g.edges):
        if alive_e[i]:
            core_adj[u].append((v, i))
            if u != v:
                core_adj[v].append((u, i))

    used = [False] * g.m
    kedges, klengths = [], []
    for b in branch:
        for v0, e0 in core_adj[b]:
            if used[e0]:
                continue
            # walk the degree-2 chain starting with edge e0
            used[e0] = True
            total = g.lengths[e0]
            prev, cur = b, v0
            while cur not in pos:
                nxt = None
                for w, eid in core_adj[cur]:
                    if not used[eid]:
                        nxt = (w, eid)
                        break
                if nxt is None:
                    raise AssertionError("broken core chain")
                used[nxt[1]] = True
                total += g.lengths[nxt[1]]
                prev, cur = cur, nxt[0]
            kedges.append((pos[b], pos[cur]))
            klengths.append(total)
    kg = Multigraph(len(branch), kedges, klengths)
    kg.vertex_labels = branch
    return Kernel("core", graph=kg)


def distances(g, source, present=None):
    """Length-weighted shortest-path distances from `source`.

    Unreachable vertices get math.inf.
    """
    if isinstance(present, (set, frozenset)):
        alive = [i in present for i in range(g.m)]
    elif present is not None:
        alive = list(present)
    else:
        alive = None
    adj = [[] for _ in range(g.n)]
    for i, (u, v) in enumerate(g.edges):
        if alive is not None and not alive[i]:
            continue
        if u != v:
            adj[u].append((v, g.lengths[i]))
            adj[v].append((u, g.lengths[i]))
    dist = [math.inf] * g.n
    dist[source] = 0.0
    pq = [(0.0, source)]
    while pq:
        d, u = heapq.heappop(pq)
        if d > dist[u]:
            continue
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(pq, (nd, v))
    return np.array(dist)


def diameter(g):
    """Max pairwise shortest-path distance; error if disconnected."""
    if g.n == 0:
        return 0.0
    if not is_connected(g):
        raise ValueError("diameter of a disconnected graph")
    if g.m == g.n - 1:
        # tree: double sweep is exact for nonnegative lengths
        d0 = distances(g, 0)
        a = int(np.argmax(d0))
        da = distances(g, a)
        return float(np.max(da))
    best = 0.0
    for s in range(g.n):
        best = max(best, float(np.max(distances(g, s))))
    return best


def total_length(g):
    """Sum of all edge lengths, loops included; works disconnected."""
    return float(math.fsum(g.lengths))


def write_edge_list(g, path):
    """Text format: first line `n m`, then `u v len` per edge.

    Red marks are never serialized.  The length column is omitted when
    every length is 1.
    """
    unit = bool(np.all(g.lengths == 1.0))
    with open(path, "w") as fh:
        fh.write("%d %d\n" % (g.n, g.m))
        for i, (u, v) in enumerate(g.edges):
            if unit:
                fh.write("%d %d\n" % (u, v))
            else:
                fh.write("%d %d %s\n" % (u, v, repr(float(g.lengths[i]))))


def read_edge_list(path):
    with open(path) as fh:
        tokens = fh.read().split("\n")
    lines = [ln for ln in tokens if ln.strip() and not ln.startswith("#")]
    n, m = (int(x) for x in lines[0].split())
    edges, lengths = [], []
    for ln in lines[1:m + 1]:
        parts = ln.split()
        edges.append((int(parts[0]), int(parts[1])))
        lengths.append(float(parts[2]) if len(parts) > 2 else 1.0)
    return Multigraph(n, edges, lengths)
