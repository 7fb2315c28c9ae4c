"""Random-object generators.

Configuration model and its exact pmf, uniform simple regular graphs,
the coupled Erdos-Renyi process, uniform rooted labeled trees and their
ancestor mark sets, tilted-tree samplers for uniform connected graphs
with fixed surplus and for connectivity-conditioned ER, and uniform
plane trees with a prescribed child sequence.
"""

import itertools
import logging
import math
from bisect import bisect_right
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .multigraph import Multigraph
from .stats import canonical_edges, double_factorial

log = logging.getLogger(__name__)


class DegreeSequence:
    def __init__(self, d):
        self.d = [int(x) for x in d]
        if any(x < 0 for x in self.d):
            raise ValueError("degrees must be nonnegative")
        self.ell = sum(self.d)
        if self.ell % 2:
            raise ValueError("degree sum must be even")

    def __len__(self):
        return len(self.d)


def configuration_model(d, rng):
    """Uniform pairing of half-edges; loops and multi-edges kept."""
    if not isinstance(d, DegreeSequence):
        d = DegreeSequence(d)
    half = np.repeat(np.arange(len(d), dtype=np.int64), d.d)
    rng.shuffle(half)
    edges = half.reshape(-1, 2)
    return Multigraph(len(d), [(int(u), int(v)) for u, v in edges])


def cm_pmf(g, d):
    """Exact configuration-model probability of a multigraph.

    Computes 1/(l-1)!! * prod d_i! / (prod 2^{x_ii} prod x_ij!) in
    rational arithmetic.
    """
    if not isinstance(d, DegreeSequence):
        d = DegreeSequence(d)
    n = len(d)
    if g.n != n:
        raise ValueError("vertex count mismatch")
    if list(g.degrees()) != d.d:
        raise ValueError("graph degrees do not match the degree sequence")
    x = {}
    loops = [0] * n
    for u, v in g.edges:
        if u == v:
            loops[u] += 1
        else:
            key = (min(u, v), max(u, v))
            x[key] = x.get(key, 0) + 1
    num = 1
    for dv in d.d:
        num *= math.factorial(dv)
    den = double_factorial(d.ell - 1)
    for c in loops:
        den *= 2 ** c * math.factorial(c)
    for c in x.values():
        den *= math.factorial(c)
    return Fraction(num, den)


def is_simple(g):
    seen = set()
    for u, v in g.edges:
        if u == v:
            return False
        key = (min(u, v), max(u, v))
        if key in seen:
            return False
        seen.add(key)
    return True


def uniform_simple_regular(n, degree=3, rng=None, max_attempts=100000):
    """Uniform simple d-regular graph by rejection on the configuration
    model conditioned to be simple."""
    if (n * degree) % 2:
        raise ValueError("n * degree must be even")
    if degree >= n and not (degree == 0 and n >= 0):
        raise ValueError("simple %d-regular graph on %d vertices is infeasible" % (degree, n))
    d = DegreeSequence([degree] * n)
    for attempt in range(1, max_attempts + 1):
        g = configuration_model(d, rng)
        if is_simple(g):
            return g
    raise RuntimeError("rejection cap exceeded after %d attempts" % max_attempts)


class ErProcess:
    """Coupled Erdos-Renyi process on [n].

    Stores one Uniform[0,1] variable per unordered pair, so the graphs
    at different lambda are nested by construction.  Dense storage:
    intended for n up to a few thousand.
    """

    MAX_DENSE = 4000

    def __init__(self, n, rng):
        if n > self.MAX_DENSE:
            raise ValueError("dense ErProcess supports n <= %d" % self.MAX_DENSE)
        self.n = int(n)
        self.npairs = n * (n - 1) // 2
        self.u = rng.random(self.npairs)

    @staticmethod
    def pair_index(i, j):
        # upper-triangle row-major with i < j
        if i > j:
            i, j = j, i
        return j * (j - 1) // 2 + i

    def pairs(self):
        for j in range(self.n):
            for i in range(j):
                yield i, j

    def threshold(self, lam):
        t = 1.0 / self.n + lam * self.n ** (-4.0 / 3.0)
        return min(max(t, 0.0), 1.0)

    def graph(self, lam):
        thr = self.threshold(lam)
        edges = []
        k = 0
        for j in range(self.n):
            for i in range(j):
                if self.u[k] <= thr:
                    edges.append((i, j))
                k += 1
        return Multigraph(self.n, edges)


def er_graph(proc, lam):
    """Graph of the coupled ER process at a given lambda."""
    return proc.graph(lam)


class RootedTree:
    """Rooted tree on 0..m-1 via a parent array.

    Child lists are ordered by vertex label unless the tree was built
    as a plane tree with an explicit child order.
    """

    def __init__(self, parent, root, children=None):
        self.parent = list(int(p) for p in parent)
        self.root = int(root)
        self.m = len(self.parent)
        if self.parent[self.root] != -1:
            raise ValueError("root must have parent -1")
        if children is None:
            ch = [[] for _ in range(self.m)]
            for v, p in enumerate(self.parent):
                if p >= 0:
                    ch[p].append(v)
            for lst in ch:
                lst.sort()
            self.children = ch
        else:
            self.children = [list(c) for c in children]
        self._depth = None
        self._preorder = None
        self._subtree = None

    def depth(self, v=None):
        if self._depth is None:
            self._fill()
        return self._depth if v is None else self._depth[v]

    def preorder(self):
        if self._preorder is None:
            self._fill()
        return self._preorder

    def subtree_sizes(self):
        if self._subtree is None:
            self._fill()
        return self._subtree

    def _fill(self):
        depth = [0] * self.m
        order = []
        stack = [self.root]
        while stack:
            u = stack.pop()
            order.append(u)
            for c in reversed(self.children[u]):
                depth[c] = depth[u] + 1
                stack.append(c)
        sub = [1] * self.m
        for u in reversed(order):
            p = self.parent[u]
            if p >= 0:
                sub[p] += sub[u]
        self._depth = depth
        self._preorder = order
        self._subtree = sub

    def height(self, v):
        return self.depth(v)

    def ancestor(self, v, k):
        for _ in range(k):
            v = self.parent[v]
        return v

    def height_function(self):
        """Heights of vertices in depth-first order (length m array)."""
        order = self.preorder()
        d = self.depth()
        return np.array([d[u] for u in order], dtype=float)

    def edges(self):
        return [(self.parent[v], v) for v in range(self.m) if self.parent[v] >= 0]

    def as_multigraph(self):
        return Multigraph(self.m, self.edges())

    def encode(self):
        return tuple(self.parent)


def prufer_decode(seq, m):
    """Edges of the labeled tree with Prufer sequence `seq` on 0..m-1."""
    import heapq
    deg = [1] * m
    for x in seq:
        deg[x] += 1
    leaves = [i for i in range(m) if deg[i] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        deg[x] -= 1
        if deg[x] == 1:
            heapq.heappush(leaves, x)
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append((u, v))
    return edges


def _tree_from_edges(edges, root, m):
    adj = [[] for _ in range(m)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    parent = [-2] * m
    parent[root] = -1
    stack = [root]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if parent[v] == -2:
                parent[v] = u
                stack.append(v)
    return RootedTree(parent, root)


def uniform_labeled_tree(m, rng):
    """Uniform rooted labeled tree on [m] (m^(m-1) of them)."""
    if m < 1:
        raise ValueError("m >= 1 required")
    if m == 1:
        return RootedTree([-1], 0)
    if m == 2:
        root = int(rng.integers(0, 2))
        return _tree_from_edges([(0, 1)], root, 2)
    seq = rng.integers(0, m, size=m - 2)
    edges = prufer_decode([int(x) for x in seq], m)
    root = int(rng.integers(0, m))
    return _tree_from_edges(edges, root, m)


def r_sets(t, v):
    """Per-ancestor sets R(parent^(k)(v), v, t) and their union R(v, t).

    R at level k holds the children u of the k-th ancestor of v with
    u greater than the (k-1)-st ancestor.
    """
    per_level = []
    cur = v
    anc = t.parent[v]
    while anc >= 0:
        level = {u for u in t.children[anc] if u > cur}
        per_level.append(level)
        cur = anc
        anc = t.parent[anc]
    union = set()
    for s in per_level:
        union |= s
    return per_level, union


class MarkIndex:
    """The mark set {(v, u) : u in R(v, t)} of a rooted tree.

    A mark corresponds to an ordered sibling pair (c, w) with c < w
    (children of a common parent) and a vertex v in the subtree of c;
    then u = w.  This gives |A_1| = sum over such pairs of |subtree(c)|
    and O(1) uniform mark sampling through preorder intervals.
    """

    def __init__(self, t):
        self.tree = t
        sub = t.subtree_sizes()
        order = t.preorder()
        self.pre_pos = [0] * t.m
        for i, u in enumerate(order):
            self.pre_pos[u] = i
        self.order = order
        pairs = []
        weights = []
        for q in range(t.m):
            ch = t.children[q]
            if len(ch) < 2:
                continue
            cs = sorted(ch)
            for i, c in enumerate(cs):
                for w in cs[i + 1:]:
                    pairs.append((c, w))
                    weights.append(sub[c])
        self.pairs = pairs
        self.cum = np.cumsum(np.array(weights, dtype=np.int64)) if weights else np.zeros(0, np.int64)
        self.a1 = int(self.cum[-1]) if len(self.cum) else 0
        self.sub = sub

    def a_s_count(self, s):
        return math.comb(self.a1, s)

    def sample_mark(self, rng):
        r = int(rng.integers(0, self.a1))
        k = int(np.searchsorted(self.cum, r, side="right"))
        c, w = self.pairs[k]
        off = r - (int(self.cum[k - 1]) if k else 0)
        v = self.order[self.pre_pos[c] + off]
        return (v, w)

    def sample_a_s(self, s, rng):
        """Uniform element of A_s: s distinct marks in sorted order."""
        if self.a_s_count(s) == 0:
            raise ValueError("A_s is empty for this tree")
        marks = set()
        while len(marks) < s:
            marks.add(self.sample_mark(rng))
        return sorted(marks)


def a1_count(t):
    return MarkIndex(t).a1


def a_s_count(t, s):
    """|A_s(t)| = C(|A_1(t)|, s): sorted s-subsets of the mark set."""
    return math.comb(a1_count(t), s)


def enumerate_a_s(t, s):
    """Brute-force enumeration of A_s(t) straight from its definition:
    sequences (v_1, u_1, ..., v_s, u_s) with nondecreasing v's,
    u_i in R(v_i, t), and u_i < u_j whenever i < j and v_i = v_j.

    Exponential; use on tiny trees as an oracle.
    """
    marks = []
    for v in range(t.m):
        _, rv = r_sets(t, v)
        for u in sorted(rv):
            marks.append((v, u))
    out = []
    for combo in itertools.combinations(marks, s):
        flat = []
        ok = True
        prev = None
        for v, u in combo:
            if prev is not None:
                pv, pu = prev
                if v < pv or (v == pv and u <= pu):
                    ok = False
                    break
            flat.extend([v, u])
            prev = (v, u)
        if ok:
            out.append(tuple(flat))
    return out


def _all_rooted_trees(m):
    """Every rooted labeled tree on [m] (m^(m-1) trees).  m <= 8."""
    if m > 8:
        raise ValueError("exhaustive tree enumeration capped at m = 8")
    if m == 1:
        return [RootedTree([-1], 0)]
    if m == 2:
        return [_tree_from_edges([(0, 1)], r, 2) for r in (0, 1)]
    trees = []
    for seq in itertools.product(range(m), repeat=m - 2):
        edges = prufer_decode(list(seq), m)
        for root in range(m):
            trees.append(_tree_from_edges(edges, root, m))
    return trees


@lru_cache(maxsize=8)
def _tilted_tree_table(m, s):
    """Exact tilted-tree table for small m: (trees, weights |A_s|)."""
    trees = _all_rooted_trees(m)
    weights = []
    indices = []
    for t in trees:
        w = a_s_count(t, s)
        weights.append(w)
        indices.append(MarkIndex(t))
    return trees, indices, np.array(weights, dtype=float)


class _EnvelopeCap:
    """Adaptive cap on |A_1| for tilted-tree rejection.

    Calibrated once per (m, s) from a pilot batch; raised (with a log
    line) whenever a tree exceeds it, which restarts the current draw.
    """

    def __init__(self, m, rng, pilot=64):
        vals = [a1_count(uniform_labeled_tree(m, rng)) for _ in range(pilot)]
        self.cap = max(4, int(1.4 * max(vals)))

    def bump(self, value):
        self.cap = int(1.25 * value) + 1
        log.info("tilted-tree envelope raised to %d", self.cap)


_caps = {}


def _get_cap(m, s, rng):
    key = (m, s)
    if key not in _caps:
        _caps[key] = _EnvelopeCap(m, rng)
    return _caps[key]


def sample_tilted_tree(m, s, rng, max_attempts=2000000):
    """Tree with pmf proportional to Pr(T_m = t) * |A_s(t)|.

    Exact rejection against uniform trees with an |A_1| envelope cap;
    a draw exceeding the cap raises it and restarts the draw.
    """
    cap = _get_cap(m, s, rng)
    for _ in range(max_attempts):
        t = uniform_labeled_tree(m, rng)
        idx = MarkIndex(t)
        if idx.a1 > cap.cap:
            cap.bump(idx.a1)
            continue
        num = math.comb(idx.a1, s)
        den = math.comb(cap.cap, s)
        if rng.random() * den < num:
            return t, idx
    raise RuntimeError("tilted-tree rejection cap exceeded")


def sample_H_ms(m, s, rng, method="auto", max_attempts=2000000):
    """Uniform connected graph on [m] with surplus s.

    Samples the |A_s|-tilted tree, then a uniform element of A_s, adds
    the s extra edges and forgets the root.  method="enumerate" uses the
    exact tilted table (m <= 8, cached); "reject" uses envelope
    rejection; "auto" picks enumeration for m <= 6.
    """
    if s < 1:
        raise ValueError("s >= 1 required")
    if method == "auto":
        method = "enumerate" if m <= 6 else "reject"
    if method == "enumerate":
        trees, indices, weights = _tilted_tree_table(m, s)
        total = weights.sum()
        if total == 0:
            raise ValueError("no connected graph on [%d] with surplus %d" % (m, s))
        k = int(rng.choice(len(trees), p=weights / total))
        t, idx = trees[k], indices[k]
    else:
        t, idx = sample_tilted_tree(m, s, rng, max_attempts=max_attempts)
    marks = idx.sample_a_s(s, rng)
    edges = t.edges() + [(v, u) for v, u in marks]
    g = Multigraph(m, edges)
    # the mark construction cannot duplicate tree edges or each other
    assert len(set(canonical_edges(g.edges))) == g.m
    return g


def exact_H_ms_support(m, s):
    """Enumerated support of H_{m,s}: all connected graphs on [m] with
    surplus s, as canonical encodings.  Oracle for uniformity tests."""
    nedges = m - 1 + s
    allpairs = list(itertools.combinations(range(m), 2))
    out = set()
    for combo in itertools.combinations(allpairs, nedges):
        g = Multigraph(m, list(combo))
        from .multigraph import is_connected
        if is_connected(g):
            out.add(canonical_edges(combo))
    return out


@lru_cache(maxsize=32)
def _gmp_tree_table(m, one_minus_p):
    trees = _all_rooted_trees(m)
    indices = [MarkIndex(t) for t in trees]
    weights = np.array([one_minus_p ** (-idx.a1) for idx in indices], dtype=float)
    return trees, indices, weights


def sample_Gmp(m, p, rng, method="auto", max_attempts=2000000):
    """Erdos-Renyi G(m, p) conditioned to be connected.

    Samples the (1-p)^{-g(t)} tilted tree, then adds each mark edge
    independently with probability p and forgets the root.
    """
    if not (0.0 < p < 1.0):
        raise ValueError("p in (0,1) required")
    if method == "auto":
        method = "enumerate" if m <= 6 else "reject"
    if method == "enumerate":
        trees, indices, weights = _gmp_tree_table(m, 1.0 - p)
        k = int(rng.choice(len(trees), p=weights / weights.sum()))
        t, idx = trees[k], indices[k]
    else:
        cap = _get_cap(m, 1, rng)
        for attempt in range(max_attempts):
            t = uniform_labeled_tree(m, rng)
            idx = MarkIndex(t)
            if idx.a1 > cap.cap:
                cap.bump(idx.a1)
                continue
            if rng.random() < (1.0 - p) ** (cap.cap - idx.a1):
                break
        else:
            raise RuntimeError(
                "tilt-envelope rejection failed (p * m^1.5 = %.3g too large)" % (p * m ** 1.5))
    k_extra = int(rng.binomial(idx.a1, p))
    marks = idx.sample_a_s(k_extra, rng) if k_extra else []
    edges = t.edges() + [(v, u) for v, u in marks]
    return Multigraph(m, edges)


def length_biased_H_ms(m, s, rng, max_attempts=200000):
    """H_{m,s} size-biased by total kernel length L(H).

    Rejection against sample_H_ms with an adaptive L envelope; an
    overshoot re-estimates the envelope (logged) and restarts.
    """
    from .multigraph import kernel
    if s < 2:
        raise ValueError("s >= 2 required (trees and unicycles carry no kernel)")
    l_cap = None
    for _ in range(max_attempts):
        g = sample_H_ms(m, s, rng)
        L = kernel(g).total_length
        if l_cap is None:
            l_cap = max(1.0, 1.5 * L)
        if L > l_cap:
            l_cap = 1.25 * L
            log.info("length-bias envelope re-estimated to %.3g, restarting", l_cap)
            continue
        if rng.random() * l_cap < L:
            return g
    raise RuntimeError("length-biased rejection cap exceeded")


def uniform_plane_tree_child_sequence(k, rng):
    """Uniform plane tree with child sequence k (k[i] vertices have i
    children), via the cycle lemma applied to a uniform permutation of
    the child-count word."""
    k = [int(x) for x in k]
    m = sum(k)
    if m < 1 or sum(i * ki for i, ki in enumerate(k)) != m - 1:
        raise ValueError("infeasible child sequence")
    word = []
    for i, ki in enumerate(k):
        word.extend([i] * ki)
    word = [word[j] for j in rng.permutation(m)]
    # unique rotation whose Lukasiewicz path stays >= 0 until the end
    sums = np.cumsum(np.array(word) - 1)
    start = int(np.argmin(sums)) + 1
    rot = word[start:] + word[:start]
    # build the plane tree in preorder
    parent = [-1] * m
    children = [[] for _ in range(m)]
    stack = [(0, rot[0])]
    nxt = 1
    while stack:
        node, remaining = stack.pop()
        if remaining == 0:
            continue
        child = nxt
        nxt += 1
        parent[child] = node
        children[node].append(child)
        stack.append((node, remaining - 1))
        stack.append((child, rot[child]))
    assert nxt == m
    return RootedTree(parent, 0, children=children)


def plane_tree_count(k):
    """Number of plane trees with child sequence k: (1/m) m!/prod k_i!."""
    m = sum(k)
    num = math.factorial(m)
    den = m
    for ki in k:
        den *= math.factorial(ki)
    out = Fraction(num, den)
    assert out.denominator == 1
    return int(out)
