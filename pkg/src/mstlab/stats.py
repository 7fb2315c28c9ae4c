"""Shared statistical utilities: exact enumeration oracles, TV distance,
KS and chi-square tests, Monte-Carlo standard errors.

Outcome encodings are canonical sorted edge lists so laws produced by
different samplers are comparable.
"""

import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
from scipy import special, stats as _sstats

from .multigraph import Multigraph

PAIRING_CAP = 8      # max total degree for enumerate_pairings
SPANNING_CAP = 10    # max edge count for enumerate_spanning_trees


def canonical_edges(edges):
    """Canonical encoding of a multigraph edge multiset."""
    return tuple(sorted((min(u, v), max(u, v)) for u, v in edges))


def canonical_graph(g):
    return canonical_edges(g.edges)


class EmpiricalLaw:
    """Counts over a canonical outcome encoding."""

    def __init__(self):
        self.counts = Counter()
        self.total = 0

    def add(self, outcome):
        self.counts[outcome] += 1
        self.total += 1

    @classmethod
    def from_outcomes(cls, outcomes):
        law = cls()
        for o in outcomes:
            law.add(o)
        return law

    def freq(self, outcome):
        return self.counts[outcome] / self.total


def tv_distance(emp, exact):
    """(1/2) sum |p_hat - p| between an EmpiricalLaw and an exact pmf.

    Raises if the empirical law contains an outcome outside the exact
    support (an encoding mismatch, not sampling noise).
    """
    if emp.total == 0:
        raise ValueError("empty empirical law")
    unknown = set(emp.counts) - set(exact)
    if unknown:
        raise ValueError("outcomes outside the exact support: %r" % (sorted(unknown)[:3],))
    acc = 0.0
    for key, p in exact.items():
        acc += abs(emp.counts.get(key, 0) / emp.total - float(p))
    return 0.5 * acc


def double_factorial(k):
    if k <= 0:
        return 1
    out = 1
    while k > 0:
        out *= k
        k -= 2
    return out


def enumerate_pairings(d):
    """All (l-1)!! half-edge pairings for a degree sequence, with the
    resulting multigraphs.  Capped at l <= 8.

    Returns a list of (encoding, Multigraph).
    """
    d = list(int(x) for x in d)
    ell = sum(d)
    if ell % 2:
        raise ValueError("degree sum must be even")
    if ell > PAIRING_CAP:
        raise ValueError("enumerate_pairings capped at degree sum %d" % PAIRING_CAP)
    owner = []
    for v, dv in enumerate(d):
        owner.extend([v] * dv)
    out = []

    def rec(remaining, acc):
        if not remaining:
            out.append(list(acc))
            return
        a = remaining[0]
        for idx in range(1, len(remaining)):
            b = remaining[idx]
            acc.append((owner[a], owner[b]))
            rec(remaining[1:idx] + remaining[idx + 1:], acc)
            acc.pop()

    rec(list(range(ell)), [])
    assert len(out) == double_factorial(ell - 1)
    result = []
    for edges in out:
        g = Multigraph(len(d), edges)
        result.append((canonical_edges(edges), g))
    return result


def cm_exact_law(d):
    """Exact configuration-model pmf over canonical encodings."""
    pairings = enumerate_pairings(d)
    counts = Counter(enc for enc, _ in pairings)
    total = len(pairings)
    return {enc: Fraction(c, total) for enc, c in counts.items()}


def enumerate_spanning_trees(g):
    """All spanning trees of a connected multigraph as frozensets of
    edge ids.  Capped at 10 edges."""
    if g.m > SPANNING_CAP:
        raise ValueError("enumerate_spanning_trees capped at %d edges" % SPANNING_CAP)
    need = g.n - 1
    trees = []
    ids = [i for i in range(g.m) if g.edges[i][0] != g.edges[i][1]]
    for combo in itertools.combinations(ids, need):
        parent = list(range(g.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for i in combo:
            u, v = g.edges[i]
            ru, rv = find(u), find(v)
            if ru == rv:
                ok = False
                break
            parent[ru] = rv
        if ok:
            trees.append(frozenset(combo))
    return trees


def ks_statistic(sample, cdf):
    """One-sample KS statistic against a cdf callable."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = len(x)
    if n == 0:
        raise ValueError("empty sample")
    f = np.asarray(cdf(x), dtype=float)
    up = np.arange(1, n + 1) / n - f
    lo = f - np.arange(0, n) / n
    return float(max(up.max(), lo.max()))


def ks_test(sample, cdf, level=0.001):
    """One-sample KS test; p-value via the asymptotic Kolmogorov law.

    Returns (statistic, p_value, reject).
    """
    stat = ks_statistic(sample, cdf)
    n = len(sample)
    p = float(special.kolmogorov(stat * (math.sqrt(n) + 0.12 + 0.11 / math.sqrt(n))))
    return stat, p, p < level


def ks_two_sample(a, b, level=0.001):
    """Two-sample KS; returns (statistic, p_value, reject)."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    allv = np.concatenate([a, b])
    fa = np.searchsorted(a, allv, side="right") / len(a)
    fb = np.searchsorted(b, allv, side="right") / len(b)
    stat = float(np.max(np.abs(fa - fb)))
    ne = len(a) * len(b) / (len(a) + len(b))
    p = float(special.kolmogorov(stat * (math.sqrt(ne) + 0.12 + 0.11 / math.sqrt(ne))))
    return stat, p, p < level


def chi_square(counts, probs, level=0.001):
    """Goodness-of-fit chi-square; returns (statistic, p_value, reject)."""
    counts = np.asarray(counts, dtype=float)
    probs = np.asarray(probs, dtype=float)
    n = counts.sum()
    expected = probs * n
    stat = float(((counts - expected) ** 2 / expected).sum())
    p = float(_sstats.chi2.sf(stat, len(counts) - 1))
    return stat, p, p < level


def mc_stderr(p_hat, n):
    """Standard error of a Monte-Carlo frequency."""
    return math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / n)
