"""Finite multisets, the Dershowitz-Manna ordering, and controlled bad
sequences over the inclusion-ordered multiset wqo."""

from __future__ import annotations


class BudgetExceeded(Exception):
    pass


class Multiset:
    """A finite multiset.  Immutable; counts are positive integers."""

    __slots__ = ("counts", "_hash")

    def __init__(self, items=()):
        counts = {}
        if isinstance(items, dict):
            for x, n in items.items():
                if n < 0:
                    raise ValueError("negative multiplicity")
                if n:
                    counts[x] = counts.get(x, 0) + n
        else:
            for x in items:
                counts[x] = counts.get(x, 0) + 1
        self.counts = counts
        self._hash = None

    def multiplicity(self, x):
        return self.counts.get(x, 0)

    def underlying_set(self):
        return frozenset(self.counts)

    def occurrences(self):
        """The paper's indexed-element view: (element, index) pairs."""
        return [(x, i) for x in self.counts for i in range(1, self.counts[x] + 1)]

    def union(self, other):
        merged = dict(self.counts)
        for x, n in other.counts.items():
            merged[x] = merged.get(x, 0) + n
        return Multiset(merged)

    def remove(self, x, n=1):
        have = self.counts.get(x, 0)
        if have < n:
            raise ValueError("cannot remove %r x%d" % (x, n))
        out = dict(self.counts)
        if have == n:
            del out[x]
        else:
            out[x] = have - n
        return Multiset(out)

    def norm(self):
        """Infinity norm: the maximal multiplicity (0 for the empty multiset)."""
        return max(self.counts.values(), default=0)

    def __len__(self):
        return sum(self.counts.values())

    def __iter__(self):
        for x, n in self.counts.items():
            for _ in range(n):
                yield x

    def __eq__(self, other):
        if not isinstance(other, Multiset):
            return NotImplemented
        return self.counts == other.counts

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.counts.items()))
        return self._hash

    def __repr__(self):
        inner = ", ".join("%r:%d" % kv for kv in sorted(
            self.counts.items(), key=lambda kv: repr(kv[0])))
        return "Multiset{%s}" % inner


def set_equal(a, b):
    """A =_Set B: the underlying sets coincide."""
    return a.underlying_set() == b.underlying_set()


def subseteq(a, b):
    """Pointwise multiplicity comparison."""
    for x, n in a.counts.items():
        if b.counts.get(x, 0) < n:
            return False
    return True


def dm_less(a, b, elem_order=None):
    """Dershowitz-Manna strict order induced by a strict well-order on
    elements.

    a < b iff there is an x with m_a(x) < m_b(x) such that m_a(y) = m_b(y)
    for every y > x.  ``elem_order`` is a sort key giving the element order
    (default: natural ordering of the elements).
    """
    if elem_order is None:
        elem_order = lambda x: x
    keys = set(a.counts) | set(b.counts)
    for x in sorted(keys, key=elem_order, reverse=True):
        ma, mb = a.counts.get(x, 0), b.counts.get(x, 0)
        if ma == mb:
            continue
        return ma < mb
    return False


def max_controlled_bad_length(k, f, t, node_cap=5_000_000):
    """Maximal length of (f,t)-controlled bad sequences of multisets over a
    k-letter alphabet, ordered by inclusion with the infinity norm.

    A sequence q_0, q_1, ... is controlled when ||q_n|| <= f^n(t), and bad
    when there are no i < j with q_i included in q_j.  The search is the
    finitely-branching tree of all controlled bad sequences, explored
    exhaustively.  Subtrees are shared: the maximal extension of a prefix
    depends only on the step index and on the minimal elements of the
    prefix (they determine the excluded upward-closed set), so results are
    memoized on that state, up to coordinate permutation.  Candidates are
    further restricted to the maximal admissible tuples: picking a
    pointwise-larger tuple excludes a smaller upward-closed set, so it can
    only lengthen the best continuation.  Only desk-scale parameters
    terminate before the cap.
    """
    if k < 0 or t < 0:
        raise ValueError("k and t must be nonnegative")
    bounds_seen = [t]

    def bound(n):
        while len(bounds_seen) <= n:
            prev = bounds_seen[-1]
            nxt = f(prev)
            if nxt <= prev:
                raise ValueError("control function is not strictly increasing "
                                 "at %d" % prev)
            bounds_seen.append(nxt)
        return bounds_seen[n]

    budget = [node_cap]

    def tuples_up_to(limit):
        # all k-tuples of counts with max entry <= limit
        out = [()]
        for _ in range(k):
            out = [pre + (c,) for pre in out for c in range(limit + 1)]
        return out

    def included(p, q):
        return all(x <= y for x, y in zip(p, q))

    import itertools
    perms = list(itertools.permutations(range(k))) if k <= 4 else None

    def canon(minima):
        if perms is None:
            return frozenset(minima)
        return min(tuple(sorted(tuple(q[i] for i in perm) for q in minima))
                   for perm in perms)

    if k == 2:
        return _planar_bad_length(bound, budget)

    def max_candidates(minima, b):
        """Maximal tuples in [0, b]^k dominating no element of ``minima``
        (an antichain)."""
        if not minima:
            return [(b,) * k]
        if k == 1:
            m = min(p[0] for p in minima)
            return [(m - 1,)] if m > 0 else []
        # charge the enumeration to the budget: the grid grows with the
        # control function and a single level can dwarf the whole search
        budget[0] -= (b + 1) ** k
        if budget[0] < 0:
            raise BudgetExceeded("max_controlled_bad_length node cap hit")
        cand = [q for q in tuples_up_to(b)
                if not any(included(p, q) for p in minima)]
        return [q for q in cand
                if not any(q != r and included(q, r) for r in cand)]

    memo = {}

    def explore(minima, n):
        key = (n, canon(minima))
        if key in memo:
            return memo[key]
        budget[0] -= 1
        if budget[0] < 0:
            raise BudgetExceeded("max_controlled_bad_length node cap hit")
        best = 0
        for q in max_candidates(minima, bound(n)):
            nxt = frozenset(p for p in minima if not included(q, p)) | {q}
            best = max(best, 1 + explore(nxt, n + 1))
        memo[key] = best
        return best

    return explore(frozenset(), 0)


_SH = 20
_MASK = (1 << _SH) - 1


def _planar_bad_length(bound, budget):
    """The k = 2 search, level by level.

    Every extension step moves a state from level n to level n + 1, so the
    answer is simply the last nonempty level.  A state is the staircase of
    minimal excluded points, sorted by first coordinate, each point packed
    into one integer; mirror-symmetric states are identified.  New states
    come from the staircase's maximal admissible corners only.
    """

    def canon(m):
        mm = tuple(((p & _MASK) << _SH) | (p >> _SH) for p in reversed(m))
        return m if m <= mm else mm

    level = {()}
    n = 0
    while True:
        b = bound(n)
        if b > _MASK:
            raise BudgetExceeded("norm bound exceeds packing range")
        nxt = set()
        for m in level:
            if not m:
                nxt.add(((b << _SH) | b,))
                continue
            x0 = m[0] >> _SH
            if x0:
                nxt.add(canon(((x0 - 1) << _SH | b,) + m))
            for i in range(len(m) - 1):
                p, pn = m[i], m[i + 1]
                y1, x2 = p & _MASK, pn >> _SH
                if x2 and y1:
                    lo = i if (p >> _SH) == x2 - 1 else i + 1
                    hi = i + 2 if (pn & _MASK) == y1 - 1 else i + 1
                    nxt.add(canon(m[:lo] + ((x2 - 1) << _SH | (y1 - 1),)
                                  + m[hi:]))
            ym = m[-1] & _MASK
            if ym:
                nxt.add(canon(m + ((b << _SH) | (ym - 1),)))
        if not nxt:
            return n
        budget[0] -= len(nxt)
        if budget[0] < 0:
            raise BudgetExceeded("max_controlled_bad_length node cap hit")
        level = nxt
        n += 1
