"""Ground sets and arithmetic-progression catalogues over Z/nZ.

Everything downstream lives inside the cyclic group Z/nZ.  Subsets are
stored as n-bit integer masks (bit a set iff residue a is a member), which
makes translation a rotate and set algebra plain integer arithmetic.  A
k-term arithmetic progression (k-AP) is a set of k pairwise-distinct
residues {a, a+d, ..., a+(k-1)d}; progressions that revisit a residue are
not progressions here at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Iterator

import numpy as np

__all__ = [
    "GroundSubset",
    "ArithmeticProgression",
    "ApSpace",
    "ApCatalog",
    "enumerate_aps",
    "aps_within",
    "translate",
]


def _check_modulus(n: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"modulus must be a positive integer, got {n!r}")


class GroundSubset:
    """Immutable subset of Z/nZ backed by an n-bit mask."""

    __slots__ = ("n", "mask")

    def __init__(self, n: int, mask: int = 0):
        _check_modulus(n)
        if mask < 0 or mask >> n:
            raise ValueError(f"mask has bits outside Z/{n}Z")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "mask", mask)

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("GroundSubset is immutable")

    @classmethod
    def from_members(cls, n: int, members: Iterable[int]) -> "GroundSubset":
        _check_modulus(n)
        mask = 0
        for a in members:
            mask |= 1 << (a % n)
        return cls(n, mask)

    @classmethod
    def empty(cls, n: int) -> "GroundSubset":
        return cls(n, 0)

    @classmethod
    def full(cls, n: int) -> "GroundSubset":
        return cls(n, (1 << n) - 1)

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, a: int) -> bool:
        return bool((self.mask >> (a % self.n)) & 1)

    def __iter__(self) -> Iterator[int]:
        mask = self.mask
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def members(self) -> list[int]:
        return list(self)

    def translate(self, x: int) -> "GroundSubset":
        """The shifted set {a + x : a in self}, wrapping around mod n."""
        n = self.n
        x %= n
        if x == 0:
            return self
        full = (1 << n) - 1
        mask = ((self.mask << x) | (self.mask >> (n - x))) & full
        return GroundSubset(n, mask)

    def complement(self) -> "GroundSubset":
        return GroundSubset(self.n, ~self.mask & ((1 << self.n) - 1))

    def _coerce(self, other: "GroundSubset") -> int:
        if not isinstance(other, GroundSubset) or other.n != self.n:
            raise ValueError("set algebra requires matching moduli")
        return other.mask

    def __or__(self, other: "GroundSubset") -> "GroundSubset":
        return GroundSubset(self.n, self.mask | self._coerce(other))

    def __and__(self, other: "GroundSubset") -> "GroundSubset":
        return GroundSubset(self.n, self.mask & self._coerce(other))

    def __sub__(self, other: "GroundSubset") -> "GroundSubset":
        return GroundSubset(self.n, self.mask & ~self._coerce(other))

    def isdisjoint(self, other: "GroundSubset") -> bool:
        return not (self.mask & self._coerce(other))

    def issubset(self, other: "GroundSubset") -> bool:
        return not (self.mask & ~self._coerce(other))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroundSubset)
            and self.n == other.n
            and self.mask == other.mask
        )

    def __hash__(self) -> int:
        return hash((self.n, self.mask))

    def __repr__(self) -> str:
        return f"GroundSubset(n={self.n}, members={self.members()})"


def translate(subset: GroundSubset, x: int) -> GroundSubset:
    return subset.translate(x)


@dataclass(frozen=True)
class ArithmeticProgression:
    """A k-AP in Z/nZ in canonical form.

    The same k-element set can be written as (start, diff) in several ways
    (reversal always works, and small moduli admit more).  The canonical
    representative is the lexicographically smallest (start, diff) pair.
    """

    n: int
    start: int
    diff: int
    length: int

    @property
    def elements(self) -> tuple[int, ...]:
        n = self.n
        return tuple((self.start + i * self.diff) % n for i in range(self.length))

    def as_set(self) -> tuple[int, ...]:
        return tuple(sorted(self.elements))

    @classmethod
    def from_pair(cls, n: int, start: int, diff: int, length: int) -> "ArithmeticProgression":
        _check_modulus(n)
        if length < 3:
            raise ValueError("progressions of interest have length >= 3")
        start %= n
        diff %= n
        elems = [(start + i * diff) % n for i in range(length)]
        if len(set(elems)) != length:
            raise ValueError(
                f"(start={start}, diff={diff}) revisits a residue mod {n}"
            )
        best = min(_representations(n, elems))
        return cls(n=n, start=best[0], diff=best[1], length=length)


def _representations(n: int, elems: list[int]) -> list[tuple[int, int]]:
    """All (start, diff) pairs generating the same residue set."""
    target = frozenset(elems)
    k = len(elems)
    reps = []
    for a in target:
        for b in target:
            if a == b:
                continue
            d = (b - a) % n
            seq = [(a + i * d) % n for i in range(k)]
            if frozenset(seq) == target and len(set(seq)) == k:
                reps.append((a, d))
    return reps


class ApSpace:
    """Progression queries over Z/nZ that never materialise the catalogue.

    Campaign-scale code (n in the thousands) cannot hold the full edge list,
    but everything it needs reduces to local queries: progressions through a
    residue, through a pair, or inside a sparse subset.
    """

    def __init__(self, n: int, k: int):
        _check_modulus(n)
        if not isinstance(k, int) or k < 3:
            raise ValueError(f"progression length k must be an integer >= 3, got {k!r}")
        self.n = n
        self.k = k

    # -- local queries ---------------------------------------------------

    def completions_of_pair(self, u: int, v: int) -> list[tuple[int, ...]]:
        """All k-AP sets containing both u and v (as sorted tuples)."""
        n, k = self.n, self.k
        u %= n
        v %= n
        if u == v:
            raise ValueError("pair completion needs two distinct residues")
        found = set()
        for i in range(k):
            for j in range(k):
                if i == j:
                    continue
                for d in _solve_diff(n, j - i, v - u):
                    a = (u - i * d) % n
                    elems = [(a + t * d) % n for t in range(k)]
                    if len(set(elems)) == k:
                        found.add(tuple(sorted(elems)))
        return sorted(found)

    def aps_through(self, v: int) -> list[tuple[int, ...]]:
        """All k-AP sets containing residue v."""
        n, k = self.n, self.k
        v %= n
        found = set()
        for i in range(k):
            for d in range(1, n):
                a = (v - i * d) % n
                elems = [(a + t * d) % n for t in range(k)]
                if len(set(elems)) == k:
                    found.add(tuple(sorted(elems)))
        return sorted(found)

    def is_edge(self, elements: Iterable[int]) -> bool:
        n, k = self.n, self.k
        elems = sorted({a % n for a in elements})
        if len(elems) != k:
            return False
        target = frozenset(elems)
        for a in elems:
            for b in elems:
                if a == b:
                    continue
                d = (b - a) % n
                seq = [(a + i * d) % n for i in range(k)]
                if len(set(seq)) == k and frozenset(seq) == target:
                    return True
        return False

    def aps_within(self, subset: "GroundSubset | Iterable[int]") -> list[tuple[int, ...]]:
        """All k-AP sets fully inside the given subset, sorted."""
        n, k = self.n, self.k
        if isinstance(subset, GroundSubset):
            if subset.n != n:
                raise ValueError("subset modulus does not match catalogue")
            members = subset.members()
        else:
            members = sorted({a % n for a in subset})
        if len(members) < k:
            return []
        if k == 3:
            return self._aps_within_k3(members)
        member_set = set(members)
        found = set()
        for a in members:
            for b in members:
                if a == b:
                    continue
                d = (b - a) % n
                elems = [a, b]
                cur = b
                ok = True
                for _ in range(k - 2):
                    cur = (cur + d) % n
                    if cur not in member_set:
                        ok = False
                        break
                    elems.append(cur)
                if ok and len(set(elems)) == k:
                    found.add(tuple(sorted(elems)))
        return sorted(found)

    def _aps_within_k3(self, members: list[int]) -> list[tuple[int, ...]]:
        n = self.n
        m = len(members)
        arr = np.asarray(members, dtype=np.int64)
        in_set = np.zeros(n, dtype=bool)
        in_set[arr] = True
        # third element of the progression (u, v, 2v-u) for all ordered pairs
        third = (2 * arr[None, :] - arr[:, None]) % n
        hit = in_set[third]
        np.fill_diagonal(hit, False)
        ii, jj = np.nonzero(hit)
        found = set()
        for idx in range(len(ii)):
            u = int(arr[ii[idx]])
            v = int(arr[jj[idx]])
            w = int(third[ii[idx], jj[idx]])
            if w == u or w == v:
                continue
            found.add(tuple(sorted((u, v, w))))
        return sorted(found)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, k={self.k})"


def _solve_diff(n: int, step: int, delta: int) -> list[int]:
    """Solutions d of step*d = delta (mod n), excluding d = 0 progressions."""
    step %= n
    delta %= n
    g = gcd(step, n)
    if delta % g:
        return []
    n_red = n // g
    inv = pow(step // g, -1, n_red)
    d0 = (delta // g) * inv % n_red
    return [d0 + t * n_red for t in range(g) if (d0 + t * n_red) % n != 0]


class ApCatalog(ApSpace):
    """Materialised catalogue of every k-AP in Z/nZ.

    edges are deduplicated k-element sets stored as sorted tuples in
    lexicographic order; the incidence index maps each residue to the edge
    indices through it.  Materialisation is quadratic in n, so there is a
    guard; use ApSpace for campaign-scale moduli.
    """

    MATERIALISE_LIMIT = 2000

    def __init__(self, n: int, k: int, _limit: int | None = None):
        super().__init__(n, k)
        limit = self.MATERIALISE_LIMIT if _limit is None else _limit
        if n > limit:
            raise ValueError(
                f"refusing to materialise the catalogue for n={n} (limit {limit}); "
                "use ApSpace for sparse queries at this scale"
            )
        edges = set()
        for d in range(1, n):
            for a in range(n):
                elems = [(a + i * d) % n for i in range(k)]
                if len(set(elems)) == k:
                    edges.add(tuple(sorted(elems)))
        self.edges: list[tuple[int, ...]] = sorted(edges)
        self.edge_index: dict[tuple[int, ...], int] = {
            e: i for i, e in enumerate(self.edges)
        }
        self.incidence: list[list[int]] = [[] for _ in range(n)]
        for i, e in enumerate(self.edges):
            for v in e:
                self.incidence[v].append(i)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def is_edge(self, elements: Iterable[int]) -> bool:
        key = tuple(sorted({a % self.n for a in elements}))
        return key in self.edge_index

    def edges_through(self, v: int) -> list[tuple[int, ...]]:
        return [self.edges[i] for i in self.incidence[v % self.n]]


def enumerate_aps(n: int, k: int) -> ApCatalog:
    """Build the full k-AP catalogue for Z/nZ (guarded for small n)."""
    return ApCatalog(n, k)


def aps_within(catalog: ApSpace, subset: GroundSubset | Iterable[int]) -> list[tuple[int, ...]]:
    """Edges of the catalogue induced inside a subset, as sorted tuples."""
    return catalog.aps_within(subset)
