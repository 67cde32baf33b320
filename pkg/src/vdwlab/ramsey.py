"""Deciding the partition property A -> (k-AP)_2 inside Z/nZ.

A finite set A arrows k-APs when every red/blue colouring of A contains a
monochromatic k-term progression.  The decider searches for a progression-free
colouring with unit propagation (an edge with k-1 vertices of one colour and
one uncoloured vertex forces the opposite colour) and backtracking, branching
on the vertex covering the most still-monochromatisable edges.  A separate
exhaustive scan over all 2^|A| colourings serves as the oracle.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field

from .cyclic import ApSpace, GroundSubset

__all__ = [
    "TwoColouring",
    "SearchStats",
    "EnumerationResult",
    "InteractionCheck",
    "find_ap_free_colouring",
    "is_ramsey",
    "brute_force_is_ramsey",
    "enumerate_ap_free_colourings",
    "has_monochromatic_ap",
    "is_interacting_pair",
    "interacting_translates",
    "search_interacting_triple",
]

RED, BLUE = 0, 1

BRUTE_FORCE_LIMIT = 30
ENUMERATION_CAP = 10**6


class TwoColouring:
    """A red/blue colouring of a subset of Z/nZ (bit set = blue)."""

    __slots__ = ("domain", "blue")

    def __init__(self, domain: GroundSubset, blue: GroundSubset):
        if blue.n != domain.n or not blue.issubset(domain):
            raise ValueError("blue class must be a subset of the domain")
        self.domain = domain
        self.blue = blue

    @property
    def red(self) -> GroundSubset:
        return self.domain - self.blue

    def colour_of(self, a: int) -> int:
        if a not in self.domain:
            raise KeyError(f"{a} is not in the colouring domain")
        return BLUE if a in self.blue else RED

    def swapped(self) -> "TwoColouring":
        return TwoColouring(self.domain, self.domain - self.blue)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TwoColouring)
            and self.domain == other.domain
            and self.blue == other.blue
        )

    def __hash__(self) -> int:
        return hash((self.domain, self.blue))

    def __repr__(self) -> str:
        return f"TwoColouring(red={self.red.members()}, blue={self.blue.members()})"


@dataclass
class SearchStats:
    nodes: int = 0
    propagations: int = 0
    conflicts: int = 0
    seconds: float = 0.0

    def merge(self, other: "SearchStats") -> None:
        self.nodes += other.nodes
        self.propagations += other.propagations
        self.conflicts += other.conflicts
        self.seconds += other.seconds


@dataclass
class EnumerationResult:
    colourings: list[TwoColouring]
    truncated: bool
    stats: SearchStats = field(default_factory=SearchStats)


def has_monochromatic_ap(colouring: TwoColouring, catalog: ApSpace) -> tuple[int, ...] | None:
    """Independent witness scan; returns a monochromatic edge or None."""
    domain = colouring.domain
    blue = colouring.blue.mask
    for edge in catalog.aps_within(domain):
        mask = 0
        for v in edge:
            mask |= 1 << v
        hit = mask & blue
        if hit == 0 or hit == mask:
            return edge
    return None


class _Solver:
    """Propagation-driven backtracking over the edges induced in A."""

    def __init__(self, vertices: list[int], edges: list[tuple[int, ...]]):
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * len(vertices) + 10000))
        self.vertices = vertices
        index = {v: i for i, v in enumerate(vertices)}
        self.m = len(vertices)
        self.edge_verts: list[tuple[int, ...]] = [
            tuple(index[v] for v in e) for e in edges
        ]
        self.sizes = [len(e) for e in self.edge_verts]
        self.vertex_edges: list[list[int]] = [[] for _ in range(self.m)]
        for ei, ev in enumerate(self.edge_verts):
            for u in ev:
                self.vertex_edges[u].append(ei)
        self.colour = [-1] * self.m
        self.cnt = [[0, 0] for _ in self.edge_verts]
        self.alive = [True] * len(self.edge_verts)
        self.alive_deg = [len(es) for es in self.vertex_edges]
        self.trail: list[int] = []
        self.dead_trail: list[int] = []
        self.queue: list[tuple[int, int]] = []
        self.stats = SearchStats()

    # -- incremental state -----------------------------------------------

    def _assign(self, u: int, c: int) -> bool:
        self.colour[u] = c
        self.trail.append(u)
        for ei in self.vertex_edges[u]:
            cnt = self.cnt[ei]
            cnt[c] += 1
            if not self.alive[ei]:
                continue
            if cnt[1 - c]:
                self.alive[ei] = False
                self.dead_trail.append(ei)
                for w in self.edge_verts[ei]:
                    if self.colour[w] < 0:
                        self.alive_deg[w] -= 1
            elif cnt[c] == self.sizes[ei]:
                self.stats.conflicts += 1
                return False
            elif cnt[c] == self.sizes[ei] - 1:
                for w in self.edge_verts[ei]:
                    if self.colour[w] < 0:
                        self.queue.append((w, 1 - c))
                        break
        return True

    def _propagate(self) -> bool:
        while self.queue:
            u, c = self.queue.pop()
            if self.colour[u] >= 0:
                continue
            self.stats.propagations += 1
            if not self._assign(u, c):
                return False
        return True

    def _undo(self, mark: int, dead_mark: int) -> None:
        while len(self.trail) > mark:
            u = self.trail.pop()
            c = self.colour[u]
            self.colour[u] = -1
            deg = 0
            for ei in self.vertex_edges[u]:
                self.cnt[ei][c] -= 1
                if self.alive[ei]:
                    deg += 1
            self.alive_deg[u] = deg
        while len(self.dead_trail) > dead_mark:
            ei = self.dead_trail.pop()
            self.alive[ei] = True
            for w in self.edge_verts[ei]:
                if self.colour[w] < 0:
                    self.alive_deg[w] += 1
        self.queue.clear()

    def _pick(self) -> int:
        best, best_deg = -1, -1
        colour = self.colour
        deg = self.alive_deg
        for u in range(self.m):
            if colour[u] < 0 and deg[u] > best_deg:
                best, best_deg = u, deg[u]
        return best

    # -- existence ---------------------------------------------------------

    def find(self, symmetry_break: bool = True) -> list[int] | None:
        start = time.perf_counter()
        try:
            if symmetry_break and self.m:
                self.stats.nodes += 1
                if not (self._assign(0, RED) and self._propagate()):
                    return None
            return self._find_rec()
        finally:
            self.stats.seconds += time.perf_counter() - start

    def _find_rec(self) -> list[int] | None:
        u = self._pick()
        if u < 0:
            return list(self.colour)
        if self.alive_deg[u] == 0:
            # no remaining edge can still go monochromatic; fill freely
            filled = [w for w in range(self.m) if self.colour[w] < 0]
            out = list(self.colour)
            for w in filled:
                out[w] = RED
            return out
        for c in (RED, BLUE):
            self.stats.nodes += 1
            mark, dead_mark = len(self.trail), len(self.dead_trail)
            if self._assign(u, c) and self._propagate():
                got = self._find_rec()
                if got is not None:
                    return got
            self._undo(mark, dead_mark)
        return None

    # -- enumeration -------------------------------------------------------

    def enumerate(self, cap: int) -> tuple[list[list[int]], bool]:
        start = time.perf_counter()
        found: list[list[int]] = []
        truncated = self._enum_rec(found, cap)
        self.stats.seconds += time.perf_counter() - start
        return found, truncated

    def _enum_rec(self, found: list[list[int]], cap: int) -> bool:
        u = self._pick()
        if u < 0:
            if len(found) >= cap:
                return True
            found.append(list(self.colour))
            return False
        for c in (RED, BLUE):
            self.stats.nodes += 1
            mark, dead_mark = len(self.trail), len(self.dead_trail)
            if self._assign(u, c) and self._propagate():
                if self._enum_rec(found, cap):
                    self._undo(mark, dead_mark)
                    return True
            self._undo(mark, dead_mark)
        return False


def _components(vertices: list[int], edges: list[tuple[int, ...]]) -> list[tuple[list[int], list[tuple[int, ...]]]]:
    """Split (vertices, edges) into edge-connected components."""
    parent = {v: v for v in vertices}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in edges:
        r = find(e[0])
        for v in e[1:]:
            rv = find(v)
            if rv != r:
                parent[rv] = r
    groups: dict[int, list[int]] = {}
    for v in vertices:
        groups.setdefault(find(v), []).append(v)
    edge_groups: dict[int, list[tuple[int, ...]]] = {r: [] for r in groups}
    for e in edges:
        edge_groups[find(e[0])].append(e)
    return [(sorted(groups[r]), edge_groups[r]) for r in sorted(groups)]


def find_ap_free_colouring(
    A: GroundSubset, catalog: ApSpace
) -> tuple[TwoColouring | None, SearchStats]:
    """Search for a progression-free colouring of A; None means A arrows."""
    vertices = A.members()
    edges = catalog.aps_within(A)
    stats = SearchStats()
    blue_mask = 0
    for comp_vertices, comp_edges in _components(vertices, edges):
        if not comp_edges:
            continue  # edgeless component: leave it red
        solver = _Solver(comp_vertices, comp_edges)
        got = solver.find(symmetry_break=True)
        stats.merge(solver.stats)
        if got is None:
            return None, stats
        for i, v in enumerate(comp_vertices):
            if got[i] == BLUE:
                blue_mask |= 1 << v
    return TwoColouring(A, GroundSubset(A.n, blue_mask)), stats


def is_ramsey(A: GroundSubset, catalog: ApSpace) -> tuple[bool, TwoColouring | None, SearchStats]:
    """Decide A -> (k-AP)_2.  Returns (verdict, counterexample colouring, stats)."""
    witness, stats = find_ap_free_colouring(A, catalog)
    return witness is None, witness, stats


def brute_force_is_ramsey(A: GroundSubset, catalog: ApSpace) -> bool:
    """Oracle: scan all colourings (first element pinned red by swap symmetry)."""
    m = len(A)
    if m > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force is guarded at |A| <= {BRUTE_FORCE_LIMIT}, got {m}")
    if m == 0:
        return False
    vertices = A.members()
    index = {v: i for i, v in enumerate(vertices)}
    edge_masks = []
    for e in catalog.aps_within(A):
        em = 0
        for v in e:
            em |= 1 << index[v]
        edge_masks.append(em)
    if not edge_masks:
        return False
    for bits in range(1 << (m - 1)):
        mask = bits << 1  # vertex 0 stays red
        for em in edge_masks:
            hit = mask & em
            if hit == 0 or hit == em:
                break
        else:
            return False
    return True


def enumerate_ap_free_colourings(
    A: GroundSubset, catalog: ApSpace, cap: int = ENUMERATION_CAP
) -> EnumerationResult:
    """All progression-free colourings of A, truncated at cap.

    No symmetry breaking: a colouring and its red/blue swap are both listed.
    The empty set has exactly one (empty) colouring.
    """
    vertices = A.members()
    edges = catalog.aps_within(A)
    solver = _Solver(vertices, edges)
    raw, truncated = solver.enumerate(cap)
    out = []
    for assignment in raw:
        blue_mask = 0
        for i, v in enumerate(vertices):
            if assignment[i] == BLUE:
                blue_mask |= 1 << v
        out.append(TwoColouring(A, GroundSubset(A.n, blue_mask)))
    return EnumerationResult(out, truncated, solver.stats)


@dataclass
class InteractionCheck:
    interacting: bool
    z_is_ramsey: bool
    b_is_ramsey: bool
    union_is_ramsey: bool


def is_interacting_pair(Z: GroundSubset, B: GroundSubset, catalog: ApSpace) -> InteractionCheck:
    """(Z, B) interacts when neither part arrows but their union does."""
    if Z.n != B.n:
        raise ValueError("Z and B must live in the same cyclic group")
    z_arrow, _, _ = is_ramsey(Z, catalog)
    b_arrow, _, _ = is_ramsey(B, catalog)
    if z_arrow or b_arrow:
        return InteractionCheck(False, z_arrow, b_arrow, False)
    union_arrow, _, _ = is_ramsey(Z | B, catalog)
    return InteractionCheck(union_arrow, z_arrow, b_arrow, union_arrow)


def interacting_translates(Z: GroundSubset, B: GroundSubset, catalog: ApSpace) -> GroundSubset:
    """All shifts x with Z and B+x interacting.  Requires Z and B non-arrowing."""
    n = Z.n
    z_arrow, _, _ = is_ramsey(Z, catalog)
    if z_arrow:
        raise ValueError("Z already arrows; interaction via translates is undefined")
    b_arrow, _, _ = is_ramsey(B, catalog)
    if b_arrow:
        raise ValueError("B already arrows; interaction via translates is undefined")
    mask = 0
    for x in range(n):
        union = Z | B.translate(x)
        arrow, _, _ = is_ramsey(union, catalog)
        if arrow:
            mask |= 1 << x
    return GroundSubset(n, mask)


def search_interacting_triple(
    catalog: ApSpace,
    B: GroundSubset,
    seed: int,
) -> tuple[GroundSubset, GroundSubset, GroundSubset] | None:
    """Hunt for an interacting triple (Z, B, X) by eroding the full group.

    Starting from Z = Z/nZ (which arrows for a usable catalogue), delete
    residues in a seeded random order until the remainder no longer arrows.
    The deleted elements are then natural candidates for translates x with
    Z union (B+x) arrowing.  Returns None when the hunt comes up empty.
    """
    import random

    n = catalog.n
    rng = random.Random(seed)
    b_arrow, _, _ = is_ramsey(B, catalog)
    if b_arrow:
        return None
    Z = GroundSubset.full(n)
    arrow, _, _ = is_ramsey(Z, catalog)
    if not arrow:
        return None
    order = list(range(n))
    rng.shuffle(order)
    for v in order:
        candidate = Z - GroundSubset.from_members(n, [v])
        arrow, _, _ = is_ramsey(candidate, catalog)
        Z = candidate
        if not arrow:
            break
    else:
        return None
    X = interacting_translates(Z, B, catalog)
    if len(X) == 0:
        return None
    return Z, B, X
