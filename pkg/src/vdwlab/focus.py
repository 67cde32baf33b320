"""Focus structures: how a sparse set talks to translates of a base set.

An element a focuses on b when k-2 further elements of the ambient union
complete {a, b} to a k-AP.  Sliding a base set B around the group produces
one focus edge M(Z, B+x) per shift x, and the family of those edges is the
hypergraph this module builds, prunes (bad shifts), and normalises
(profiles, index-consistent subfamilies, activation under colourings).

Bulk construction works in the offset frame: a progression through elements
of B keeps the same shape relative to every shift x, so each such template
turns into a handful of rotate-and-intersect passes over the membership
mask of Z rather than per-shift recomputation.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .cyclic import ApSpace, GroundSubset
from .ramsey import TwoColouring, has_monochromatic_ap

__all__ = [
    "FocusHypergraph",
    "DegreeStats",
    "PSplit",
    "BadSetReport",
    "RegularityReport",
    "Profile",
    "ConsistentSubfamily",
    "ActivationRecord",
    "focuses_on",
    "focus_edge",
    "build_focus_hypergraph",
    "degree_stats",
    "p_sets",
    "bad_elements",
    "validate_bad_witnesses",
    "is_regular",
    "edge_profile",
    "extract_consistent_subfamily",
    "activated_set",
    "focus_completion_set",
    "ap_degree_profile",
]


def _rot_left(mask: int, x: int, n: int) -> int:
    """Mask of {a + x : a in mask}."""
    x %= n
    if x == 0:
        return mask
    full = (1 << n) - 1
    return ((mask << x) | (mask >> (n - x))) & full


def _rot_right(mask: int, t: int, n: int) -> int:
    """Mask of {x : x + t in mask}."""
    t %= n
    if t == 0:
        return mask
    full = (1 << n) - 1
    return ((mask >> t) | (mask << (n - t))) & full


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# ---------------------------------------------------------------------------
# pointwise focus tests


def focuses_on(
    a: int, b: int, A: GroundSubset, B: GroundSubset, catalog: ApSpace
) -> bool:
    """Does some k-AP through a and b complete inside A union B?"""
    n = catalog.n
    a %= n
    b %= n
    if a not in A:
        raise ValueError(f"{a} is not a member of the first set")
    if b not in B:
        raise ValueError(f"{b} is not a member of the second set")
    if a == b:
        return False
    ambient = A.mask | B.mask
    for e in catalog.completions_of_pair(a, b):
        ok = True
        for t in e:
            if t != a and t != b and not (ambient >> t) & 1:
                ok = False
                break
        if ok:
            return True
    return False


def focus_edge(Z: GroundSubset, base: GroundSubset, catalog: ApSpace) -> GroundSubset:
    """M(Z, base): members of Z focusing on some element of the shifted base."""
    n = catalog.n
    mask = 0
    for z in Z:
        for b in base:
            if z != b and focuses_on(z, b, Z, base, catalog):
                mask |= 1 << z
                break
    return GroundSubset(n, mask)


# ---------------------------------------------------------------------------
# offset-frame templates (progressions through the unshifted base)


_template_cache: dict[tuple[int, int, int], list[tuple[int, ...]]] = {}


def _templates_through_base(catalog: ApSpace, B: GroundSubset) -> list[tuple[int, ...]]:
    """All k-AP sets through at least one element of B, in the offset frame."""
    key = (catalog.n, catalog.k, B.mask)
    got = _template_cache.get(key)
    if got is None:
        seen: set[tuple[int, ...]] = set()
        for b in B:
            seen.update(catalog.aps_through(b))
        got = sorted(seen)
        if len(_template_cache) > 32:
            _template_cache.clear()
        _template_cache[key] = got
    return got


@dataclass(frozen=True)
class FocusHypergraph:
    """Edges M(Z, B+x) indexed by shift x; empty edges kept but flagged."""

    ground: GroundSubset
    base: GroundSubset
    edges: dict[int, frozenset[int]]
    empty_shifts: tuple[int, ...]

    def uniformity(self) -> int | None:
        sizes = {len(e) for e in self.edges.values() if e}
        return sizes.pop() if len(sizes) == 1 else None

    def nonempty_items(self) -> list[tuple[int, frozenset[int]]]:
        return [(x, e) for x, e in sorted(self.edges.items()) if e]


def build_focus_hypergraph(
    Z: GroundSubset, B: GroundSubset, X: GroundSubset | Iterable[int], catalog: ApSpace
) -> FocusHypergraph:
    """Assemble M(Z, B+x) for every x in X via offset templates."""
    n = catalog.n
    if isinstance(X, GroundSubset):
        x_mask = X.mask
    else:
        x_mask = GroundSubset.from_members(n, X).mask
    z_mask = Z.mask
    b_mask = B.mask
    edges: dict[int, set[int]] = {x: set() for x in _iter_bits(x_mask)}
    for f in _templates_through_base(catalog, B):
        outside = [t for t in f if not (b_mask >> t) & 1]
        if not outside:
            continue
        # shifts where every non-base element of the template lands in Z
        common = x_mask
        for t in outside:
            common &= _rot_right(z_mask, t, n)
            if not common:
                break
        if not common:
            continue
        for x in _iter_bits(common):
            bucket = edges[x]
            for w in outside:
                bucket.add((w + x) % n)
    out = {x: frozenset(e) for x, e in edges.items()}
    empty = tuple(sorted(x for x, e in out.items() if not e))
    return FocusHypergraph(ground=Z, base=B, edges=out, empty_shifts=empty)


@dataclass(frozen=True)
class DegreeStats:
    vertex_count: int
    edge_count: int
    max_degree: int
    max_codegree: int
    empty_edges: int


def degree_stats(H: FocusHypergraph) -> DegreeStats:
    """Vertex/edge counts plus max degree and max pair codegree."""
    deg: dict[int, int] = {}
    codeg: dict[tuple[int, int], int] = {}
    for _, e in H.nonempty_items():
        members = sorted(e)
        for i, z in enumerate(members):
            deg[z] = deg.get(z, 0) + 1
            for w in members[i + 1 :]:
                key = (z, w)
                codeg[key] = codeg.get(key, 0) + 1
    return DegreeStats(
        vertex_count=len(H.ground),
        edge_count=sum(1 for _ in H.nonempty_items()),
        max_degree=max(deg.values(), default=0),
        max_codegree=max(codeg.values(), default=0),
        empty_edges=len(H.empty_shifts),
    )


# ---------------------------------------------------------------------------
# completion families P(z, B)


@dataclass(frozen=True)
class PSplit:
    """P(z, B) split by whether the completion touches B."""

    disjoint: tuple[tuple[int, ...], ...]  # P0: completions avoiding B
    touching: tuple[tuple[int, ...], ...]  # P1: completions meeting B

    @property
    def all(self) -> tuple[tuple[int, ...], ...]:
        return tuple(sorted(self.disjoint + self.touching))


def p_sets(z: int, B: GroundSubset, catalog: ApSpace) -> PSplit:
    """Completions P with P + {z, b} a k-AP for some b in B."""
    n = catalog.n
    z %= n
    if z in B:
        raise ValueError(f"{z} lies in the base set; completions are undefined")
    seen: set[tuple[int, ...]] = set()
    for b in B:
        for e in catalog.completions_of_pair(z, b):
            P = tuple(sorted(t for t in e if t != z and t != b))
            if len(P) == catalog.k - 2:
                seen.add(P)
    p0, p1 = [], []
    for P in sorted(seen):
        if any(t in B for t in P):
            p1.append(P)
        else:
            p0.append(P)
    return PSplit(disjoint=tuple(p0), touching=tuple(p1))


# ---------------------------------------------------------------------------
# bad shifts


@dataclass(frozen=True)
class BadWitness:
    condition: str  # "double_contact" or "overlapping_pair"
    progressions: tuple[tuple[int, ...], ...]
    shared: int | None = None


@dataclass(frozen=True)
class BadSetReport:
    bad: GroundSubset
    witnesses: dict[int, BadWitness]
    double_contact: int
    overlapping_pair: int


def bad_elements(A: GroundSubset, B: GroundSubset, catalog: ApSpace) -> BadSetReport:
    """Shifts x whose focus structure towards B+x degenerates.

    A shift is bad when (a) some progression meets B+x twice and finishes
    inside A, or (b) two distinct progressions, each meeting B+x exactly
    once and finishing inside A, overlap outside B+x.  Removing bad shifts
    is what makes every element of A focus on at most one element of B+x.
    The pair condition asks for two distinct progressions; a progression
    paired with itself would outlaw essentially every shift.
    """
    n = catalog.n
    a_mask = A.mask
    b_mask = B.mask
    full = (1 << n) - 1
    templates = _templates_through_base(catalog, B)

    witnesses: dict[int, BadWitness] = {}
    bad_mask = 0
    n_double = 0

    # (a) templates with two base contacts and a nonempty tail inside A
    for f in templates:
        outside = [t for t in f if not (b_mask >> t) & 1]
        if not outside or len(f) - len(outside) < 2:
            continue
        common = full
        for t in outside:
            common &= _rot_right(a_mask, t, n)
            if not common:
                break
        for x in _iter_bits(common):
            if x not in witnesses:
                shifted = tuple(sorted((t + x) % n for t in f))
                witnesses[x] = BadWitness("double_contact", (shifted,))
                n_double += 1
            bad_mask |= 1 << x

    # (b) pairs of single-contact templates overlapping outside the base
    active_by_shift: dict[int, list[int]] = {}
    singles: list[tuple[int, ...]] = []
    outside_sets: list[frozenset[int]] = []
    for f in templates:
        outside = [t for t in f if not (b_mask >> t) & 1]
        if len(f) - len(outside) != 1:
            continue
        common = full
        for t in outside:
            common &= _rot_right(a_mask, t, n)
            if not common:
                break
        if not common:
            continue
        idx = len(singles)
        singles.append(f)
        outside_sets.append(frozenset(outside))
        for x in _iter_bits(common):
            active_by_shift.setdefault(x, []).append(idx)

    n_pair = 0
    for x, idxs in active_by_shift.items():
        if (bad_mask >> x) & 1:
            continue
        found = None
        for i in range(len(idxs)):
            oi = outside_sets[idxs[i]]
            for j in range(i + 1, len(idxs)):
                shared = oi & outside_sets[idxs[j]]
                if shared:
                    found = (idxs[i], idxs[j], min(shared))
                    break
            if found:
                break
        if found:
            fi, fj, w = found
            pair = (
                tuple(sorted((t + x) % n for t in singles[fi])),
                tuple(sorted((t + x) % n for t in singles[fj])),
            )
            witnesses[x] = BadWitness("overlapping_pair", pair, shared=(w + x) % n)
            n_pair += 1
            bad_mask |= 1 << x

    return BadSetReport(
        bad=GroundSubset(n, bad_mask),
        witnesses=witnesses,
        double_contact=n_double,
        overlapping_pair=n_pair,
    )


def validate_bad_witnesses(
    report: BadSetReport, A: GroundSubset, B: GroundSubset, catalog: ApSpace
) -> bool:
    """Replay every recorded witness against the definitions from scratch."""
    for x, wit in report.witnesses.items():
        base = B.translate(x)
        for e in wit.progressions:
            if not catalog.is_edge(e):
                return False
            tail = [t for t in e if t not in base]
            if not tail or any(t not in A for t in tail):
                return False
        if wit.condition == "double_contact":
            e = wit.progressions[0]
            if sum(1 for t in e if t in base) < 2:
                return False
        else:
            e1, e2 = wit.progressions
            if e1 == e2:
                return False
            if sum(1 for t in e1 if t in base) != 1:
                return False
            if sum(1 for t in e2 if t in base) != 1:
                return False
            w = wit.shared
            if w is None or w in base:
                return False
            if w not in e1 or w not in e2:
                return False
    return True


# ---------------------------------------------------------------------------
# regularity, profiles, consistency


@dataclass(frozen=True)
class RegularityReport:
    regular: bool
    violation: tuple[int, int, tuple[int, ...]] | None = None  # (x, z, targets)


def _focus_targets(
    z: int, Z: GroundSubset, base: GroundSubset, catalog: ApSpace
) -> list[int]:
    return [
        b for b in base if b != z and focuses_on(z, b, Z, base, catalog)
    ]


def is_regular(
    Z: GroundSubset, B: GroundSubset, X: GroundSubset | Iterable[int], catalog: ApSpace
) -> RegularityReport:
    """Every member of Z may focus on at most one element of each B+x."""
    shifts = X.members() if isinstance(X, GroundSubset) else sorted(X)
    for x in shifts:
        base = B.translate(x)
        for z in Z:
            targets = _focus_targets(z, Z, base, catalog)
            if len(targets) > 1:
                return RegularityReport(False, (x, z, tuple(targets)))
    return RegularityReport(True)


@dataclass(frozen=True)
class Profile:
    """Focus pattern of an edge: position i focuses on base element index targets[i]."""

    length: int
    targets: tuple[int, ...]


def _rank_map(n: int, ordering: Sequence[int] | None) -> dict[int, int]:
    if ordering is None:
        return {v: v for v in range(n)}
    order = list(ordering)
    if sorted(order) != list(range(n)):
        raise ValueError("ordering must be a permutation of the residues")
    return {v: i for i, v in enumerate(order)}


def edge_profile(
    Z: GroundSubset,
    B: GroundSubset,
    x: int,
    catalog: ApSpace,
    ordering: Sequence[int] | None = None,
) -> Profile:
    """Profile of M(Z, B+x) under the given total order on residues."""
    base = B.translate(x)
    edge = focus_edge(Z, base, catalog)
    if len(edge) == 0:
        raise ValueError(f"shift {x} has an empty focus edge; no profile exists")
    rank = _rank_map(catalog.n, ordering)
    members = sorted(edge, key=lambda z: rank[z])
    b_sorted = B.members()
    targets = []
    for z in members:
        hits = _focus_targets(z, Z, base, catalog)
        if len(hits) != 1:
            raise ValueError(
                f"shift {x} is not regular at {z}: focus targets {hits}"
            )
        b = (hits[0] - x) % catalog.n
        targets.append(b_sorted.index(b))
    return Profile(length=len(members), targets=tuple(targets))


@dataclass(frozen=True)
class ConsistentSubfamily:
    shifts: GroundSubset
    profile: Profile | None
    report: dict


def extract_consistent_subfamily(
    Z: GroundSubset,
    B: GroundSubset,
    X: GroundSubset,
    catalog: ApSpace,
    ordering: Sequence[int] | None = None,
    retries: int = 200,
    seed: int = 0,
    c: float | None = None,
) -> ConsistentSubfamily:
    """Largest common-profile, index-consistent family of focus edges.

    Shifts are first grouped by (edge size, profile) and the largest class
    kept.  Index consistency is then enforced by sampling random partitions
    of Z into edge-size many classes and keeping the shifts whose i-th edge
    element falls in class i; the best of `retries` rounds wins.  A single
    random round keeps an edge with probability about size^-size, which is
    what the retry count is budgeted against.
    """
    n = catalog.n
    rank = _rank_map(n, ordering)
    profiles: dict[tuple[int, tuple[int, ...]], list[tuple[int, list[int]]]] = {}
    empty = 0
    irregular = 0
    for x in X:
        base = B.translate(x)
        edge = focus_edge(Z, base, catalog)
        if len(edge) == 0:
            empty += 1
            continue
        try:
            prof = edge_profile(Z, B, x, catalog, ordering)
        except ValueError:
            irregular += 1
            continue
        members = sorted(edge, key=lambda z: rank[z])
        profiles.setdefault((prof.length, prof.targets), []).append((x, members))

    report: dict = {
        "empty_edges": empty,
        "irregular_skipped": irregular,
        "profile_classes": len(profiles),
        "alpha": len(X) / n,
    }
    if c is not None and len(X) > 0:
        k = catalog.k
        alpha = len(X) / n
        L = 20.0 * (c ** (k - 1)) * k * k / alpha
        K = max(1, len(B))
        log_alpha_prime = math.log(alpha) - math.log(2.0) - L * math.log(L * K)
        report["L"] = L
        report["log_alpha_prime"] = log_alpha_prime
        report["alpha_prime"] = math.exp(log_alpha_prime) if log_alpha_prime > -700 else 0.0

    if not profiles:
        return ConsistentSubfamily(GroundSubset.empty(n), None, report)

    key = max(profiles, key=lambda kk: (len(profiles[kk]), kk))
    group = profiles[key]
    length, targets = key
    profile = Profile(length=length, targets=targets)
    report["group_size"] = len(group)
    report["profile_length"] = length
    # the focus machinery expects edges of at least two vertices; short ones
    # are legal here but worth surfacing
    report["length_at_least_2"] = length >= 2

    members_z = Z.members()
    if length == 1 or len(group) == 1:
        # singleton edges or a singleton class are consistent as they stand
        mask = 0
        for x, _ in group:
            mask |= 1 << x
        report["partition_rounds"] = 0
        return ConsistentSubfamily(GroundSubset(n, mask), profile, report)

    rng = random.Random(seed)
    best: list[int] = []
    for _ in range(retries):
        cls = {z: rng.randrange(length) for z in members_z}
        kept = [
            x
            for x, ms in group
            if all(cls[z] == i for i, z in enumerate(ms))
        ]
        if len(kept) > len(best):
            best = kept
    report["partition_rounds"] = retries
    report["kept"] = len(best)
    mask = 0
    for x in best:
        mask |= 1 << x
    return ConsistentSubfamily(GroundSubset(n, mask), profile if best else None, report)


# ---------------------------------------------------------------------------
# activation


@dataclass(frozen=True)
class ActivationRecord:
    activated: GroundSubset
    # z -> (shift x, base element focused on, 0-based index of z in M(Z,B+x))
    evidence: dict[int, tuple[int, int, int]]


def activated_set(
    Z: GroundSubset,
    B: GroundSubset,
    X: GroundSubset | Iterable[int],
    sigma: TwoColouring,
    phi: TwoColouring,
    catalog: ApSpace,
) -> ActivationRecord:
    """Members of Z whose colour matches a focus target's base colour.

    sigma colours B, phi colours Z, and each must be progression-free on its
    own domain.  The base colouring rides along with every shift: b + x
    inherits sigma(b).  When (Z, B+x) interacts, the combined colouring has
    a monochromatic progression straddling both sides, which is exactly what
    forces an activated element into every focus edge.
    """
    if sigma.domain != B:
        raise ValueError("sigma must colour the base set B")
    if phi.domain != Z:
        raise ValueError("phi must colour the ground set Z")
    if has_monochromatic_ap(sigma, catalog) is not None:
        raise ValueError("sigma has a monochromatic progression on B")
    if has_monochromatic_ap(phi, catalog) is not None:
        raise ValueError("phi has a monochromatic progression on Z")
    n = catalog.n
    shifts = X.members() if isinstance(X, GroundSubset) else sorted(X)
    mask = 0
    evidence: dict[int, tuple[int, int, int]] = {}
    for x in shifts:
        base = B.translate(x)
        edge = focus_edge(Z, base, catalog).members()
        for i, z in enumerate(edge):
            if z in evidence:
                continue
            for b in _focus_targets(z, Z, base, catalog):
                if phi.colour_of(z) == sigma.colour_of((b - x) % n):
                    mask |= 1 << z
                    evidence[z] = (x, b, i)
                    break
    return ActivationRecord(GroundSubset(n, mask), evidence)


# ---------------------------------------------------------------------------
# completion sets F(S)


def focus_completion_set(S: GroundSubset, catalog: ApSpace) -> GroundSubset:
    """F(S): residues completing k-1 elements of S to a full progression."""
    return GroundSubset.from_members(catalog.n, ap_degree_profile(S, catalog).keys())


def ap_degree_profile(S: GroundSubset, catalog: ApSpace) -> dict[int, int]:
    """For each residue z, the number of (k-1)-subsets of S completing with z."""
    members = S.members()
    k = catalog.k
    counts: dict[int, set[tuple[int, ...]]] = {}
    m = len(members)
    for i in range(m):
        for j in range(i + 1, m):
            for e in catalog.completions_of_pair(members[i], members[j]):
                inside = [t for t in e if t in S]
                if len(inside) < k - 1:
                    continue
                for z in e:
                    rest = tuple(sorted(t for t in e if t != z))
                    if all(t in S for t in rest):
                        counts.setdefault(z, set()).add(rest)
    return {z: len(qs) for z, qs in sorted(counts.items())}
