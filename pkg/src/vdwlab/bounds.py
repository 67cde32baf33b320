"""Counters and analytic evaluators for the quantitative side of the proofs.

Covers the forbidden sparse configurations (a loose cycle with a crossing
progression, and a non-induced loose path), exact first moments for loose
cycles and paths, the Janson tail bound in the squared-mean form, the
matching-decomposition edge bound, and the progression-count floor for
dense subsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

from .cyclic import ApSpace, GroundSubset
from .sampling import RandomSeed

__all__ = [
    "ConfigCount",
    "JansonReport",
    "MatchingBoundReport",
    "ApFloorReport",
    "count_t1_t2",
    "validate_config_witness",
    "count_loose_cycles",
    "count_loose_paths",
    "expected_loose_cycles",
    "expected_loose_paths",
    "janson_bound",
    "matching_bound_check",
    "dense_subset_ap_floor",
]

DEFAULT_EDGE_GUARD = 20000
WITNESS_LIMIT = 50


# ---------------------------------------------------------------------------
# loose structure search


def _pair_shares(edges: list[frozenset[int]]) -> dict[tuple[int, int], int]:
    """Sparse |e_i cap e_j| for i < j, only the nonzero entries."""
    through: dict[int, list[int]] = {}
    for i, e in enumerate(edges):
        for v in e:
            through.setdefault(v, []).append(i)
    shares: dict[tuple[int, int], int] = {}
    for idxs in through.values():
        for a in range(len(idxs)):
            for b in range(a + 1, len(idxs)):
                key = (idxs[a], idxs[b])
                shares[key] = shares.get(key, 0) + 1
    return shares


def _share(shares: dict[tuple[int, int], int], i: int, j: int) -> int:
    if i == j:
        raise ValueError("identical edges have no defined overlap here")
    if i > j:
        i, j = j, i
    return shares.get((i, j), 0)


def _loose_chains(
    edges: list[frozenset[int]],
    shares: dict[tuple[int, int], int],
    ell_max: int,
    closed: bool,
) -> list[tuple[int, ...]]:
    """Edge-index sequences forming loose cycles (closed) or paths (open).

    Consecutive edges share exactly one vertex, all other pairs none; for
    cycles the first and last are consecutive too and the junction vertices
    are pairwise distinct (a triple of edges through one common vertex
    matches the overlap sizes but is not a cycle).  Each structure is
    reported once, deduplicated as an unordered edge set.
    """
    m = len(edges)
    neigh: dict[int, list[int]] = {i: [] for i in range(m)}
    for (i, j), s in shares.items():
        if s == 1:
            neigh[i].append(j)
            neigh[j].append(i)
    min_len = 3 if closed else 2
    found: set[frozenset[int]] = set()
    out: list[tuple[int, ...]] = []

    def extend(chain: list[int]) -> None:
        last = chain[-1]
        for j in neigh[last]:
            if j in chain:
                continue
            if any(_share(shares, j, other) != 0 for other in chain[:-1]):
                continue
            chain.append(j)
            L = len(chain)
            if L >= min_len:
                if closed:
                    if _share(shares, chain[0], j) == 1 and _is_proper_cycle(
                        edges, chain
                    ):
                        key = frozenset(chain)
                        if key not in found:
                            found.add(key)
                            out.append(tuple(chain))
                else:
                    key = frozenset(chain)
                    if key not in found:
                        found.add(key)
                        out.append(tuple(chain))
            if L < ell_max:
                extend(chain)
            chain.pop()

    for start in range(m):
        extend([start])
    return out


def _is_proper_cycle(edges: list[frozenset[int]], chain: list[int]) -> bool:
    """Junctions must be pairwise distinct; only length 3 can violate this."""
    if len(chain) != 3:
        return True
    a, b, c = (edges[i] for i in chain)
    junctions = {min(a & b), min(b & c), min(c & a)}
    return len(junctions) == 3


@dataclass(frozen=True)
class ConfigCount:
    x1: int
    x2: int
    ell_max: int
    witnesses_t1: tuple[tuple[tuple[tuple[int, ...], ...], tuple[int, ...]], ...]
    witnesses_t2: tuple[tuple[tuple[tuple[int, ...], ...], tuple[int, ...]], ...]


def count_t1_t2(
    Z: GroundSubset,
    catalog: ApSpace,
    ell_max: int,
    max_edges: int = DEFAULT_EDGE_GUARD,
) -> ConfigCount:
    """Exact counts of the two forbidden configurations inside Z.

    The first kind pairs a loose cycle with a progression that grabs at
    least two cycle vertices and at least one vertex elsewhere in Z; the
    second pairs a loose path with a progression lying fully inside the
    path's vertex set.  The work is bounded by the number of progressions
    inside Z rather than |Z| itself, which is what the guard measures.
    """
    edge_tuples = catalog.aps_within(Z)
    if len(edge_tuples) > max_edges:
        raise ValueError(
            f"{len(edge_tuples)} progressions inside the set exceeds the "
            f"search guard {max_edges}"
        )
    edges = [frozenset(e) for e in edge_tuples]
    shares = _pair_shares(edges)
    k = catalog.k

    x1 = 0
    wit1 = []
    for chain in _loose_chains(edges, shares, ell_max, closed=True):
        vc = frozenset().union(*(edges[i] for i in chain))
        in_chain = set(chain)
        for j, e in enumerate(edges):
            if j in in_chain:
                continue
            s = len(e & vc)
            if 2 <= s < k:
                x1 += 1
                if len(wit1) < WITNESS_LIMIT:
                    wit1.append(
                        (
                            tuple(edge_tuples[i] for i in chain),
                            edge_tuples[j],
                        )
                    )

    x2 = 0
    wit2 = []
    for chain in _loose_chains(edges, shares, ell_max, closed=False):
        vp = frozenset().union(*(edges[i] for i in chain))
        in_chain = set(chain)
        for j, e in enumerate(edges):
            if j not in in_chain and e <= vp:
                x2 += 1
                if len(wit2) < WITNESS_LIMIT:
                    wit2.append(
                        (
                            tuple(edge_tuples[i] for i in chain),
                            edge_tuples[j],
                        )
                    )

    return ConfigCount(
        x1=x1,
        x2=x2,
        ell_max=ell_max,
        witnesses_t1=tuple(wit1),
        witnesses_t2=tuple(wit2),
    )


def validate_config_witness(
    witness: tuple[tuple[tuple[int, ...], ...], tuple[int, ...]],
    kind: str,
    Z: GroundSubset,
    catalog: ApSpace,
) -> bool:
    """Recheck a reported configuration from scratch: progressions, overlap
    matrix, and the extra-edge condition, without reusing the search code."""
    chain, e0 = witness
    sets = [frozenset(e) for e in chain]
    all_edges = list(sets) + [frozenset(e0)]
    for e in all_edges:
        if not catalog.is_edge(tuple(sorted(e))):
            return False
        if any(v not in Z for v in e):
            return False
    L = len(sets)
    for i in range(L):
        for j in range(i + 1, L):
            adjacent = j == i + 1 or (kind == "t1" and i == 0 and j == L - 1)
            want = 1 if adjacent else 0
            if len(sets[i] & sets[j]) != want:
                return False
    body = frozenset().union(*sets)
    extra = frozenset(e0)
    if extra in sets:
        return False
    if kind == "t1":
        if L < 3:
            return False
        if len(body) != L * (catalog.k - 1):
            return False
        return 2 <= len(extra & body) < catalog.k
    if kind == "t2":
        if L < 2:
            return False
        return extra <= body
    raise ValueError(f"unknown configuration kind {kind!r}")


# ---------------------------------------------------------------------------
# exact first moments


class InfeasibleCountError(ValueError):
    """Raised instead of silently estimating when an exact count is too big."""


def _structure_count(n: int, k: int, ell: int, closed: bool, work_guard: int) -> int:
    """Exact number of loose cycles/paths of length ell in the full catalog."""
    space = ApSpace(n, k)
    est = (3 * n) ** 2 * n * (9 * max(ell - 2, 1))
    if n**2 * (4 * (k * k) * n) ** max(ell - 2, 1) > work_guard and est > work_guard:
        raise InfeasibleCountError(
            f"exact structure count at n={n}, ell={ell} exceeds the work guard"
        )
    count = 0
    # chain of edges grown junction by junction; e_1 anchored by its smallest
    # vertex representation to count every structure exactly once at the end
    edges_cache: dict[tuple[int, int], list[frozenset[int]]] = {}

    def edges_through_pair(u: int, v: int) -> list[frozenset[int]]:
        key = (u, v) if u < v else (v, u)
        got = edges_cache.get(key)
        if got is None:
            got = [frozenset(e) for e in space.completions_of_pair(key[0], key[1])]
            edges_cache[key] = got
        return got

    total = 0
    all_edges_first: list[frozenset[int]] = []
    for v in range(n):
        for e in space.aps_through(v):
            if min(e) == v:
                all_edges_first.append(frozenset(e))

    def grow(chain: list[frozenset[int]], target: int) -> int:
        if len(chain) == target:
            if not closed:
                return 1
            first, last = chain[0], chain[-1]
            j = first & last
            if len(j) != 1:
                return 0
            if not _is_proper_cycle(list(chain), list(range(len(chain)))):
                return 0
            return 1
        got = 0
        last = chain[-1]
        used = set().union(*chain)
        for junction in last:
            for e in space.aps_through(junction):
                fe = frozenset(e)
                if len(fe & last) != 1:
                    continue
                overlap = fe & used
                if closed and len(chain) == target - 1:
                    j0 = fe & chain[0]
                    if len(j0) != 1 or overlap != (fe & last) | j0:
                        continue
                    if (fe & last) == j0:
                        continue
                elif overlap != fe & last:
                    continue
                chain.append(fe)
                got += grow(chain, target)
                chain.pop()
        return got

    for first in all_edges_first:
        total += grow([first], ell)
    # each open chain is produced once per direction, each closed one once
    # per starting edge and direction
    if closed:
        return total // (2 * ell)
    return total // 2


def count_loose_cycles(n: int, k: int, ell: int, work_guard: int = 5 * 10**7) -> int:
    if ell < 3:
        raise ValueError("loose cycles need length at least 3")
    if n < 3 * (k - 1):
        return 0
    return _structure_count(n, k, ell, closed=True, work_guard=work_guard)


def count_loose_paths(n: int, k: int, ell: int, work_guard: int = 5 * 10**7) -> int:
    if ell < 2:
        raise ValueError("loose paths need length at least 2")
    if n < k + (k - 1) * (ell - 1):
        return 0
    return _structure_count(n, k, ell, closed=False, work_guard=work_guard)


@dataclass(frozen=True)
class FirstMoment:
    expectation: float
    structure_count: int
    vertex_count: int
    envelope: float  # the O(.) comparison value with constant 1
    envelope_ratio: float


def expected_loose_cycles(n: int, p: float, k: int, ell: int) -> FirstMoment:
    """Exact E[number of loose cycles of length ell] for the binomial subset."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    count = count_loose_cycles(n, k, ell)
    vertices = (k - 1) * ell
    expectation = count * p**vertices
    envelope = p ** ((k - 1) * ell) * float(n) ** ell
    ratio = expectation / envelope if envelope > 0 else 0.0
    return FirstMoment(expectation, count, vertices, envelope, ratio)


def expected_loose_paths(n: int, p: float, k: int, ell: int) -> FirstMoment:
    """Exact E[number of loose paths of length ell] for the binomial subset."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    count = count_loose_paths(n, k, ell)
    vertices = k + (k - 1) * (ell - 1)
    expectation = count * p**vertices
    envelope = p**k * n**2 * p ** ((k - 1) * (ell - 1)) * float(n) ** (ell - 1)
    ratio = expectation / envelope if envelope > 0 else 0.0
    return FirstMoment(expectation, count, vertices, envelope, ratio)


# ---------------------------------------------------------------------------
# Janson


@dataclass(frozen=True)
class JansonReport:
    ex: float
    delta: float
    bound: float
    pair_count: int
    envelope: float | None = None
    within_envelope: bool | None = None


def janson_bound(
    targets: list[tuple[int, ...]],
    p: float,
    n: int | None = None,
    k: int | None = None,
) -> JansonReport:
    """exp(-EX^2 / (2 Delta)) for X = number of fully-present target sets.

    Delta sums E[prod over A union B] over ordered pairs with A and B
    overlapping, the diagonal included, so Delta >= EX always holds and the
    bound specialises to exp(-EX/2) for disjoint families.
    """
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    sets = [tuple(sorted(set(t))) for t in targets]
    ex = sum(p ** len(a) for a in sets)
    if ex == 0:
        return JansonReport(ex=0.0, delta=0.0, bound=1.0, pair_count=0)

    sizes = {len(a) for a in sets}
    if len(sizes) == 1:
        size = sizes.pop()
        # ordered overlapping pairs, grouped by intersection size via
        # subset counting and binomial inversion
        q = [0.0] * (size + 1)  # q[t] = sum over |S|=t of (#targets >= S)^2
        counts: dict[tuple[int, ...], int] = {}
        for a in sets:
            for t in range(1, size + 1):
                for sub in combinations(a, t):
                    counts[sub] = counts.get(sub, 0) + 1
        for sub, cnt in counts.items():
            q[len(sub)] += cnt * cnt
        m = [0.0] * (size + 1)  # m[j] = #ordered pairs with |A cap B| = j
        for j in range(size, 0, -1):
            acc = q[j]
            for t in range(j + 1, size + 1):
                acc -= math.comb(t, j) * m[t]
            m[j] = acc
        delta = sum(m[j] * p ** (2 * size - j) for j in range(1, size + 1))
        pair_count = int(round(sum(m[1:])))
    else:
        if len(sets) > 2000:
            raise ValueError("mixed-size target families are capped at 2000 sets")
        delta = 0.0
        pair_count = 0
        for a in sets:
            sa = set(a)
            for b in sets:
                union = sa.union(b)
                if len(union) < len(a) + len(b):
                    delta += p ** len(union)
                    pair_count += 1

    bound = math.exp(-ex * ex / (2 * delta))
    envelope = None
    within = None
    if n is not None and k is not None:
        envelope = p ** (2 * k - 1) * n**3 + p ** (k + 1) * k * k * n**2
        within = delta <= envelope
    return JansonReport(
        ex=ex,
        delta=delta,
        bound=bound,
        pair_count=pair_count,
        envelope=envelope,
        within_envelope=within,
    )


# ---------------------------------------------------------------------------
# matching decomposition bound


@dataclass(frozen=True)
class MatchingBoundReport:
    edges_inside: int
    bound: float
    holds: bool
    matchings: int
    max_matching_size: int
    p_used: float
    p_estimated: bool


def matching_bound_check(
    F,
    U: GroundSubset,
    D: int,
    p: float | None = None,
) -> MatchingBoundReport:
    """Compare e(F[U]) against 5 D (p^ell n / ell + log n).

    F is a uniform hypergraph whose vertices are the residues of U's group.
    The edge set is split greedily into matchings (first-fit on the line
    graph); their number and sizes are reported alongside the comparison.
    When p is omitted it is estimated as |U|/n and flagged as such.
    """
    if F.max_degree() > D:
        raise ValueError(f"max degree {F.max_degree()} exceeds the stated bound {D}")
    n = U.n
    if F.m != n:
        raise ValueError("F must live on the same residue set as U")
    estimated = p is None
    if p is None:
        p = len(U) / n if n else 0.0
    ell = max(F.ell, 1)

    matchings: list[int] = []  # occupied-vertex masks
    sizes: list[int] = []
    for em in sorted(F.edge_masks):
        for i, used in enumerate(matchings):
            if used & em == 0:
                matchings[i] |= em
                sizes[i] += 1
                break
        else:
            matchings.append(em)
            sizes.append(1)

    inside = sum(1 for em in F.edge_masks if em & ~U.mask == 0)
    bound = 5 * D * (p**ell * n / ell + math.log(n)) if n > 1 else 0.0
    return MatchingBoundReport(
        edges_inside=inside,
        bound=bound,
        holds=inside <= bound,
        matchings=len(matchings),
        max_matching_size=max(sizes, default=0),
        p_used=p,
        p_estimated=estimated,
    )


# ---------------------------------------------------------------------------
# progression floor in dense subsets


@dataclass(frozen=True)
class ApFloorReport:
    minimum: int
    normalised: float
    subset_size: int
    trials: int
    degenerate: bool
    adversarial_count: int


def dense_subset_ap_floor(
    Z: GroundSubset,
    gamma: float,
    catalog: ApSpace,
    trials: int,
    seed: RandomSeed | None = None,
) -> ApFloorReport:
    """Minimum progression count over random and greedy-poor subsets of Z.

    Subsets have size ceil(gamma |Z|); besides `trials` uniform ones, a
    greedy adversary repeatedly drops the element lying on the most
    progressions, which empirically is the fastest way to starve the count.
    The normalisation divides by (|Z|/n)^k n^2 for cross-size comparison.
    """
    if len(Z) < 1:
        raise ValueError("Z must be nonempty")
    if not 0 < gamma <= 1:
        raise ValueError("gamma must lie in (0, 1]")
    size = math.ceil(gamma * len(Z))
    n = catalog.n
    if size < catalog.k:
        return ApFloorReport(0, 0.0, size, trials, True, 0)

    members = Z.members()
    rng = (seed or RandomSeed(0)).generator()

    def count_inside(subset: GroundSubset) -> int:
        return len(catalog.aps_within(subset))

    best = None
    for _ in range(max(trials, 0)):
        chosen = rng.choice(len(members), size=size, replace=False)
        S = GroundSubset.from_members(n, (members[i] for i in chosen))
        c = count_inside(S)
        best = c if best is None else min(best, c)

    # greedy adversary: repeatedly delete the busiest element
    current = set(members)
    while len(current) > size:
        S = GroundSubset.from_members(n, current)
        degree: dict[int, int] = {v: 0 for v in current}
        for e in catalog.aps_within(S):
            for v in e:
                degree[v] += 1
        worst = max(current, key=lambda v: (degree[v], v))
        current.remove(worst)
    adversarial = count_inside(GroundSubset.from_members(n, current))
    best = adversarial if best is None else min(best, adversarial)

    p_hat = len(Z) / n
    norm = best / (p_hat**catalog.k * n * n) if p_hat > 0 else 0.0
    return ApFloorReport(
        minimum=best,
        normalised=norm,
        subset_size=size,
        trials=trials,
        degenerate=False,
        adversarial_count=adversarial,
    )
