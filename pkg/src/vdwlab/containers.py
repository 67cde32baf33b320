"""Containers for independent sets of small uniform hypergraphs, and cores.

The construction is the classic fingerprint scythe.  Walking a fixed pivot
rule over the vertex set, an independent set I is summarised by the ordered
subsequence of pivots it contains (the fingerprint g(I)); everything I owns
beyond the fingerprint provably survives inside a set f(g(I)) that depends
on the fingerprint alone.  Soundness of the replay rests on one argument:
if a replayed pivot does not match the next fingerprint entry, then no
independent set with this fingerprint contains it, because its builder run
would have recorded it.

Cores are the complements of fingerprint-plus-container sets.  Every
hitting set contains a core by the container property and de Morgan.  The
quantitative core-size guarantee is asymptotic in nature; here the sizes
are measured and reported per instance rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

__all__ = [
    "UniformHypergraph",
    "ContainerCertificate",
    "VerificationReport",
    "CoreFamily",
    "build_containers",
    "verify_certificate",
    "cores_from_containers",
    "brute_force_hitting_sets",
    "all_independent_sets",
]

EXHAUSTIVE_LIMIT = 20  # full subset scans stay below this many vertices
SPOT_CHECK_LIMIT = 200  # lazy certificates allowed up to this size


def _popcount(x: int) -> int:
    return x.bit_count()


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class UniformHypergraph:
    """An ell-uniform hypergraph on vertices 0..m-1 with distinct edges."""

    __slots__ = ("m", "ell", "edges", "edge_masks")

    def __init__(self, m: int, edges: Iterable[Iterable[int]]):
        if m < 0:
            raise ValueError("vertex count must be nonnegative")
        edge_sets = []
        seen = set()
        for e in edges:
            fs = frozenset(int(v) for v in e)
            if any(v < 0 or v >= m for v in fs):
                raise ValueError(f"edge {sorted(fs)} leaves the vertex range")
            if fs in seen:
                continue
            seen.add(fs)
            edge_sets.append(fs)
        sizes = {len(e) for e in edge_sets}
        if len(sizes) > 1:
            raise ValueError(f"mixed edge sizes {sorted(sizes)}")
        self.m = m
        self.ell = sizes.pop() if sizes else 0
        self.edges = tuple(sorted(edge_sets, key=sorted))
        self.edge_masks = tuple(
            sum(1 << v for v in e) for e in self.edges
        )

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def full_mask(self) -> int:
        return (1 << self.m) - 1

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def max_degree(self) -> int:
        counts = [0] * self.m
        for e in self.edges:
            for v in e:
                counts[v] += 1
        return max(counts, default=0)

    def max_codegree(self) -> int:
        best = 0
        counts: dict[tuple[int, int], int] = {}
        for e in self.edges:
            for pair in combinations(sorted(e), 2):
                c = counts.get(pair, 0) + 1
                counts[pair] = c
                best = max(best, c)
        return best

    def max_t_degree(self, t: int) -> int:
        """Largest number of edges through a common t-subset."""
        if t < 1 or t > self.ell:
            return 0
        counts: dict[tuple[int, ...], int] = {}
        best = 0
        for e in self.edges:
            for sub in combinations(sorted(e), t):
                c = counts.get(sub, 0) + 1
                counts[sub] = c
                best = max(best, c)
        return best

    def edges_inside(self, mask: int) -> int:
        """e(H[A]) for A given as a bit mask."""
        return sum(1 for em in self.edge_masks if em & ~mask == 0)

    def is_independent(self, mask: int) -> bool:
        return all(em & ~mask != 0 for em in self.edge_masks)


# ---------------------------------------------------------------------------
# the scythe


def _in_fbar(H: UniformHypergraph, avail: int) -> bool:
    """Outside the dense family: small, or missing half the edges."""
    if 2 * _popcount(avail) < H.m:
        return True
    return 2 * H.edges_inside(avail) < H.edge_count


def _propagate(H: UniformHypergraph, avail: int, s_mask: int) -> int:
    """Drop vertices forced out: edges with all other vertices fingerprinted."""
    changed = True
    while changed:
        changed = False
        for em in H.edge_masks:
            rest = em & ~s_mask
            if rest and rest & (rest - 1) == 0 and rest & avail:
                avail &= ~rest
                changed = True
    return avail


def _pivot(H: UniformHypergraph, avail: int, s_mask: int) -> int:
    """Highest-degree available vertex over still-alive edges, lowest id wins."""
    alive_scope = avail | s_mask
    deg = [0] * H.m
    for em in H.edge_masks:
        if em & ~alive_scope == 0:
            for v in _iter_bits(em & avail):
                deg[v] += 1
    best, best_deg = -1, -1
    for v in _iter_bits(avail):
        if deg[v] > best_deg:
            best, best_deg = v, deg[v]
    return best


@dataclass
class ContainerCertificate:
    """Fingerprint-indexed containers plus the parameters that shaped them."""

    H: UniformHypergraph
    p: float
    c: float
    fingerprint_cap: int | None
    containers: dict[tuple[int, ...], int] = field(default_factory=dict)
    stop_reasons: dict[tuple[int, ...], str] = field(default_factory=dict)
    in_fbar: dict[tuple[int, ...], bool] = field(default_factory=dict)
    degree_conditions: dict[int, tuple[float, float]] = field(default_factory=dict)
    conforming: bool = True
    degenerate: bool = False
    exhaustive: bool = False

    @property
    def c_prime(self) -> float:
        """Smallest budget constant covering every fingerprint seen so far."""
        if not self.containers:
            return 0.0
        longest = max(len(s) for s in self.containers)
        pm = self.p * self.H.m
        return longest / pm if pm > 0 else float("inf")

    def fingerprint_of(self, I: Iterable[int]) -> tuple[int, ...]:
        """Replay the scythe against I, recording the pivots I contains."""
        members = frozenset(I)
        H = self.H
        if self.degenerate:
            return ()
        avail = H.full_mask()
        s: list[int] = []
        s_mask = 0
        while True:
            avail = _propagate(H, avail, s_mask)
            if _in_fbar(H, avail):
                reason = "fbar"
                break
            if self.fingerprint_cap is not None and len(s) >= self.fingerprint_cap:
                reason = "cap"
                break
            w = _pivot(H, avail, s_mask)
            avail &= ~(1 << w)
            if w in members:
                s.append(w)
                s_mask |= 1 << w
        fp = tuple(s)
        if fp not in self.containers:
            self.containers[fp] = avail
            self.stop_reasons[fp] = reason
            self.in_fbar[fp] = _in_fbar(self.H, avail)
        return fp

    def container_of(self, I: Iterable[int]) -> frozenset[int]:
        return frozenset(_iter_bits(self.containers[self.fingerprint_of(I)]))


def build_containers(
    H: UniformHypergraph,
    p: float,
    c: float,
    fingerprint_cap: int | None = None,
) -> ContainerCertificate:
    """Construct the certificate; exhaustive over fingerprints when m is small.

    The degree precondition max_t_degree(t) <= c * p^(t-1) * e/v is checked
    for every t up to the uniformity and reported; a failure flags the
    certificate as non-conforming without aborting the build.
    """
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    if H.m > SPOT_CHECK_LIMIT:
        raise ValueError(f"container construction is capped at {SPOT_CHECK_LIMIT} vertices")
    cert = ContainerCertificate(H=H, p=p, c=c, fingerprint_cap=fingerprint_cap)
    if H.edge_count == 0:
        cert.degenerate = True
        cert.containers[()] = H.full_mask()
        cert.stop_reasons[()] = "edgeless"
        cert.in_fbar[()] = _in_fbar(H, H.full_mask())
        cert.exhaustive = True
        return cert
    ratio = H.edge_count / H.m
    for t in range(1, H.ell + 1):
        allowed = c * p ** (t - 1) * ratio
        got = float(H.max_t_degree(t))
        cert.degree_conditions[t] = (got, allowed)
        if got > allowed:
            cert.conforming = False
    if H.m <= EXHAUSTIVE_LIMIT:
        _scythe_tree(cert)
        cert.exhaustive = True
    return cert


def _scythe_tree(cert: ContainerCertificate) -> None:
    """DFS over consume/reject branches, one leaf per reachable fingerprint."""
    H = cert.H
    stack: list[tuple[int, tuple[int, ...], int]] = [(H.full_mask(), (), 0)]
    while stack:
        avail, fp, s_mask = stack.pop()
        avail = _propagate(H, avail, s_mask)
        if _in_fbar(H, avail):
            cert.containers[fp] = avail
            cert.stop_reasons[fp] = "fbar"
            cert.in_fbar[fp] = True
            continue
        if cert.fingerprint_cap is not None and len(fp) >= cert.fingerprint_cap:
            cert.containers[fp] = avail
            cert.stop_reasons[fp] = "cap"
            cert.in_fbar[fp] = False
            continue
        w = _pivot(H, avail, s_mask)
        rest = avail & ~(1 << w)
        stack.append((rest, fp, s_mask))  # reject: w in no matching I
        stack.append((rest, fp + (w,), s_mask | (1 << w)))  # consume: w in I


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    checked: int
    failure: tuple[tuple[int, ...], str] | None = None


def verify_certificate(
    H: UniformHypergraph,
    cert: ContainerCertificate,
    independent_sets: Sequence[frozenset[int]] | None = None,
) -> VerificationReport:
    """Check the container contract on every given (or all) independent set."""
    if independent_sets is None:
        sets = all_independent_sets(H)
    else:
        sets = list(independent_sets)
    traced = [(I, cert.fingerprint_of(I)) for I in sets]
    budget = cert.c_prime * cert.p * H.m + 1e-9
    for I, fp in traced:
        fp_set = set(fp)
        if not fp_set <= I:
            return VerificationReport(False, len(sets), (tuple(sorted(I)), "fingerprint not inside the set"))
        cont = cert.containers[fp]
        residue = I - fp_set
        if any(not (cont >> v) & 1 for v in residue):
            return VerificationReport(False, len(sets), (tuple(sorted(I)), "residue escapes the container"))
        if len(fp) > budget:
            return VerificationReport(False, len(sets), (tuple(sorted(I)), "fingerprint over budget"))
    return VerificationReport(True, len(sets))


def all_independent_sets(H: UniformHypergraph) -> list[frozenset[int]]:
    """Every independent set of H, the empty set included."""
    if H.m > EXHAUSTIVE_LIMIT:
        raise ValueError(f"exhaustive enumeration is capped at {EXHAUSTIVE_LIMIT} vertices")
    out = []
    for mask in range(1 << H.m):
        if H.is_independent(mask):
            out.append(frozenset(_iter_bits(mask)))
    return out


# ---------------------------------------------------------------------------
# cores


@dataclass(frozen=True)
class CoreFamily:
    cores: tuple[frozenset[int], ...]
    beta: float
    c_prime: float
    t: float
    count_budget: int
    hypotheses_hold: bool
    hypothesis_report: dict
    degenerate: bool
    certificate: ContainerCertificate

    def covers(self, hitting_set: frozenset[int]) -> bool:
        return any(core <= hitting_set for core in self.cores)

    def min_size(self) -> int:
        return min((len(c) for c in self.cores), default=0)


def cores_from_containers(
    H: UniformHypergraph,
    k: int,
    C0: float,
    C1: float,
) -> CoreFamily:
    """Complements of fingerprint-union-container sets.

    Parameters follow the degree-hypothesis template: e(H) at least
    C0*m^(1+1/(k-2)), max degree at most C1*m^(1/(k-2)), max codegree at
    most C1*log m.  Whether this instance satisfies them is reported, and
    the core sizes are measured against beta*m either way.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    if H.ell < 2 and H.edge_count > 0:
        raise ValueError("uniformity must be at least 2")
    if C0 <= 0 or C1 <= 0:
        raise ValueError("C0 and C1 must be positive")
    m = H.m
    ell = max(H.ell, 2)
    exponent = (k - 2) * (ell - 1)
    p = m ** (-1.0 / exponent) if m > 1 else 1.0
    c = max(1.0, C1 / C0)
    beta = min(0.25, C0 / (4 * C1))
    t = 1.0 - 1.0 / exponent

    cert = build_containers(H, p, c)
    if not cert.exhaustive:
        raise ValueError("core extraction needs the exhaustive fingerprint tree")
    cores = []
    seen = set()
    full = H.full_mask()
    for fp, cont in sorted(cert.containers.items()):
        s_mask = sum(1 << v for v in fp)
        core_mask = full & ~(s_mask | cont)
        if core_mask not in seen:
            seen.add(core_mask)
            cores.append(frozenset(_iter_bits(core_mask)))

    log_m = math.log(m) if m > 1 else 1.0
    checks = {
        "edges": (H.edge_count, C0 * m ** (1 + 1 / (k - 2))),
        "max_degree": (H.max_degree(), C1 * m ** (1 / (k - 2))),
        "max_codegree": (H.max_codegree(), C1 * log_m),
    }
    hold = (
        checks["edges"][0] >= checks["edges"][1]
        and checks["max_degree"][0] <= checks["max_degree"][1]
        and checks["max_codegree"][0] <= checks["max_codegree"][1]
    )
    cap = math.ceil(cert.c_prime * m**t) if cert.containers else 0
    budget = sum(math.comb(m, i) for i in range(1, min(cap, m) + 1))
    return CoreFamily(
        cores=tuple(sorted(cores, key=sorted)),
        beta=beta,
        c_prime=cert.c_prime,
        t=t,
        count_budget=budget,
        hypotheses_hold=hold,
        hypothesis_report=checks,
        degenerate=cert.degenerate,
        certificate=cert,
    )


def brute_force_hitting_sets(
    H: UniformHypergraph, minimal_only: bool = False
) -> list[frozenset[int]]:
    """All vertex sets meeting every edge; optionally only the minimal ones."""
    if H.m > EXHAUSTIVE_LIMIT:
        raise ValueError(f"hitting-set enumeration is capped at {EXHAUSTIVE_LIMIT} vertices")
    masks = [
        mask
        for mask in range(1 << H.m)
        if all(em & mask for em in H.edge_masks)
    ]
    if minimal_only:
        mask_set = set(masks)
        masks = [
            mask
            for mask in masks
            if all(mask & ~(1 << v) not in mask_set for v in _iter_bits(mask))
        ]
    return [frozenset(_iter_bits(mask)) for mask in masks]
