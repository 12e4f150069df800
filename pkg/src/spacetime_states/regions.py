"""States of lattice regions on hypersurfaces, and what they do or do not fix.

A region here is a set of sites read off a particular hypersurface; the
same sites at the same cut values, reached through different surfaces, form
one spacetime region. The functions below compute region states and test
the locality properties relating them: separability (does the whole follow
from the parts?), no-signalling, light-cone determinism, and consistency of
a region's state across the surfaces that contain it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import settings
from .dynamics import EventSchedule, GateSpec, evolve_to
from .errors import DimensionError, LatticeError, PreconditionError
from .lattice import (
    Event,
    Foliation,
    Hypersurface,
    Region,
    event_in_past,
    in_causal_past,
    past_cone_slice,
    straddles,
    validate_foliation,
)
from .qstate import (
    DensityOperator,
    TensorFactorization,
    partial_trace,
    random_unitary,
    reduced_density,
    tensor_product,
    trace_distance,
)

FULL_LOCALITY = "FullLocality"
NON_SEPARABILITY = "NonSeparability"
CONTEXTUALITY = "Contextuality"
NIHILISM = "Nihilism"
LEVELS = (FULL_LOCALITY, NON_SEPARABILITY, CONTEXTUALITY, NIHILISM)


@dataclass(frozen=True)
class RegionStateReport:
    region: Region
    surface: Hypersurface
    state: DensityOperator
    branch_weight: float


def region_state(
    schedule: EventSchedule,
    region: Region,
    sigma: Hypersurface,
    rng=None,
    outcomes: dict | None = None,
) -> RegionStateReport:
    region.check(schedule.lattice)
    psi, weight = evolve_to(schedule, sigma, rng=rng, outcomes=outcomes)
    rho = reduced_density(psi, schedule.factorization, region.sites)
    return RegionStateReport(region, sigma, rho, weight)


def permute_factors(rho: DensityOperator, dims: Sequence[int], order: Sequence[int]) -> DensityOperator:
    """Reorder tensor factors: output factor ``k`` is input factor ``order[k]``."""
    n = len(dims)
    d = math.prod(dims)
    t = rho.matrix.reshape(list(dims) * 2)
    t = t.transpose(list(order) + [n + o for o in order])
    return DensityOperator(t.reshape(d, d), check=False)


def product_in_site_order(
    rho_a: DensityOperator, a: Region, rho_b: DensityOperator, b: Region, local_dim: int
) -> DensityOperator:
    """``rho_a (x) rho_b`` with factors rearranged into ascending site order."""
    sites = list(a.sites) + list(b.sites)
    order = sorted(range(len(sites)), key=lambda k: sites[k])
    return permute_factors(tensor_product(rho_a, rho_b), [local_dim] * len(sites), order)


@dataclass(frozen=True)
class SeparabilityRecord:
    rho_a: DensityOperator
    rho_b: DensityOperator
    rho_ab: DensityOperator
    product_distance: float

    @property
    def separable(self) -> bool:
        return self.product_distance < settings.tol()


def joint_vs_marginals(
    schedule: EventSchedule, a: Region, b: Region, sigma: Hypersurface, outcomes: dict | None = None
) -> SeparabilityRecord:
    """Compare the joint state of ``a`` and ``b`` with the product of their states."""
    if not a.isdisjoint(b):
        raise LatticeError(f"regions {a.sites} and {b.sites} overlap")
    psi, _ = evolve_to(schedule, sigma, outcomes=outcomes)
    f = schedule.factorization
    rho_a = reduced_density(psi, f, a.sites)
    rho_b = reduced_density(psi, f, b.sites)
    rho_ab = reduced_density(psi, f, (a | b).sites)
    prod = product_in_site_order(rho_a, a, rho_b, b, schedule.lattice.local_dim)
    return SeparabilityRecord(rho_a, rho_b, rho_ab, trace_distance(rho_ab, prod))


def supervenience_witness(joint: DensityOperator, factorization: TensorFactorization) -> DensityOperator | None:
    """A second joint state with the same two marginals, or ``None`` for products.

    The witness is the product of the marginals; whenever it differs from
    ``joint`` the marginals alone cannot determine the joint state.
    """
    if len(factorization) != 2:
        raise DimensionError("the witness is defined for bipartite factorizations")
    factorization.check(joint.dim)
    witness = tensor_product(partial_trace(joint, factorization, [0]), partial_trace(joint, factorization, [1]))
    if trace_distance(joint, witness) < settings.tol():
        return None
    return witness


@dataclass(frozen=True)
class CausalCheck:
    """Outcome of a causality probe.

    ``applicable`` is false when the configuration violates the check's
    preconditions; ``distance`` is then still reported but carries no
    verdict.
    """

    distance: float
    applicable: bool = True
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.applicable and self.distance < settings.tol()


def _free_layer(schedule: EventSchedule, sites: Sequence[int], below: int) -> int | None:
    used = {(e.layer, s) for e in schedule.events for s in e.sites}
    for layer in range(below - 1, -1, -1):
        if all((layer, s) not in used for s in sites):
            return layer
    return None


def no_signalling_check(
    schedule: EventSchedule,
    op_at: Region,
    probe: Region,
    sigma: Hypersurface,
    rng: np.random.Generator | None = None,
    gate: GateSpec | None = None,
    layer: int | None = None,
) -> CausalCheck:
    """Distance between ``probe``'s state on ``sigma`` with and without an extra unitary on ``op_at``.

    ``op_at`` must be one site or two adjacent sites when ``gate`` is given;
    otherwise a Haar-random gate is drawn (one per site for larger regions).
    The inserted events go on the latest layer below ``sigma`` that is free
    on their sites, unless ``layer`` is given.
    """
    lattice = schedule.lattice
    op_at.check(lattice)
    probe.check(lattice)
    if not op_at.isdisjoint(probe):
        return CausalCheck(math.nan, False, "op region overlaps probe")
    rng = np.random.default_rng() if rng is None else rng
    d = lattice.local_dim
    if gate is not None or len(op_at) == 1 or (len(op_at) == 2 and lattice.distance(*op_at.sites) == 1):
        groups = [op_at.sites]
    else:
        groups = [(s,) for s in op_at.sites]
    extra = []
    for n, sites in enumerate(groups):
        below = min(sigma[s] for s in sites)
        at = layer if layer is not None else _free_layer(schedule, sites, below)
        if at is None or at >= below:
            return CausalCheck(math.nan, False, f"no free layer below the surface on sites {sites}")
        g = gate if gate is not None else GateSpec("inserted", random_unitary(d ** len(sites), rng), arity=len(sites))
        extra.append(Event(("inserted", n), sites, at, g))
    try:
        modified = schedule.with_events(extra)
    except LatticeError as exc:
        return CausalCheck(math.nan, False, str(exc))
    causal = [e.id for e in extra if in_causal_past(e, probe, sigma, lattice)]
    before = region_state(schedule, probe, sigma).state
    after = region_state(modified, probe, sigma).state
    distance = trace_distance(before, after)
    if causal:
        return CausalCheck(distance, False, "inserted operation lies in the probe's past light cone")
    return CausalCheck(distance)


def _same_event(a: Event, b: Event) -> bool:
    if a.sites != b.sites or a.layer != b.layer or type(a.payload) is not type(b.payload):
        return False
    if isinstance(a.payload, GateSpec):
        return np.array_equal(a.payload.matrix.matrix, b.payload.matrix.matrix)
    pa, pb = a.payload, b.payload
    return pa.outcome == pb.outcome and all(np.array_equal(x, y) for x, y in zip(pa.projectors, pb.projectors))


def _cone_events(s: EventSchedule, region: Region, sigma: Hypersurface, sigma0: Hypersurface) -> list[Event]:
    return sorted(
        (
            e
            for e in s.events
            if event_in_past(e, sigma)
            and not event_in_past(e, sigma0)
            and in_causal_past(e, region, sigma, s.lattice)
        ),
        key=lambda e: (e.layer, e.sites),
    )


def lightcone_determinism_check(
    s1: EventSchedule,
    s2: EventSchedule,
    region: Region,
    sigma: Hypersurface,
    sigma0: Hypersurface,
) -> CausalCheck:
    """Region states on ``sigma`` from two schedules that agree on the past cone slice at ``sigma0``."""
    if s1.lattice != s2.lattice:
        raise PreconditionError("schedules live on different lattices")
    lattice = s1.lattice
    slice_ = past_cone_slice(region, sigma, sigma0, lattice)
    distance = trace_distance(region_state(s1, region, sigma).state, region_state(s2, region, sigma).state)
    for s in (s1, s2):
        if any(straddles(e, sigma0) for e in s.events):
            return CausalCheck(distance, False, "base surface straddles an event")
    c1, c2 = _cone_events(s1, region, sigma, sigma0), _cone_events(s2, region, sigma, sigma0)
    if len(c1) != len(c2) or not all(_same_event(a, b) for a, b in zip(c1, c2)):
        return CausalCheck(distance, False, "schedules differ inside the past light cone")
    base = trace_distance(region_state(s1, slice_, sigma0).state, region_state(s2, slice_, sigma0).state)
    if base >= settings.tol():
        return CausalCheck(distance, False, f"states on the past cone slice differ by {base:.3g}")
    return CausalCheck(distance)


@dataclass(frozen=True)
class ConsistencyReport:
    region: Region
    surfaces_tested: int
    distinct_states: tuple[tuple[Hypersurface, DensityOperator], ...]
    members: tuple[tuple[Hypersurface, ...], ...] = ()

    @property
    def consistent(self) -> bool:
        return len(self.distinct_states) == 1


def cluster(states: Sequence[DensityOperator], threshold: float) -> list[list[int]]:
    """Single-linkage clusters of states at the given trace-distance threshold."""
    parent = list(range(len(states)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            if trace_distance(states[i], states[j]) < threshold:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(len(states)):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def foliation_consistency(
    schedule: EventSchedule,
    region: Region,
    surfaces: Sequence[Hypersurface],
    outcomes: dict | None = None,
) -> ConsistencyReport:
    """Group the states ``region`` receives from each surface containing it."""
    surfaces = list(surfaces)
    if not surfaces:
        raise PreconditionError("no surfaces given")
    placement = {tuple(s[i] for i in region.sites) for s in surfaces}
    if len(placement) != 1:
        raise PreconditionError(f"surfaces place region {region.sites} at different layers: {sorted(placement)}")
    states = [region_state(schedule, region, s, outcomes=outcomes).state for s in surfaces]
    groups = cluster(states, settings.tol())
    return ConsistencyReport(
        region,
        len(surfaces),
        tuple((surfaces[g[0]], states[g[0]]) for g in groups),
        tuple(tuple(surfaces[i] for i in g) for g in groups),
    )


@dataclass
class HierarchyLevel:
    level: str
    witnesses: list[dict] = field(default_factory=list)
    nihilism_fraction: float = 0.0
    regions_tested: int = 0

    def __post_init__(self):
        if self.level not in LEVELS:
            raise ValueError(f"unknown hierarchy level {self.level!r}")


def placements(regions: Sequence[Region], surfaces: Sequence[Hypersurface]) -> list[tuple[Region, tuple[int, ...], list[Hypersurface]]]:
    """Each region at each distinct cut assignment, with the surfaces realizing it."""
    out = []
    for r in regions:
        groups: dict[tuple[int, ...], list[Hypersurface]] = {}
        for s in surfaces:
            groups.setdefault(tuple(s[i] for i in r.sites), []).append(s)
        out.extend((r, key, groups[key]) for key in sorted(groups))
    return out


def classify_hierarchy(
    schedule: EventSchedule,
    regions: Sequence[Region],
    foliations: Sequence[Foliation],
    theta_nihil: float = 0.5,
    outcomes: dict | None = None,
) -> HierarchyLevel:
    """Place a scenario on the locality hierarchy.

    Every region is checked for a surface-independent state at each of its
    placements, and every disjoint pair of regions is checked for a product
    joint state on every surface.
    """
    if not regions or not foliations:
        raise PreconditionError("need at least one region and one foliation")
    surfaces: list[Hypersurface] = []
    for f in foliations:
        validate_foliation(f, schedule.events, schedule.lattice).raise_if_invalid()
        surfaces.extend(s for s in f if s not in surfaces)

    inconsistent = []
    groups = placements(regions, surfaces)
    for region, key, members in groups:
        report = foliation_consistency(schedule, region, members, outcomes=outcomes)
        if not report.consistent:
            inconsistent.append((region, key, report))

    entangled = []
    pairs_tested, max_product_distance = 0, 0.0
    for i, a in enumerate(regions):
        for b in regions[i + 1 :]:
            if not a.isdisjoint(b):
                continue
            pairs_tested += 1
            for s in surfaces:
                rec = joint_vs_marginals(schedule, a, b, s, outcomes=outcomes)
                max_product_distance = max(max_product_distance, rec.product_distance)
                if not rec.separable:
                    entangled.append((a, b, s, rec))
                    break

    witnesses = [
        {
            "kind": "inconsistent_region",
            "region": list(region.sites),
            "placement": list(key),
            "classes": [
                {"surface": s.to_list(), "state": rho, "members": [m.to_list() for m in ms]}
                for (s, rho), ms in zip(report.distinct_states, report.members)
            ],
        }
        for region, key, report in inconsistent
    ]
    witnesses += [
        {
            "kind": "non_product_pair",
            "regions": [list(a.sites), list(b.sites)],
            "surface": s.to_list(),
            "product_distance": rec.product_distance,
        }
        for a, b, s, rec in entangled
    ]
    fraction = len(inconsistent) / len(groups)
    if inconsistent:
        level = NIHILISM if fraction > theta_nihil else CONTEXTUALITY
    elif entangled:
        level = NON_SEPARABILITY
    else:
        level = FULL_LOCALITY
        # positive evidence: every placement consistent, every pair a product on every surface
        witnesses.append(
            {
                "kind": "locality_certificate",
                "placements_consistent": len(groups),
                "pairs_tested": pairs_tested,
                "surfaces_tested": len(surfaces),
                "max_product_distance": max_product_distance,
            }
        )
    return HierarchyLevel(level, witnesses, fraction, len(groups))


@dataclass(frozen=True)
class QuasiClassicalDecomposition:
    projectors: tuple[np.ndarray, ...]
    weights: tuple[float, ...]
    components: tuple[DensityOperator | None, ...]
    residual: float
    notes: tuple[str, ...] = ()

    def reconstruct(self) -> np.ndarray:
        return sum(w * c.matrix for w, c in zip(self.weights, self.components) if c is not None)


def quasi_classical_decompose(rho: DensityOperator, projectors: Sequence[np.ndarray]) -> QuasiClassicalDecomposition:
    """Split ``rho`` into weighted components, one per pointer subspace.

    ``residual`` is the Frobenius norm of the part of ``rho`` connecting
    different subspaces; zero means the state is exactly a convex sum of
    the components.
    """
    tol = settings.tol()
    projs = tuple(np.asarray(p, dtype=complex) for p in projectors)
    if not projs:
        raise DimensionError("no projectors given")
    eye = np.eye(rho.dim)
    if any(p.shape != (rho.dim, rho.dim) for p in projs):
        raise DimensionError("projector dimension does not match the state")
    if not np.allclose(sum(projs), eye, rtol=0, atol=tol):
        raise DimensionError("projectors do not sum to the identity")
    for i, a in enumerate(projs):
        for j, b in enumerate(projs):
            if not np.allclose(a @ b, a if i == j else 0 * a, rtol=0, atol=tol):
                raise DimensionError("projectors are not orthogonal idempotents")
    weights, components, notes = [], [], []
    block = np.zeros_like(rho.matrix)
    for k, p in enumerate(projs):
        piece = p @ rho.matrix @ p
        block += piece
        w = float(np.real(np.trace(piece)))
        weights.append(max(w, 0.0))
        if w < tol:
            components.append(None)
            notes.append(f"component {k} omitted: weight {w:.3g}")
        else:
            components.append(DensityOperator(piece / w, check=False))
    residual = float(np.linalg.norm(rho.matrix - block))
    return QuasiClassicalDecomposition(projs, tuple(weights), tuple(components), residual, tuple(notes))
