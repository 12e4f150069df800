"""Worked examples: the EPR pair, the narratability pair of scenarios, Coleman-Hepp.

Each builder returns a report object carrying the computed states plus a
list of :class:`~spacetime_states.report.Check` records comparing them to
closed-form expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import settings
from .dynamics import (
    FRC,
    SPIN_FLIP,
    UNITARY,
    EventSchedule,
    GateSpec,
    StateHistory,
    evolve_to,
    histories_equal,
    history_along,
    z_measurement,
)
from .errors import DimensionError, InvalidStateError
from .lattice import Event, Foliation, Hypersurface, Lattice, Region
from .qstate import (
    DensityOperator,
    LinearOperator,
    StateVector,
    TensorFactorization,
    density_of,
    pure_distance,
    reduced_density,
    trace_distance,
)
from .regions import (
    ConsistencyReport,
    HierarchyLevel,
    QuasiClassicalDecomposition,
    classify_hierarchy,
    foliation_consistency,
    quasi_classical_decompose,
)
from .report import Check


def _check_amplitudes(x: complex, y: complex) -> None:
    if abs(abs(x) ** 2 + abs(y) ** 2 - 1.0) > settings.norm_tol():
        raise InvalidStateError(f"amplitudes ({x}, {y}) are not normalized")


def _ket(*bits: int) -> np.ndarray:
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int("".join(map(str, bits)), 2)] = 1.0
    return v


# --------------------------------------------------------------------------
# EPR pair with events at X1 and X2


@dataclass(frozen=True)
class EPRParams:
    alpha: complex = 1 / math.sqrt(2)
    beta: complex = 1 / math.sqrt(2)
    separation: int = 2
    mode: str = UNITARY
    outcome: int | None = 0

    def __post_init__(self):
        _check_amplitudes(self.alpha, self.beta)
        if self.separation < 2:
            raise DimensionError("particles must be at least two sites apart")
        if self.mode not in (UNITARY, FRC):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.outcome is not None and self.outcome not in (0, 1):
            raise ValueError("outcome must be 0, 1 or None (sampled)")


@dataclass(frozen=True)
class EPRGeometry:
    """Lattice, surfaces and foliations for two particles ``separation`` sites apart.

    Particle 1 sits on site 0, particle 2 on site ``separation``; sites in
    between are spectators in ``|0>``. X1 and X2 act at layer 1.
    """

    lattice: Lattice
    p1: Region
    p2: Region
    surfaces: dict
    foliations: dict

    @classmethod
    def build(cls, separation: int = 2) -> "EPRGeometry":
        n = separation + 1
        lattice = Lattice(n, 2)
        raised1 = [2] + [1] * (n - 1)
        raised2 = [1] * (n - 1) + [2]
        surfaces = {
            "L0": lattice.flat(0),
            "L1": lattice.flat(1),
            "L2": Hypersurface(raised1),
            "L3": Hypersurface(raised2),
            "L4": lattice.flat(2),
        }
        s = surfaces
        foliations = {
            "flat": Foliation([s["L0"], s["L1"], s["L4"]]),
            "x1_first": Foliation([s["L0"], s["L1"], s["L2"], s["L4"]]),
            "x2_first": Foliation([s["L0"], s["L1"], s["L3"], s["L4"]]),
        }
        return cls(lattice, Region([0]), Region([separation]), surfaces, foliations)

    def spacetime_regions(self) -> dict:
        """Particle regions at cut values 0 (R), 1 (S) and 2 (T), with their containing surfaces."""
        out = {}
        for label, region in (("1", self.p1), ("2", self.p2)):
            site = region.sites[0]
            for name, value in (("R", 0), ("S", 1), ("T", 2)):
                names = [k for k, s in self.surfaces.items() if s[site] == value]
                out[name + label] = (region, names)
        return out

    def pair_state(self, psi: StateVector) -> DensityOperator:
        return reduced_density(psi, TensorFactorization.uniform(self.lattice.n_sites), [self.p1.sites[0], self.p2.sites[0]])


def epr_initial(p: EPRParams, geom: EPRGeometry) -> StateVector:
    """``alpha |0>|1> + beta |1>|0>`` on the two particle sites, spectators in ``|0>``."""
    n = geom.lattice.n_sites
    amps = np.zeros(2 ** n, dtype=complex)
    i, j = geom.p1.sites[0], geom.p2.sites[0]

    def index(b1: int, b2: int) -> int:
        bits = [0] * n
        bits[i], bits[j] = b1, b2
        return int("".join(map(str, bits)), 2)

    amps[index(0, 1)] = p.alpha
    amps[index(1, 0)] = p.beta
    return StateVector(amps)


def epr_schedule(p: EPRParams, geom: EPRGeometry | None = None) -> EventSchedule:
    geom = geom or EPRGeometry.build(p.separation)
    if p.mode == UNITARY:
        x1, x2 = SPIN_FLIP, SPIN_FLIP
    else:
        x1 = z_measurement(p.outcome, "measure_1")
        x2 = z_measurement(None if p.outcome is None else 1 - p.outcome, "measure_2")
    events = [Event("X1", geom.p1.sites, 1, x1), Event("X2", geom.p2.sites, 1, x2)]
    return EventSchedule(geom.lattice, epr_initial(p, geom), events, p.mode)


def epr_closed_forms(p: EPRParams, outcome: int | None = None) -> tuple[dict, dict]:
    """Expected pair states per surface and particle states per spacetime region."""
    a, b = p.alpha, p.beta
    pa, pb = abs(a) ** 2, abs(b) ** 2
    psi1 = a * _ket(0, 1) + b * _ket(1, 0)
    diag = lambda x, y: DensityOperator.diagonal([x, y])  # noqa: E731
    if p.mode == UNITARY:
        pairs = {
            "L0": psi1,
            "L1": psi1,
            "L2": a * _ket(1, 1) - b * _ket(0, 0),
            "L3": -a * _ket(0, 0) + b * _ket(1, 1),
            "L4": -a * _ket(1, 0) - b * _ket(0, 1),
        }
        regions = {
            "R1": {"L0": diag(pa, pb)},
            "S1": {"L1": diag(pa, pb), "L3": diag(pa, pb)},
            "T1": {"L2": diag(pb, pa), "L4": diag(pb, pa)},
            "R2": {"L0": diag(pb, pa)},
            "S2": {"L1": diag(pb, pa), "L2": diag(pb, pa)},
            "T2": {"L3": diag(pa, pb), "L4": diag(pa, pb)},
        }
    else:
        o = p.outcome if outcome is None else outcome
        collapsed = _ket(o, 1 - o)
        pure1, pure2 = diag(1 - o, o), diag(o, 1 - o)
        pairs = {"L0": psi1, "L1": psi1, "L2": collapsed, "L3": collapsed, "L4": collapsed}
        regions = {
            "R1": {"L0": diag(pa, pb)},
            "S1": {"L1": diag(pa, pb), "L3": pure1},
            "T1": {"L2": pure1, "L4": pure1},
            "R2": {"L0": diag(pb, pa)},
            "S2": {"L1": diag(pb, pa), "L2": pure2},
            "T2": {"L3": pure2, "L4": pure2},
        }
    return {k: density_of(StateVector(v)) for k, v in pairs.items()}, regions


@dataclass
class EPRReport:
    params: EPRParams
    geometry: EPRGeometry
    schedule: EventSchedule
    pair_states: dict
    branch_weights: dict
    region_states: dict
    consistency: dict
    hierarchy: HierarchyLevel
    outcomes: dict
    checks: list[Check] = field(default_factory=list)

    @property
    def branch_weight(self) -> float:
        return self.branch_weights["L4"]

    def to_results(self) -> dict:
        return {
            "branch_weight": self.branch_weight,
            "consistency": {
                name: {
                    "classes": [{"state": rho, "surface": s} for s, rho in rep.distinct_states],
                    "consistent": rep.consistent,
                    "surfaces_tested": rep.surfaces_tested,
                }
                for name, rep in self.consistency.items()
            },
            "hierarchy": hierarchy_dict(self.hierarchy),
            "outcomes": {str(k): v for k, v in sorted(self.outcomes.items())},
            "pair_states": self.pair_states,
            "region_states": self.region_states,
            "surfaces": self.geometry.surfaces,
        }


def hierarchy_dict(h: HierarchyLevel) -> dict:
    return {
        "level": h.level,
        "nihilism_fraction": h.nihilism_fraction,
        "regions_tested": h.regions_tested,
        "witnesses": h.witnesses,
    }


def epr_scenario(p: EPRParams, rng=None) -> EPRReport:
    """Run the two-particle scenario on every surface and region of the figure."""
    geom = EPRGeometry.build(p.separation)
    schedule = epr_schedule(p, geom)
    tol = settings.tol()

    outcomes: dict = {}
    if p.mode == FRC and p.outcome is None:
        # sample once along the X1-first foliation, then pin for every surface
        outcomes = history_along(schedule, geom.foliations["x1_first"], rng=rng).outcomes

    pair_states, weights = {}, {}
    for name, sigma in geom.surfaces.items():
        psi, w = evolve_to(schedule, sigma, outcomes=outcomes)
        pair_states[name] = geom.pair_state(psi)
        weights[name] = w

    region_states, consistency = {}, {}
    for name, (region, surface_names) in geom.spacetime_regions().items():
        region_states[name] = {}
        for sname in surface_names:
            psi, _ = evolve_to(schedule, geom.surfaces[sname], outcomes=outcomes)
            region_states[name][sname] = reduced_density(psi, schedule.factorization, region.sites)
        consistency[name] = foliation_consistency(
            schedule, region, [geom.surfaces[s] for s in surface_names], outcomes=outcomes
        )

    hierarchy = classify_hierarchy(
        schedule, [geom.p1, geom.p2], list(geom.foliations.values()), outcomes=outcomes
    )
    realized = outcomes.get("X1", p.outcome)
    report = EPRReport(p, geom, schedule, pair_states, weights, region_states, consistency, hierarchy, outcomes)

    exp_pairs, exp_regions = epr_closed_forms(p, realized)
    for name, expected in exp_pairs.items():
        d = trace_distance(pair_states[name], expected)
        report.checks.append(Check.within(f"pair_state[{name}]", expected, pair_states[name], d, tol))
    for name, per_surface in exp_regions.items():
        for sname, expected in per_surface.items():
            actual = region_states[name][sname]
            d = trace_distance(actual, expected)
            report.checks.append(Check.within(f"region_state[{name}@{sname}]", expected, actual, d, tol))
    if p.mode == UNITARY:
        report.checks.append(Check.within("branch_weight", 1.0, report.branch_weight, abs(report.branch_weight - 1.0), tol))
        for name, rep in consistency.items():
            report.checks.append(
                Check(f"consistent[{name}]", 1, len(rep.distinct_states), float(len(rep.distinct_states) - 1), rep.consistent)
            )
    else:
        expected_w = abs(p.alpha) ** 2 if realized == 0 else abs(p.beta) ** 2
        report.checks.append(
            Check.within("branch_weight", expected_w, report.branch_weight, abs(report.branch_weight - expected_w), tol)
        )
        rep = consistency["S2"]
        expected = [exp_regions["S2"]["L1"], exp_regions["S2"]["L2"]]
        found = [rho for _, rho in rep.distinct_states]
        if len(found) == 2:
            d = max(min(trace_distance(e, f) for f in found) for e in expected)
        else:
            d = math.inf
        report.checks.append(Check("contextuality[S2]", expected, found, d, len(found) == 2 and d < tol))
    return report


# --------------------------------------------------------------------------
# Narratability: same flat-foliation history, different staircase history

SINGLET = (1 / math.sqrt(2), -1 / math.sqrt(2))


def narratability_geometry(separation: int = 2, n_layers: int = 2, flip_layer: int = 1):
    if not 0 <= flip_layer < n_layers:
        raise DimensionError("flip layer must lie inside the lattice")
    lattice = Lattice(separation + 1, n_layers)
    flat = lattice.flat_foliation()
    n = lattice.n_sites
    k = flip_layer
    step = Hypersurface([k + 1] + [k] * (n - 1))
    staircase = Foliation(
        [lattice.flat(j) for j in range(k + 1)] + [step] + [lattice.flat(j) for j in range(k + 1, n_layers + 1)]
    )
    return lattice, flat, staircase, k + 1


def narratability_schedules(separation: int = 2, n_layers: int = 2, flip_layer: int = 1):
    lattice, *_ = narratability_geometry(separation, n_layers, flip_layer)
    geom = EPRGeometry(lattice, Region([0]), Region([separation]), {}, {})
    initial = epr_initial(EPRParams(*SINGLET, separation=separation), geom)
    a = EventSchedule(lattice, initial, [], UNITARY)
    b = a.with_events(
        [Event("X1", (0,), flip_layer, SPIN_FLIP), Event("X2", (separation,), flip_layer, SPIN_FLIP)]
    )
    return a, b


@dataclass
class NarratabilityReport:
    scenario_a: dict
    scenario_b: dict
    flat_distances: tuple
    staircase_distances: tuple
    flat_equal: bool
    staircase_equal: bool
    divergent_surface: int
    divergent_state: DensityOperator
    final_distance: float
    checks: list[Check] = field(default_factory=list)

    def to_results(self) -> dict:
        return {
            "divergent_state": self.divergent_state,
            "divergent_surface": self.divergent_surface,
            "final_distance": self.final_distance,
            "flat_distances": list(self.flat_distances),
            "flat_equal": self.flat_equal,
            "staircase_distances": list(self.staircase_distances),
            "staircase_equal": self.staircase_equal,
        }


def narratability_demo(separation: int = 2, n_layers: int = 2, flip_layer: int = 1) -> NarratabilityReport:
    """Compare a do-nothing history with a double spin flip on the singlet."""
    tol = settings.tol()
    lattice, flat, staircase, step_index = narratability_geometry(separation, n_layers, flip_layer)
    sa, sb = narratability_schedules(separation, n_layers, flip_layer)
    ha_flat, hb_flat = history_along(sa, flat), history_along(sb, flat)
    ha_st, hb_st = history_along(sa, staircase), history_along(sb, staircase)
    flat_cmp = histories_equal(ha_flat, hb_flat)
    st_cmp = histories_equal(ha_st, hb_st)
    f = TensorFactorization.uniform(lattice.n_sites)
    pair = [0, separation]
    divergent = reduced_density(hb_st.states[step_index], f, pair)
    final = pure_final_distance(hb_flat, ha_flat)

    report = NarratabilityReport(
        {"flat": ha_flat, "staircase": ha_st},
        {"flat": hb_flat, "staircase": hb_st},
        flat_cmp.distances,
        st_cmp.distances,
        flat_cmp.equal,
        st_cmp.equal,
        step_index,
        divergent,
        final,
    )
    phi_plus = density_of(StateVector((_ket(1, 1) + _ket(0, 0)) / math.sqrt(2)))
    report.checks.append(
        Check.within("flat_histories_equal", 0.0, max(flat_cmp.distances), max(flat_cmp.distances), tol)
    )
    gap = st_cmp.distances[step_index]
    report.checks.append(Check.within("staircase_divergence", 1.0, gap, abs(gap - 1.0), tol))
    report.checks.append(
        Check.within("divergent_state_phi_plus", phi_plus, divergent, trace_distance(divergent, phi_plus), tol)
    )
    others = max(d for k, d in enumerate(st_cmp.distances) if k != step_index)
    report.checks.append(Check.within("staircase_other_surfaces_equal", 0.0, others, others, tol))
    report.checks.append(Check.within("final_states_agree", 0.0, final, final, tol))
    return report


def pure_final_distance(h1: StateHistory, h2: StateHistory) -> float:
    return histories_equal(h1, h2).distances[-1]


# --------------------------------------------------------------------------
# Coleman-Hepp chain

# Per-region occupation states |n_up, n_down>; a subset of the two-mode Fock basis.
CH_BASIS = ((1, 0), (0, 1), (2, 0), (1, 1))
CH_INDEX = {occ: i for i, occ in enumerate(CH_BASIS)}
MAX_CH_DIM = 4**10


def _hop_gate() -> GateSpec:
    """Moving spin passes from region k to k+1, flipping region k's qubit if it is down.

    |2,0>|1,0> <-> |1,0>|2,0>   (spin up: qubit k untouched)
    |1,1>|1,0> <-> |0,1>|1,1>   (spin down: qubit k flipped)
    """
    perm = np.eye(16, dtype=complex)
    for (x, y), (u, v) in [(((2, 0), (1, 0)), ((1, 0), (2, 0))), (((1, 1), (1, 0)), ((0, 1), (1, 1)))]:
        i = 4 * CH_INDEX[x] + CH_INDEX[y]
        j = 4 * CH_INDEX[u] + CH_INDEX[v]
        perm[[i, j]] = perm[[j, i]]
    return GateSpec("pass_and_cnot", LinearOperator(perm, unitary=True), arity=2)


HOP = _hop_gate()


@dataclass(frozen=True)
class ColemanHeppParams:
    n: int = 3
    a: complex = 1 / math.sqrt(2)
    b: complex = 1 / math.sqrt(2)

    def __post_init__(self):
        if self.n < 2:
            raise DimensionError("the chain needs at least two regions")
        _check_amplitudes(self.a, self.b)
        if 4**self.n > MAX_CH_DIM:
            raise DimensionError(f"chain of {self.n} regions exceeds the dimension budget {MAX_CH_DIM}")


def ch_product(occupations) -> np.ndarray:
    v = np.ones(1, dtype=complex)
    for occ in occupations:
        e = np.zeros(4, dtype=complex)
        e[CH_INDEX[tuple(occ)]] = 1.0
        v = np.kron(v, e)
    return v


def ch_closed_form(p: ColemanHeppParams, k: int) -> StateVector:
    """State with the moving spin at region ``k`` (0-based) and regions before it recorded."""
    up = [(1, 0)] * k + [(2, 0)] + [(1, 0)] * (p.n - k - 1)
    down = [(0, 1)] * k + [(1, 1)] + [(1, 0)] * (p.n - k - 1)
    return StateVector(p.a * ch_product(up) + p.b * ch_product(down))


def ch_schedule(p: ColemanHeppParams) -> EventSchedule:
    lattice = Lattice(p.n, p.n - 1, local_dim=4)
    events = [Event(f"pass{k}", (k, k + 1), k, HOP) for k in range(p.n - 1)]
    return EventSchedule(lattice, ch_closed_form(p, 0), events)


def magnetization_projectors(n_sites: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All-up, all-down and everything-else projectors on ``n_sites`` recorded qubits."""
    dim = 2**n_sites
    up = np.zeros((dim, dim), dtype=complex)
    up[0, 0] = 1.0
    down = np.zeros((dim, dim), dtype=complex)
    down[-1, -1] = 1.0
    return up, down, np.eye(dim) - up - down


def qubit_restriction(psi: StateVector, n: int, sites) -> tuple[StateVector, TensorFactorization]:
    """Restrict ``sites`` to their ``|1,0>, |0,1>`` qubit subspace; raises if weight is lost."""
    t = psi.amplitudes.reshape([4] * n)
    index = tuple(slice(0, 2) if i in sites else slice(None) for i in range(n))
    sub = t[index]
    if abs(np.linalg.norm(sub) - 1.0) > settings.norm_tol():
        raise InvalidStateError("state has weight outside the recorded-qubit subspace")
    dims = [2 if i in sites else 4 for i in range(n)]
    return StateVector(sub.reshape(-1), check=False), TensorFactorization(dims)


@dataclass
class ColemanHeppReport:
    params: ColemanHeppParams
    states: list
    rho_a: DensityOperator
    decomposition: QuasiClassicalDecomposition
    checks: list[Check] = field(default_factory=list)

    @property
    def weights(self) -> tuple[float, float]:
        return self.decomposition.weights[0], self.decomposition.weights[1]

    def to_results(self) -> dict:
        return {
            "decoherence_residual": self.decomposition.residual,
            "notes": list(self.decomposition.notes),
            "region_a": list(range(self.params.n - 1)),
            "weights": {
                "all_down": self.decomposition.weights[1],
                "all_up": self.decomposition.weights[0],
                "intermediate": self.decomposition.weights[2],
            },
        }


def coleman_hepp(p: ColemanHeppParams) -> ColemanHeppReport:
    """Evolve the chain, reduce to the recorded regions and split by magnetization."""
    tol = settings.tol()
    schedule = ch_schedule(p)
    states = [evolve_to(schedule, schedule.lattice.flat(k))[0] for k in range(p.n)]
    a_sites = list(range(p.n - 1))
    restricted, f = qubit_restriction(states[-1], p.n, a_sites)
    rho_a = reduced_density(restricted, f, a_sites)
    dec = quasi_classical_decompose(rho_a, magnetization_projectors(len(a_sites)))
    report = ColemanHeppReport(p, states, rho_a, dec)

    labels = {0: "t0", 1: "t1", p.n - 1: "tn"}
    for k, label in sorted(labels.items()):
        expected = ch_closed_form(p, k)
        d = pure_distance(states[k], expected)
        overlap = abs(states[k].inner(expected))
        report.checks.append(Check.within(f"state[{label}]", 1.0, overlap, d, tol))
    wa, wb = abs(p.a) ** 2, abs(p.b) ** 2
    up, down, mid = dec.weights
    report.checks.append(Check.within("weight_all_up", wa, up, abs(up - wa), tol))
    report.checks.append(Check.within("weight_all_down", wb, down, abs(down - wb), tol))
    report.checks.append(Check.within("weight_intermediate", 0.0, mid, mid, tol))
    report.checks.append(Check.within("decoherence_residual", 0.0, dec.residual, dec.residual, tol))
    return report


# --------------------------------------------------------------------------
# Classification presets

PRODUCT_CONTROL = "product-control"
PRESETS = ("epr-unitary", "epr-collapse", PRODUCT_CONTROL)

HADAMARD = GateSpec("hadamard", LinearOperator(np.array([[1, 1], [1, -1]]) / math.sqrt(2), unitary=True))


def product_control() -> tuple[EventSchedule, list[Region], list[Foliation]]:
    """Three sites, product input, only one-site gates."""
    lattice = Lattice(3, 2)
    plus = np.array([1, 1]) / math.sqrt(2)
    initial = StateVector.product([1, 0], plus, [0, 1])
    events = [
        Event("h0", (0,), 0, HADAMARD),
        Event("f2", (2,), 0, SPIN_FLIP),
        Event("f1", (1,), 1, SPIN_FLIP),
        Event("h2", (2,), 1, HADAMARD),
    ]
    schedule = EventSchedule(lattice, initial, events)
    foliations = [
        lattice.flat_foliation(),
        Foliation([[0, 0, 0], [1, 0, 0], [1, 1, 1], [2, 1, 1], [2, 2, 2]]),
        Foliation([[0, 0, 0], [0, 0, 1], [1, 1, 1], [1, 1, 2], [2, 2, 2]]),
    ]
    return schedule, [Region([i]) for i in range(3)], foliations


def preset(name: str, alpha: complex = 1 / math.sqrt(2), beta: complex = 1 / math.sqrt(2), outcome: int = 0):
    """Schedule, regions and foliations of a named classification preset."""
    if name == PRODUCT_CONTROL:
        return product_control()
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {PRESETS}")
    mode = UNITARY if name == "epr-unitary" else FRC
    p = EPRParams(alpha, beta, mode=mode, outcome=outcome)
    geom = EPRGeometry.build(p.separation)
    return epr_schedule(p, geom), [geom.p1, geom.p2], list(geom.foliations.values())


def classify_preset(name: str, **kwargs) -> HierarchyLevel:
    schedule, regions, foliations = preset(name, **kwargs)
    return classify_hierarchy(schedule, regions, foliations)


# --------------------------------------------------------------------------
# Fock-space factorization suite


def fock_partitions(max_dim: int = 200, max_regions: int = 3, max_modes: int = 3, max_cutoff: int = 3):
    """Ordered partitions whose region-product space has dimension at most ``max_dim``."""
    import itertools

    from .fock import RegionPartition, TruncatedFockSpace

    out = []
    for k in range(1, max_regions + 1):
        for modes in itertools.product(range(1, max_modes + 1), repeat=k):
            for cutoff in range(max_cutoff + 1):
                product_dim = math.prod(math.comb(d + cutoff, cutoff) for d in modes)
                if product_dim <= max_dim:
                    out.append(TruncatedFockSpace(RegionPartition(list(range(k)), modes), cutoff))
    return out


@dataclass
class FockCheckReport:
    spaces_tested: int
    isometry_error: float
    image_mismatches: int
    number_error: float
    commutator_norm: float
    checks: list[Check] = field(default_factory=list)

    def to_results(self) -> dict:
        return {
            "commutator_norm": self.commutator_norm,
            "image_mismatches": self.image_mismatches,
            "isometry_error": self.isometry_error,
            "number_error": self.number_error,
            "spaces_tested": self.spaces_tested,
        }


def fock_check(max_dim: int = 200) -> FockCheckReport:
    """Exhaustive isometry, number-conservation and commutation checks over small partitions."""
    from .fock import (
        RegionFactorization,
        creation_operator,
        number_sector_projector,
        total_number_operator,
    )

    iso_err = num_err = comm = 0.0
    mismatches = 0
    spaces = fock_partitions(max_dim)
    for space in spaces:
        iso = RegionFactorization(space)
        v = iso.isometry
        gram = v.conj().T @ v
        iso_err = max(iso_err, float(np.max(np.abs(gram - np.eye(space.dim)))))
        # image must be exactly the product states with total <= cutoff
        totals = np.zeros(iso.factorization.dims, dtype=int)
        for axis, fs in enumerate(iso.factor_spaces):
            shape = [1] * len(iso.factorization.dims)
            shape[axis] = fs.dim
            totals = totals + np.array([sum(o) for o in fs.basis]).reshape(shape)
        expected = set(np.flatnonzero(totals.reshape(-1) <= space.cutoff).tolist())
        image = set(iso.image_index.tolist())
        mismatches += len(expected ^ image) + (space.dim - len(image))
        n_sum = sum(iso.product_number_operator(r).matrix for r in space.partition.regions)
        n_joint = total_number_operator(space).matrix
        num_err = max(num_err, float(np.max(np.abs(n_sum @ v - v @ n_joint))))
        if space.cutoff >= 2:
            safe = number_sector_projector(space, space.cutoff - 2)
            part = space.partition
            for m in range(part.n_modes):
                for m2 in range(m + 1, part.n_modes):
                    if part.region_of_mode(m) == part.region_of_mode(m2):
                        continue
                    a, b = creation_operator(space, m).matrix, creation_operator(space, m2).matrix
                    comm = max(comm, float(np.linalg.norm((a @ b - b @ a) @ safe, 2)))
    report = FockCheckReport(len(spaces), iso_err, mismatches, num_err, comm)
    report.checks.append(Check.within("isometry", 0.0, iso_err, iso_err, 1e-12))
    report.checks.append(Check("image_is_truncated_sector", 0, mismatches, float(mismatches), mismatches == 0))
    report.checks.append(Check.within("number_conservation", 0.0, num_err, num_err, settings.tol()))
    report.checks.append(Check.within("cross_region_commutator", 0.0, comm, comm, settings.tol()))
    return report
