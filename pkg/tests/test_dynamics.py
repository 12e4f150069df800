import numpy as np
import pytest

from conftest import ket
from spacetime_states import settings
from spacetime_states.dynamics import (
    FRC,
    SPIN_FLIP,
    UNITARY,
    EventSchedule,
    GateSpec,
    MeasurementSpec,
    evolve_to,
    histories_equal,
    history_along,
    ordered,
    random_circuit,
    translate_region,
    translate_schedule,
    translate_surface,
    z_measurement,
)
from spacetime_states.errors import (
    BranchAnnihilatedError,
    DimensionError,
    FoliationError,
    LatticeError,
    PreconditionError,
)
from spacetime_states.lattice import Event, Foliation, Hypersurface, Lattice, Region, random_foliation
from spacetime_states.qstate import (
    StateVector,
    apply_operator,
    density_of,
    pure_distance,
    random_state,
    reduced_density,
    trace_distance,
)
from spacetime_states.regions import permute_factors
from spacetime_states.scenarios import EPRGeometry, EPRParams, epr_schedule, narratability_geometry, narratability_schedules

A, B = 0.6, 0.8j


def pair(psi, geom):
    return geom.pair_state(psi)


class TestEvolveTo:
    geom = EPRGeometry.build(2)

    def test_unitary_lambda2(self):
        s = epr_schedule(EPRParams(A, B), self.geom)
        psi, w = evolve_to(s, self.geom.surfaces["L2"])
        expected = density_of(StateVector(A * ket(1, 1) - B * ket(0, 0)))
        assert trace_distance(pair(psi, self.geom), expected) < 1e-12
        assert w == 1.0

    def test_collapse_lambda2(self):
        s = epr_schedule(EPRParams(A, B, mode=FRC, outcome=0), self.geom)
        psi, w = evolve_to(s, self.geom.surfaces["L2"])
        assert trace_distance(pair(psi, self.geom), density_of(StateVector(ket(0, 1)))) < 1e-12
        assert w == pytest.approx(abs(A) ** 2, abs=1e-12)

    def test_no_events(self, rng):
        lat = Lattice(3, 2)
        psi = random_state(8, rng)
        s = EventSchedule(lat, psi)
        for sigma in ([0, 0, 0], [1, 2, 2], [2, 2, 2]):
            out, w = evolve_to(s, Hypersurface(sigma))
            np.testing.assert_array_equal(out.amplitudes, psi.amplitudes)
            assert w == 1.0

    def test_straddling_surface_rejected(self, rng):
        lat = Lattice(2, 1)
        gate = GateSpec("cz", SPIN_FLIP.matrix.__class__(np.diag([1, 1, 1, -1]), unitary=True), arity=2)
        s = EventSchedule(lat, random_state(4, rng), [Event("g", (0, 1), 0, gate)])
        with pytest.raises(FoliationError):
            evolve_to(s, Hypersurface([1, 0]))

    def test_sampling_needs_rng(self):
        s = epr_schedule(EPRParams(A, B, mode=FRC, outcome=None))
        with pytest.raises(PreconditionError):
            evolve_to(s, Lattice(3, 2).flat(2))

    def test_zero_probability_branch(self):
        s = epr_schedule(EPRParams(1.0, 0.0, mode=FRC, outcome=1))
        with pytest.raises(BranchAnnihilatedError):
            evolve_to(s, Lattice(3, 2).flat(2))

    def test_measurement_needs_frc(self):
        with pytest.raises(ValueError):
            EventSchedule(Lattice(1, 1), StateVector([1, 0]), [Event("m", 0, 0, z_measurement(0))], UNITARY)

    def test_incomplete_measurement_rejected(self):
        with pytest.raises(DimensionError):
            MeasurementSpec("bad", (np.diag([1.0, 0.0]),))

    def test_tie_break(self):
        evs = [Event("b", 3, 0), Event("a", 1, 0), Event("c", 0, 1)]
        assert [e.id for e in ordered(evs)] == ["a", "b", "c"]


class TestHistories:
    def test_scenario_a_is_static(self, singlet):
        a, _ = narratability_schedules()
        lattice, flat, *_ = narratability_geometry()
        h = history_along(a, flat)
        geom = EPRGeometry.build(2)
        for psi in h.states:
            assert trace_distance(pair(psi, geom), density_of(singlet)) < 1e-12

    def test_scenario_b_flat(self, singlet):
        _, b = narratability_schedules()
        _, flat, *_ = narratability_geometry()
        geom = EPRGeometry.build(2)
        for psi in history_along(b, flat).states:
            assert trace_distance(pair(psi, geom), density_of(singlet)) < 1e-12

    def test_scenario_b_staircase(self, phi_plus):
        _, b = narratability_schedules()
        _, _, staircase, k = narratability_geometry()
        h = history_along(b, staircase)
        geom = EPRGeometry.build(2)
        assert trace_distance(pair(h.states[k], geom), density_of(phi_plus)) < 1e-12

    def test_equal_on_flat(self):
        a, b = narratability_schedules()
        _, flat, *_ = narratability_geometry()
        cmp = histories_equal(history_along(a, flat), history_along(b, flat))
        assert cmp.equal
        assert max(cmp.distances) < 1e-12

    def test_unequal_on_staircase(self):
        a, b = narratability_schedules()
        _, _, staircase, k = narratability_geometry()
        cmp = histories_equal(history_along(a, staircase), history_along(b, staircase))
        assert not cmp
        assert cmp.distances[k] == pytest.approx(1.0, abs=1e-12)

    def test_self_comparison(self, rng):
        s = random_circuit(Lattice(4, 3), rng)
        h = history_along(s, s.lattice.flat_foliation())
        cmp = histories_equal(h, h)
        assert cmp.equal and set(cmp.distances) == {0.0}

    def test_invalid_foliation_rejected(self, rng):
        s = random_circuit(Lattice(3, 2), rng)
        with pytest.raises(FoliationError):
            history_along(s, Foliation([[0, 0, 0], [2, 0, 0], [2, 2, 2]]))

    def test_measurement_applied_once(self):
        s = epr_schedule(EPRParams(A, B, mode=FRC, outcome=0))
        geom = EPRGeometry.build(2)
        h = history_along(s, geom.foliations["x1_first"])
        assert h.branch_weight == pytest.approx(abs(A) ** 2, abs=1e-12)
        assert h.weights == pytest.approx((1.0, 1.0, abs(A) ** 2, abs(A) ** 2), abs=1e-12)

    def test_history_matches_evolve_to(self, rng):
        for _ in range(20):
            s = random_circuit(Lattice(4, 3), rng)
            f = random_foliation(s.lattice, s.events, rng)
            h = history_along(s, f)
            for sigma, psi in zip(f, h.states):
                assert pure_distance(psi, evolve_to(s, sigma)[0]) < settings.tol()


class TestTranslation:
    def test_identity_shifts(self, rng):
        s = random_circuit(Lattice(5, 3, periodic=True), rng)
        for k in (0, 5, -5):
            t = translate_schedule(s, k)
            assert t.events == s.events
            np.testing.assert_array_equal(t.initial.amplitudes, s.initial.amplitudes)

    def test_requires_periodic(self, rng):
        with pytest.raises(LatticeError):
            translate_schedule(random_circuit(Lattice(3, 2), rng), 1)

    def test_covariance(self, rng):
        worst = 0.0
        for _ in range(100):
            n = int(rng.integers(3, 6))
            lat = Lattice(n, int(rng.integers(1, 4)), periodic=True)
            s = random_circuit(lat, rng)
            k = int(rng.integers(1, n))
            t = translate_schedule(s, k)
            f = random_foliation(lat, s.events, rng)
            sigma = f[int(rng.integers(len(f)))]
            region = Region(rng.choice(n, size=int(rng.integers(1, 3)), replace=False))
            before = reduced_density(evolve_to(s, sigma)[0], s.factorization, list(region))
            moved = translate_region(region, k, lat)
            after = reduced_density(evolve_to(t, translate_surface(sigma, k))[0], t.factorization, list(moved))
            # factor order of the moved region may wrap around; compare via sorted-site permutation
            order = [list(moved).index((j + k) % n) for j in region]
            worst = max(worst, trace_distance(before, permute_factors(after, [2] * len(order), order)))
        assert worst < 1e-10


class TestInvariants:
    def test_order_independence(self, rng):
        for _ in range(50):
            s = random_circuit(Lattice(5, 3), rng)
            sigma = s.lattice.flat(3)
            ref, _ = evolve_to(s, sigma)
            f = s.factorization
            amps = np.array(s.initial.amplitudes)
            for layer in range(3):
                evs = [e for e in s.events if e.layer == layer]
                for j in rng.permutation(len(evs)):
                    amps = apply_operator(evs[j].payload.matrix.matrix, amps, f, evs[j].sites)
            assert pure_distance(ref, StateVector(amps, check=False)) < settings.tol()

    def test_endpoint_foliation_independent(self, rng):
        for _ in range(30):
            s = random_circuit(Lattice(5, 3), rng)
            f1 = random_foliation(s.lattice, s.events, rng)
            f2 = random_foliation(s.lattice, s.events, rng)
            assert pure_distance(history_along(s, f1).states[-1], history_along(s, f2).states[-1]) < settings.tol()

    def test_frc_endpoint_foliation_independent(self):
        geom = EPRGeometry.build(2)
        for outcome in (0, 1):
            s = epr_schedule(EPRParams(A, B, mode=FRC, outcome=outcome), geom)
            finals = [history_along(s, f) for f in geom.foliations.values()]
            for h in finals[1:]:
                assert pure_distance(h.states[-1], finals[0].states[-1]) < 1e-12
                assert h.branch_weight == pytest.approx(finals[0].branch_weight, abs=1e-12)

    def test_unitary_norm(self, rng):
        for _ in range(30):
            s = random_circuit(Lattice(5, 4), rng)
            for psi in history_along(s, random_foliation(s.lattice, s.events, rng)).states:
                assert abs(psi.norm - 1.0) < settings.norm_tol()

    def test_frc_weights_are_born_products(self, rng):
        lat = Lattice(3, 2)
        for _ in range(20):
            psi = random_state(8, rng)
            s = EventSchedule(lat, psi, [Event("m0", 0, 0, z_measurement()), Event("m2", 2, 1, z_measurement())], FRC)
            h = history_along(s, lat.flat_foliation(), rng=rng)
            o0, o2 = h.outcomes["m0"], h.outcomes["m2"]
            p = reduced_density(psi, s.factorization, [0, 2]).matrix
            expected = p[2 * o0 + o2, 2 * o0 + o2].real
            assert h.branch_weight == pytest.approx(expected, abs=1e-12)
            assert abs(h.states[-1].norm - 1.0) < settings.norm_tol()

    def test_born_frequencies(self):
        s = epr_schedule(EPRParams(np.sqrt(0.3), np.sqrt(0.7), mode=FRC, outcome=None))
        geom = EPRGeometry.build(2)
        rng = np.random.default_rng(7)
        hits = sum(history_along(s, geom.foliations["flat"], rng=rng).outcomes["X1"] == 0 for _ in range(2000))
        assert abs(hits / 2000 - 0.3) < 0.04
