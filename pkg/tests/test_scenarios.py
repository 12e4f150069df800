import math

import numpy as np
import pytest

from conftest import ket
from spacetime_states import settings
from spacetime_states.dynamics import FRC
from spacetime_states.errors import DimensionError
from spacetime_states.qstate import (
    DensityOperator,
    StateVector,
    TensorFactorization,
    density_of,
    reduced_density,
    trace_distance,
)
from spacetime_states.regions import CONTEXTUALITY, FULL_LOCALITY, NON_SEPARABILITY, quasi_classical_decompose
from spacetime_states.scenarios import (
    HOP,
    PRESETS,
    ColemanHeppParams,
    EPRParams,
    ch_closed_form,
    ch_product,
    classify_preset,
    coleman_hepp,
    epr_scenario,
    fock_check,
    magnetization_projectors,
    narratability_demo,
)


def random_pair(rng):
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    return tuple(z / np.linalg.norm(z))


def diag(*p):
    return DensityOperator.diagonal(p)


class TestEPR:
    def test_unitary_t2(self):
        a, b = 0.6, 0.8j
        rep = epr_scenario(EPRParams(a, b))
        for sname in ("L3", "L4"):
            assert trace_distance(rep.region_states["T2"][sname], diag(0.36, 0.64)) < 1e-12

    def test_unitary_lambda3(self):
        a, b = 0.6, 0.8j
        rep = epr_scenario(EPRParams(a, b))
        expected = density_of(StateVector(-a * ket(0, 0) + b * ket(1, 1)))
        assert trace_distance(rep.pair_states["L3"], expected) < 1e-12

    def test_collapse_branch(self):
        a, b = 0.6, 0.8j
        rep = epr_scenario(EPRParams(a, b, mode=FRC, outcome=0))
        target = density_of(StateVector(ket(0, 1)))
        for sname in ("L2", "L3", "L4"):
            assert trace_distance(rep.pair_states[sname], target) < 1e-12
        assert rep.branch_weight == pytest.approx(0.36, abs=1e-12)

    def test_all_checks_pass(self, rng):
        for _ in range(5):
            a, b = random_pair(rng)
            for p in (EPRParams(a, b), EPRParams(a, b, mode=FRC, outcome=0), EPRParams(a, b, mode=FRC, outcome=1)):
                rep = epr_scenario(p)
                assert all(c.passed for c in rep.checks), [c.name for c in rep.checks if not c.passed]

    def test_unitary_regions_consistent(self):
        rep = epr_scenario(EPRParams(0.6, 0.8))
        assert all(r.consistent for r in rep.consistency.values())
        assert len(rep.consistency) == 6

    def test_collapse_only_s_regions_inconsistent(self):
        rep = epr_scenario(EPRParams(0.6, 0.8, mode=FRC))
        bad = sorted(k for k, r in rep.consistency.items() if not r.consistent)
        assert bad == ["S1", "S2"]
        assert rep.hierarchy.level == CONTEXTUALITY

    def test_sampled_outcome(self):
        rep = epr_scenario(EPRParams(0.6, 0.8, mode=FRC, outcome=None), rng=np.random.default_rng(3))
        assert set(rep.outcomes) == {"X1", "X2"}
        assert rep.outcomes["X2"] == 1 - rep.outcomes["X1"]
        assert all(c.passed for c in rep.checks)

    def test_wider_separation(self):
        rep = epr_scenario(EPRParams(0.6, 0.8, separation=4))
        assert all(c.passed for c in rep.checks)

    def test_bad_params(self):
        with pytest.raises(ValueError):
            EPRParams(1.0, 1.0)
        with pytest.raises(DimensionError):
            EPRParams(separation=1)


class TestNarratability:
    def test_default(self, phi_plus):
        rep = narratability_demo()
        assert rep.flat_equal and not rep.staircase_equal
        assert rep.staircase_distances[rep.divergent_surface] == pytest.approx(1.0, abs=1e-12)
        assert trace_distance(rep.divergent_state, density_of(phi_plus)) < 1e-12
        assert rep.final_distance < 1e-12
        assert all(c.passed for c in rep.checks)

    @pytest.mark.parametrize("n_layers,flip_layer", [(1, 0), (3, 0), (3, 1), (3, 2), (5, 4)])
    def test_flat_equal_wherever_flips_sit(self, n_layers, flip_layer):
        rep = narratability_demo(2, n_layers, flip_layer)
        assert max(rep.flat_distances) < settings.tol()
        assert all(c.passed for c in rep.checks)

    def test_profile_has_single_divergence(self):
        rep = narratability_demo(3, 3, 1)
        big = [k for k, d in enumerate(rep.staircase_distances) if d > 0.5]
        assert big == [rep.divergent_surface]


def cnot_chain_oracle(a, b, n):
    """Pointer qubits 0..n-2 plus the spin qubit, each pointer CNOT-ed by the spin."""
    m = n - 1
    psi = np.zeros(2 ** (m + 1), dtype=complex)
    psi[0] = a  # pointers |0..0>, spin up
    psi[1] = b  # pointers |0..0>, spin down
    t = psi.reshape([2] * (m + 1))
    for k in range(m):
        t = t.copy()
        sl = [slice(None)] * (m + 1)
        sl[m] = 1
        sub = t[tuple(sl)]
        t[tuple(sl)] = np.flip(sub, axis=k)
    flat = t.reshape(-1, 2)
    return flat @ flat.conj().T  # pointer density matrix


class TestColemanHepp:
    def test_hop_is_permutation(self):
        u = HOP.matrix.matrix
        np.testing.assert_array_equal(u @ u, np.eye(16))
        assert sorted(np.flatnonzero(np.diag(u) == 0).tolist()) == [2, 7, 8, 12]

    def test_closed_form_t0(self):
        s = 1 / math.sqrt(2)
        expected = s * (ch_product([(2, 0), (1, 0), (1, 0)]) + ch_product([(1, 1), (1, 0), (1, 0)]))
        np.testing.assert_allclose(ch_closed_form(ColemanHeppParams(3), 0).amplitudes, expected)

    @pytest.mark.parametrize("n", [2, 3, 5, 8])
    def test_equal_amplitudes(self, n):
        rep = coleman_hepp(ColemanHeppParams(n))
        assert all(c.passed for c in rep.checks)
        up, down = rep.weights
        assert up == pytest.approx(0.5, abs=1e-12) and down == pytest.approx(0.5, abs=1e-12)
        assert rep.decomposition.residual < 1e-12

    def test_t1_display(self):
        rep = coleman_hepp(ColemanHeppParams(4))
        s = 1 / math.sqrt(2)
        expected = s * (
            ch_product([(1, 0), (2, 0), (1, 0), (1, 0)]) + ch_product([(0, 1), (1, 1), (1, 0), (1, 0)])
        )
        assert abs(np.vdot(expected, rep.states[1].amplitudes)) == pytest.approx(1.0, abs=1e-12)

    def test_general_amplitudes_against_qubit_oracle(self, rng):
        for n in (2, 3, 5):
            for _ in range(5):
                a, b = random_pair(rng)
                rep = coleman_hepp(ColemanHeppParams(n, a, b))
                oracle = DensityOperator(cnot_chain_oracle(a, b, n))
                assert trace_distance(rep.rho_a, oracle) < 1e-12
                dec = quasi_classical_decompose(oracle, magnetization_projectors(n - 1))
                np.testing.assert_allclose(rep.weights, dec.weights[:2], atol=1e-12)
                np.testing.assert_allclose(rep.weights, (abs(a) ** 2, abs(b) ** 2), atol=1e-12)

    def test_definite_spin_stays_product(self):
        p = ColemanHeppParams(4, 1.0, 0.0)
        rep = coleman_hepp(p)
        f = TensorFactorization([4] * 4)
        for psi in rep.states:
            for k in range(4):
                assert reduced_density(psi, f, [k]).purity() == pytest.approx(1.0, abs=1e-12)

    def test_budget(self):
        with pytest.raises(DimensionError):
            ColemanHeppParams(11)
        with pytest.raises(DimensionError):
            ColemanHeppParams(1)

    def test_rho_a_is_block_diagonal(self):
        rep = coleman_hepp(ColemanHeppParams(4, 0.6, 0.8))
        m = rep.rho_a.matrix
        np.testing.assert_allclose(m, np.diag(np.diag(m)), atol=1e-15)


class TestPresets:
    @pytest.mark.parametrize(
        "name,level", [("epr-unitary", NON_SEPARABILITY), ("epr-collapse", CONTEXTUALITY), ("product-control", FULL_LOCALITY)]
    )
    def test_levels(self, name, level):
        assert name in PRESETS
        assert classify_preset(name).level == level

    def test_unknown(self):
        with pytest.raises(ValueError):
            classify_preset("nope")


def test_fock_suite_small():
    rep = fock_check(50)
    assert all(c.passed for c in rep.checks)
    assert rep.spaces_tested > 10 and rep.image_mismatches == 0
