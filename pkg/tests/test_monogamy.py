import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bell_pair, ghz, w_state
from entmono.errors import (
    ExpansionMismatchError,
    InvalidSpecError,
    WrongDimsError,
)
from entmono.measures import RoofConfig, coa_2qubit, concurrence_2qubit
from entmono.monogamy import (
    EqualMarginalSpec,
    check_equivalence,
    detect_product_form,
    equal_marginal_battery,
    equal_marginal_components,
    equal_marginal_state,
    equivalence_battery,
    example_state,
    monogamy_triple,
    random_equal_marginal_spec,
    random_product_state,
    scan_conjecture,
    spectral_expansion_coeffs,
    swap_conjugate_state,
    verify_equal_marginal,
)
from entmono.states import (
    PureState,
    haar_unitary,
    partial_trace,
    partial_transpose,
    random_pure,
    rng_stream,
)

ROOF = RoofConfig("maximize", restarts=8, seed=0)
FAST_ROOF = RoofConfig("maximize", restarts=4, max_sweeps=80, seed=0)


class TestMonogamyTriple:
    def test_example_state(self, warm_kernel):
        rep = monogamy_triple(example_state(), ROOF)
        assert rep.c_a_bc == pytest.approx(1.0, abs=1e-9)
        assert rep.c_ab == pytest.approx(0.0, abs=1e-9)
        assert rep.c_ac_assist == pytest.approx(2 * np.sqrt(2) / 3, abs=1e-6)
        assert rep.equality_residual == pytest.approx(1 / 9, abs=1e-6)
        assert rep.ppt_ab
        assert rep.ckw_residual is None and rep.dual_residual is None

    def test_ghz(self):
        rep = monogamy_triple(PureState((2, 2, 2), ghz()), ROOF)
        assert rep.c_a_bc == pytest.approx(1.0, abs=1e-10)
        assert rep.c_ab == pytest.approx(0.0, abs=1e-10)
        assert rep.c_ac_assist == pytest.approx(1.0, abs=1e-10)
        assert rep.equality_residual == pytest.approx(0.0, abs=1e-10)

    def test_w(self):
        rep = monogamy_triple(PureState((2, 2, 2), w_state()), ROOF)
        assert rep.c_a_bc == pytest.approx(2 * np.sqrt(2) / 3, abs=1e-10)
        assert rep.c_ab == pytest.approx(2 / 3, abs=1e-10)
        assert rep.c_ac_assist == pytest.approx(2 / 3, abs=1e-10)
        assert rep.equality_residual == pytest.approx(0.0, abs=1e-10)

    def test_a_factor_product(self):
        amps = np.kron([1.0, 0.0], bell_pair())
        rep = monogamy_triple(PureState((2, 2, 2), amps), ROOF)
        for value in (rep.c_a_bc, rep.c_ab, rep.c_ac_assist):
            assert value == pytest.approx(0.0, abs=1e-9)

    def test_wrong_dims(self):
        with pytest.raises(WrongDimsError):
            monogamy_triple(PureState((2, 2), bell_pair()), ROOF)


class TestProductForm:
    def test_a_factor(self):
        amps = np.kron([1.0, 0.0], bell_pair())
        assert detect_product_form(PureState((2, 2, 2), amps)) == "AFactor"

    def test_c_factor(self):
        amps = np.kron(bell_pair(), [0.0, 0.0, 1.0])
        assert detect_product_form(PureState((2, 2, 3), amps)) == "CFactor"

    def test_both(self):
        amps = np.zeros(12)
        amps[0] = 1.0
        assert detect_product_form(PureState((2, 2, 3), amps)) == "Both"

    def test_ghz_is_entangled(self):
        assert detect_product_form(PureState((2, 2, 2), ghz())) == "None"


class TestEquivalence:
    def test_product_all_true(self):
        psi = random_product_state(3, rng_stream(4), "AFactor")
        chk = check_equivalence(psi, ROOF)
        assert chk.factorized and chk.zero_assist and chk.saturated
        assert chk.consistent

    def test_example_all_false(self):
        chk = check_equivalence(example_state(), ROOF)
        assert not (chk.factorized or chk.zero_assist or chk.saturated)
        assert chk.consistent

    def test_ghz_all_false(self):
        chk = check_equivalence(PureState((2, 2, 2), ghz()), ROOF)
        assert not (chk.factorized or chk.zero_assist or chk.saturated)
        assert chk.consistent


class TestEqualMarginal:
    def test_single_branch_is_ghz_like(self):
        spec = EqualMarginalSpec(
            d=2, mu=(0.5, 0.5), lam=(1.0, 0.0), u=np.eye(2)
        )
        psi = equal_marginal_state(spec)
        rep = monogamy_triple(psi, ROOF)
        assert rep.c_a_bc == pytest.approx(1.0, abs=1e-10)

    def test_degenerate_mu_is_product(self):
        spec = EqualMarginalSpec(
            d=3, mu=(1.0, 0.0), lam=(0.4, 0.6), u=haar_unitary(3, rng_stream(2))
        )
        rep = monogamy_triple(equal_marginal_state(spec), ROOF)
        for value in (rep.c_a_bc, rep.c_ab, rep.c_ac_assist):
            assert value == pytest.approx(0.0, abs=1e-8)

    def test_components_share_marginal(self):
        spec = random_equal_marginal_spec(4, rng_stream(11))
        for comp in equal_marginal_components(spec):
            v = comp.reshape(2, spec.d)
            marg = v @ v.conj().T
            assert np.allclose(marg, np.diag(spec.mu), atol=1e-12)

    @settings(max_examples=10, deadline=None, derandomize=True)
    @given(st.integers(0, 10_000))
    def test_random_spec_properties(self, seed):
        spec = random_equal_marginal_spec(3, rng_stream(seed))
        verdict = verify_equal_marginal(spec, FAST_ROOF, tol=1e-6)
        assert verdict.premise_met
        assert verdict.passed
        assert abs(verdict.c_a_bc - 2 * np.sqrt(spec.mu[0] * spec.mu[1])) <= 1e-9

    def test_invalid_specs(self):
        with pytest.raises(InvalidSpecError):
            EqualMarginalSpec(d=1, mu=(0.5, 0.5), lam=(0.5, 0.5), u=np.eye(1))
        with pytest.raises(InvalidSpecError):
            EqualMarginalSpec(d=2, mu=(0.7, 0.7), lam=(0.5, 0.5), u=np.eye(2))
        with pytest.raises(InvalidSpecError):
            EqualMarginalSpec(d=2, mu=(0.5, 0.5), lam=(0.5, 0.5), u=np.ones((2, 2)))


class TestSwapConjugate:
    def test_branch_diagonal_expansion(self):
        # x1 = y0 = 0: the partner swaps which basis vector each branch uses
        spec = random_equal_marginal_spec(3, rng_stream(21))
        psi = equal_marginal_state(spec)
        basis = equal_marginal_components(spec)
        coeffs = (np.sqrt(spec.lam[0]), 0.0, 0.0, np.sqrt(spec.lam[1]))
        partner = swap_conjugate_state(psi, basis, coeffs)
        pt = partial_transpose(partial_trace(psi.density(), (0, 1)), 1)
        rho_ab_partner = partial_trace(partner.density(), (0, 1))
        assert np.max(np.abs(pt - rho_ab_partner.mat)) <= 1e-10

    def test_real_inputs_stay_real(self):
        u = np.array([[0.0, 1.0], [1.0, 0.0]])
        spec = EqualMarginalSpec(d=2, mu=(0.3, 0.7), lam=(0.6, 0.4), u=u)
        psi = equal_marginal_state(spec)
        basis = equal_marginal_components(spec)
        coeffs = (np.sqrt(0.6), 0.0, 0.0, np.sqrt(0.4))
        partner = swap_conjugate_state(psi, basis, coeffs)
        assert np.max(np.abs(partner.amps.imag)) <= 1e-14

    @settings(max_examples=10, deadline=None, derandomize=True)
    @given(st.integers(0, 10_000))
    def test_spectral_expansion_identity(self, seed):
        spec = random_equal_marginal_spec(3, rng_stream(seed))
        psi = equal_marginal_state(spec)
        rho_ac = partial_trace(psi.density(), (0, 2))
        w, v = np.linalg.eigh(rho_ac.mat)
        keep = np.nonzero(w > 1e-12)[0]
        if len(keep) != 2:
            return
        basis = equal_marginal_components(spec)
        tilde = [np.sqrt(w[i]) * v[:, i] for i in keep]
        x = spectral_expansion_coeffs(basis, tilde[0])
        y = spectral_expansion_coeffs(basis, tilde[1])
        t = np.zeros((2, 2, 3), dtype=complex)
        t[:, 0, :] = tilde[0].reshape(2, 3)
        t[:, 1, :] = tilde[1].reshape(2, 3)
        psi_spec = PureState((2, 2, 3), t.reshape(-1))
        partner = swap_conjugate_state(psi_spec, basis, (*x, *y))
        pt = partial_transpose(partial_trace(psi_spec.density(), (0, 1)), 1)
        rho_ab_partner = partial_trace(partner.density(), (0, 1))
        assert np.max(np.abs(pt - rho_ab_partner.mat)) <= 1e-9

    def test_rejects_bad_expansion(self):
        spec = random_equal_marginal_spec(3, rng_stream(21))
        psi = equal_marginal_state(spec)
        basis = equal_marginal_components(spec)
        with pytest.raises(ExpansionMismatchError):
            swap_conjugate_state(psi, basis, (1.0, 0.0, 0.0, 1.0))


class TestVerifyEqualMarginal:
    def test_degenerate_lambda(self):
        spec = EqualMarginalSpec(
            d=3, mu=(0.4, 0.6), lam=(1.0, 0.0), u=haar_unitary(3, rng_stream(8))
        )
        verdict = verify_equal_marginal(spec, ROOF)
        assert verdict.premise_met
        assert verdict.passed
        assert verdict.c_ab <= 1e-10
        assert verdict.swap_gap is None  # pure AC marginal, nothing to expand

    def test_degenerate_mu_vacuous(self):
        spec = EqualMarginalSpec(
            d=3, mu=(1.0, 0.0), lam=(0.5, 0.5), u=haar_unitary(3, rng_stream(9))
        )
        verdict = verify_equal_marginal(spec, ROOF)
        assert verdict.passed
        assert verdict.c_a_bc == pytest.approx(0.0, abs=1e-10)

    def test_battery_smoke(self):
        out = equal_marginal_battery(3, 10, 17, FAST_ROOF)
        assert out["failures"] == []


class TestExampleState:
    def test_norm_exact(self):
        assert abs(np.linalg.norm(example_state().amps) - 1.0) <= 1e-15

    def test_amplitude_positions(self):
        amps = example_state().amps
        hot = {2: 1 / np.sqrt(6), 11: 1 / np.sqrt(6), 6: 1 / np.sqrt(3), 4: 1 / np.sqrt(3)}
        for idx, val in hot.items():
            assert amps[idx] == pytest.approx(val, abs=1e-15)
        assert np.count_nonzero(amps) == 4


class TestTheoremBatteries:
    def test_equivalence_battery_smoke(self):
        out = equivalence_battery([2, 3, 5], 18, 18, 23, FAST_ROOF)
        assert out["failures"] == []

    @settings(max_examples=20, deadline=None, derandomize=True)
    @given(st.integers(0, 10_000))
    def test_equality_closed_form_d2(self, seed):
        psi = random_pure([2, 2, 2], rng_stream(seed))
        rep = monogamy_triple(psi, ROOF)
        assert abs(rep.equality_residual) <= 1e-8
        assert rep.ckw_residual >= -1e-10
        assert rep.dual_residual >= -1e-10

    @settings(max_examples=8, deadline=None, derandomize=True)
    @given(st.integers(0, 10_000), st.sampled_from([2, 3, 5]))
    def test_assist_bounded_by_cut_concurrence(self, seed, d):
        psi = random_pure([2, 2, d], rng_stream(seed))
        rep = monogamy_triple(psi, FAST_ROOF)
        assert rep.c_a_bc >= rep.c_ac_assist - 1e-6


class TestScan:
    def test_d2_equality_regime(self):
        summary = scan_conjecture(2, 200, 31, FAST_ROOF)
        assert abs(summary["min_residual"]) <= 1e-6
        assert abs(summary["max_residual"]) <= 1e-6
        assert summary["violations"] == []
        assert sum(summary["histogram"]["counts"]) == 200

    def test_example_injection(self):
        summary = scan_conjecture(
            3, 20, 31, FAST_ROOF, include_example=True
        )
        assert summary["example"]["equality_residual"] == pytest.approx(
            1 / 9, abs=1e-6
        )

    def test_worker_independence(self):
        a = scan_conjecture(3, 24, 5, FAST_ROOF, workers=1)
        b = scan_conjecture(3, 24, 5, FAST_ROOF, workers=3)
        assert a == b

    def test_example_requires_d3(self):
        with pytest.raises(WrongDimsError):
            scan_conjecture(2, 4, 0, FAST_ROOF, include_example=True)
