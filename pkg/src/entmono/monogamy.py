"""Tripartite monogamy analysis for pure 2x2xd states.

For a pure state shared by a qubit A, a qubit B and a d-level C, the
quantities of interest are C_A(BC) (concurrence across the A|BC cut),
C_AB (Wootters concurrence of the AB marginal) and the concurrence of
assistance C^a_AC of the AC marginal.  In the three-qubit case they obey
the equality C_A(BC)^2 = C_AB^2 + (C^a_AC)^2 together with the CKW
inequality and its dual; for d > 2 the equality can fail strictly, and
whether C_A(BC)^2 >= C_AB^2 + (C^a_AC)^2 survives is open.  This module
provides the per-state report, the classification of the boundary cases,
the equal-marginal family on which C_A(BC) = C^a_AC forces C_AB = 0, and
a randomized scan for violations of the open inequality.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import ExpansionMismatchError, InvalidSpecError, WrongDimsError
from .measures import (
    RoofConfig,
    coa_2qubit,
    concurrence_2qubit,
    convex_roof,
    pure_concurrence,
)
from .states import (
    DensityMatrix,
    PureState,
    derived_seed,
    haar_unitary,
    is_ppt,
    partial_trace,
    partial_transpose,
    random_pure,
    rng_stream,
    state_to_dict,
)

PPT_TOL = 1e-10
VIOLATION_THRESHOLD = -1e-6


def _require_22d(psi: PureState) -> int:
    if len(psi.dims) != 3 or psi.dims[0] != 2 or psi.dims[1] != 2:
        raise WrongDimsError(f"expected dims (2, 2, d), got {psi.dims}")
    return psi.dims[2]


def _marginals(psi: PureState) -> tuple[DensityMatrix, DensityMatrix]:
    rho = psi.density()
    return partial_trace(rho, (0, 1)), partial_trace(rho, (0, 2))


@dataclass(frozen=True)
class MonogamyReport:
    """Per-state record of the three concurrences and their residuals.

    ``equality_residual`` is C_A(BC)^2 - C_AB^2 - (C^a_AC)^2; the CKW and
    dual residuals are defined only for d = 2, where C_AC and C^a_AB have
    closed-form evaluators.
    """

    c_a_bc: float
    c_ab: float
    c_ac_assist: float
    equality_residual: float
    ckw_residual: float | None
    dual_residual: float | None
    ppt_ab: bool
    ppt_ab_min_eig: float
    product_form: str
    roof_converged: bool

    def __post_init__(self):
        for name in ("c_a_bc", "c_ab", "c_ac_assist"):
            v = getattr(self, name)
            if not -1e-9 <= v <= 1 + 1e-9:
                raise WrongDimsError(f"{name}={v} outside [0, 1]")
        if self.c_a_bc + 1e-8 < self.c_ac_assist:
            raise WrongDimsError(
                f"C_A(BC)={self.c_a_bc} below C^a_AC={self.c_ac_assist}: "
                "super-additivity violated beyond tolerance"
            )


def detect_product_form(psi: PureState, tol: float = 1e-9) -> str:
    """Classify factorized states by marginal purity.

    'AFactor' when A is unentangled from BC, 'CFactor' when C factors out,
    'Both' for fully product states, otherwise 'None'.
    """
    _require_22d(psi)
    rho = psi.density()
    a_pure = partial_trace(rho, (0,)).purity() >= 1 - tol
    c_pure = partial_trace(rho, (2,)).purity() >= 1 - tol
    if a_pure and c_pure:
        return "Both"
    if a_pure:
        return "AFactor"
    if c_pure:
        return "CFactor"
    return "None"


def monogamy_triple(psi: PureState, roof: RoofConfig) -> MonogamyReport:
    """Evaluate the monogamy quantities of a pure 2x2xd state.

    C^a_AC uses the two-qubit closed form at d = 2 and the roof optimizer
    (maximize mode, settings from `roof`) otherwise.  A non-converged roof
    is reported via ``roof_converged``, not raised.
    """
    d = _require_22d(psi)
    rho_ab, rho_ac = _marginals(psi)
    c_a_bc = pure_concurrence(psi, (0,))
    c_ab = concurrence_2qubit(rho_ab)
    roof_converged = True
    if d == 2:
        c_ac_assist = coa_2qubit(rho_ac)
        c_ac = concurrence_2qubit(rho_ac)
        coa_ab = coa_2qubit(rho_ab)
        ckw_residual = c_a_bc**2 - c_ab**2 - c_ac**2
        dual_residual = coa_ab**2 + c_ac_assist**2 - c_a_bc**2
    else:
        result = convex_roof(rho_ac, replace(roof, mode="maximize"))
        c_ac_assist = result.value
        roof_converged = result.converged
        ckw_residual = None
        dual_residual = None
    ppt = is_ppt(rho_ab, PPT_TOL)
    return MonogamyReport(
        c_a_bc=c_a_bc,
        c_ab=c_ab,
        c_ac_assist=min(c_ac_assist, 1.0 + 1e-9),
        equality_residual=c_a_bc**2 - c_ab**2 - c_ac_assist**2,
        ckw_residual=ckw_residual,
        dual_residual=dual_residual,
        ppt_ab=ppt.is_ppt,
        ppt_ab_min_eig=ppt.min_eigenvalue,
        product_form=detect_product_form(psi),
        roof_converged=roof_converged,
    )


@dataclass(frozen=True)
class EquivalenceCheck:
    """Joint verdict on the three equivalent boundary predicates:
    factorized form, zero assistance, and C_A(BC) = C_AB."""

    factorized: bool
    zero_assist: bool
    saturated: bool
    consistent: bool
    product_form: str
    c_a_bc: float
    c_ab: float
    coa_roof: float
    structural_zero: bool


def check_equivalence(
    psi: PureState,
    roof: RoofConfig,
    tol: float = 1e-6,
    roof_tol: float = 1e-4,
) -> EquivalenceCheck:
    """Test the equivalence of factorized form, C^a_AC = 0, and
    C_A(BC) = C_AB on one state.

    The roof value is a lower bound of C^a_AC, so a value above `roof_tol`
    certifies the zero-assistance predicate false; the predicate is
    asserted true only when the AC marginal also has the classical
    structure (pure marginal on A or on C) that makes C^a vanish exactly.
    """
    d = _require_22d(psi)
    rho_ab, rho_ac = _marginals(psi)
    c_a_bc = pure_concurrence(psi, (0,))
    c_ab = concurrence_2qubit(rho_ab)
    if d == 2:
        coa = coa_2qubit(rho_ac)
    else:
        coa = convex_roof(rho_ac, replace(roof, mode="maximize")).value
    product_form = detect_product_form(psi)
    structural_zero = product_form != "None"
    zero_assist = coa <= roof_tol and structural_zero
    factorized = product_form != "None"
    saturated = abs(c_a_bc - c_ab) <= tol
    consistent = factorized == zero_assist == saturated
    return EquivalenceCheck(
        factorized=factorized,
        zero_assist=zero_assist,
        saturated=saturated,
        consistent=consistent,
        product_form=product_form,
        c_a_bc=c_a_bc,
        c_ab=c_ab,
        coa_roof=coa,
        structural_zero=structural_zero,
    )


@dataclass(frozen=True)
class EqualMarginalSpec:
    """Parameters of the equal-marginal family.

    Both AC components share the qubit marginal diag(mu0, mu1), which
    forces C_A(BC) = C^a_AC = 2 sqrt(mu0 mu1) on the assembled state.
    """

    d: int
    mu: tuple[float, float]
    lam: tuple[float, float]
    u: np.ndarray

    def __post_init__(self):
        if self.d < 2:
            raise InvalidSpecError("d must be >= 2")
        mu = (float(self.mu[0]), float(self.mu[1]))
        lam = (float(self.lam[0]), float(self.lam[1]))
        if min(mu) < -1e-12 or abs(mu[0] + mu[1] - 1) > 1e-12:
            raise InvalidSpecError(f"mu={mu} is not a probability pair")
        if min(lam) < -1e-12 or abs(lam[0] + lam[1] - 1) > 1e-12:
            raise InvalidSpecError(f"lam={lam} is not a probability pair")
        u = np.asarray(self.u, dtype=complex)
        if u.shape != (self.d, self.d):
            raise InvalidSpecError(f"u has shape {u.shape}, expected {(self.d,) * 2}")
        if np.max(np.abs(u.conj().T @ u - np.eye(self.d))) > 1e-10:
            raise InvalidSpecError("u is not unitary within 1e-10")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "u", u)


def random_equal_marginal_spec(d: int, rng: np.random.Generator) -> EqualMarginalSpec:
    mu0 = float(rng.uniform())
    lam0 = float(rng.uniform())
    return EqualMarginalSpec(
        d=d, mu=(mu0, 1 - mu0), lam=(lam0, 1 - lam0), u=haar_unitary(d, rng)
    )


def equal_marginal_components(spec: EqualMarginalSpec) -> tuple[np.ndarray, np.ndarray]:
    """The two AC component vectors (flattened 2xd blocks, unit norm)."""
    psi0 = np.zeros((2, spec.d), dtype=complex)
    psi0[0, 0] = math.sqrt(spec.mu[0])
    psi0[1, 1] = math.sqrt(spec.mu[1])
    psi1 = np.zeros((2, spec.d), dtype=complex)
    psi1[0, :] = math.sqrt(spec.mu[0]) * spec.u[:, 0]
    psi1[1, :] = math.sqrt(spec.mu[1]) * spec.u[:, 1]
    return psi0.reshape(-1), psi1.reshape(-1)


def equal_marginal_state(spec: EqualMarginalSpec) -> PureState:
    """Assemble sqrt(lam0) |psi0>_AC |0>_B + sqrt(lam1) |psi1>_AC |1>_B."""
    psi0, psi1 = equal_marginal_components(spec)
    t = np.zeros((2, 2, spec.d), dtype=complex)
    t[:, 0, :] = math.sqrt(spec.lam[0]) * psi0.reshape(2, spec.d)
    t[:, 1, :] = math.sqrt(spec.lam[1]) * psi1.reshape(2, spec.d)
    return PureState((2, 2, spec.d), t.reshape(-1))


def swap_conjugate_state(psi: PureState, basis, coeffs) -> PureState:
    """Conjugate-swap the expansion coefficients of a 2x2xd state.

    With B-branches ``w_0 = x0 psi0 + x1 psi1`` and
    ``w_1 = y0 psi0 + y1 psi1`` over the AC basis pair, the partner state
    has branches ``x1* psi0 + x0* psi1`` and ``y1* psi0 + y0* psi1``.
    When the basis pair shares its qubit marginal, the partner's AB
    marginal equals the partial transpose of the original's, which is the
    PPT certificate for C_AB = 0.
    """
    d = _require_22d(psi)
    b0, b1 = (np.asarray(b, dtype=complex).reshape(-1) for b in basis)
    if b0.size != 2 * d or b1.size != 2 * d:
        raise ExpansionMismatchError("basis vectors must live on the AC factor")
    x0, x1, y0, y1 = (complex(c) for c in coeffs)
    t = psi.tensor()
    w0 = t[:, 0, :].reshape(-1)
    w1 = t[:, 1, :].reshape(-1)
    gap = max(
        float(np.max(np.abs(w0 - (x0 * b0 + x1 * b1)))),
        float(np.max(np.abs(w1 - (y0 * b0 + y1 * b1)))),
    )
    if gap > 1e-10:
        raise ExpansionMismatchError(
            f"state does not reconstruct from the expansion (gap {gap:.3e})"
        )
    w0p = np.conj(x1) * b0 + np.conj(x0) * b1
    w1p = np.conj(y1) * b0 + np.conj(y0) * b1
    norm = math.sqrt(float(np.linalg.norm(w0p) ** 2 + np.linalg.norm(w1p) ** 2))
    if abs(norm - 1.0) > 1e-8:
        raise ExpansionMismatchError(
            f"conjugate-swapped state has norm {norm}; "
            "expansion basis lacks equal qubit marginals"
        )
    out = np.zeros((2, 2, d), dtype=complex)
    out[:, 0, :] = (w0p / norm).reshape(2, d)
    out[:, 1, :] = (w1p / norm).reshape(2, d)
    return PureState((2, 2, d), out.reshape(-1))


def spectral_expansion_coeffs(
    basis: tuple[np.ndarray, np.ndarray], vector: np.ndarray
) -> tuple[complex, complex]:
    """Coefficients expanding `vector` over a (possibly non-orthogonal)
    linearly independent basis pair, by solving the 2x2 Gram system."""
    b0, b1 = basis
    gram = np.array(
        [[np.vdot(b0, b0), np.vdot(b0, b1)], [np.vdot(b1, b0), np.vdot(b1, b1)]]
    )
    rhs = np.array([np.vdot(b0, vector), np.vdot(b1, vector)])
    x = np.linalg.solve(gram, rhs)
    return complex(x[0]), complex(x[1])


@dataclass(frozen=True)
class EqualMarginalVerdict:
    """Outcome of one equal-marginal verification run."""

    premise_met: bool
    passed: bool
    c_a_bc: float
    c_ac_assist: float
    c_ab: float
    ppt_min_eig: float
    swap_gap: float | None


def verify_equal_marginal(
    spec: EqualMarginalSpec, roof: RoofConfig, tol: float = 1e-6
) -> EqualMarginalVerdict:
    """Verify that equality C_A(BC) = C^a_AC forces C_AB = 0 on one spec.

    Builds the state, confirms the premise with the roof optimizer, then
    asserts the AB marginal is PPT with zero Wootters concurrence and that
    the conjugate-swapped partner reproduces its partial transpose (the
    swap comparison uses the spectral expansion of the AC marginal and is
    skipped when that marginal is pure).
    """
    psi = equal_marginal_state(spec)
    rho_ab, rho_ac = _marginals(psi)
    c_a_bc = pure_concurrence(psi, (0,))
    result = convex_roof(rho_ac, replace(roof, mode="maximize"))
    c_ab = concurrence_2qubit(rho_ab)
    ppt = is_ppt(rho_ab, PPT_TOL)
    premise_met = abs(c_a_bc - result.value) <= tol

    swap_gap = None
    w, v = np.linalg.eigh(rho_ac.mat)
    keep = np.nonzero(w > 1e-12)[0]
    if len(keep) == 2:
        basis = equal_marginal_components(spec)
        tilde = [np.sqrt(w[i]) * v[:, i] for i in keep]
        x = spectral_expansion_coeffs(basis, tilde[0])
        y = spectral_expansion_coeffs(basis, tilde[1])
        t = np.zeros((2, 2, spec.d), dtype=complex)
        t[:, 0, :] = tilde[0].reshape(2, spec.d)
        t[:, 1, :] = tilde[1].reshape(2, spec.d)
        psi_spec = PureState((2, 2, spec.d), t.reshape(-1))
        partner = swap_conjugate_state(psi_spec, basis, (*x, *y))
        rho_ab_spec = partial_trace(psi_spec.density(), (0, 1))
        rho_ab_partner = partial_trace(partner.density(), (0, 1))
        swap_gap = float(
            np.max(np.abs(partial_transpose(rho_ab_spec, 1) - rho_ab_partner.mat))
        )
    passed = (
        premise_met
        and ppt.min_eigenvalue >= -PPT_TOL
        and c_ab <= 1e-8
        and (swap_gap is None or swap_gap <= 1e-9)
    )
    return EqualMarginalVerdict(
        premise_met=premise_met,
        passed=passed,
        c_a_bc=c_a_bc,
        c_ac_assist=result.value,
        c_ab=c_ab,
        ppt_min_eig=ppt.min_eigenvalue,
        swap_gap=swap_gap,
    )


def example_state() -> PureState:
    """The 2x2x3 state with C_AB = 0 but C_A(BC) = 1 > C^a_AC = 2 sqrt(2)/3.

    Amplitudes 1/sqrt(6) on |002> and |112>, 1/sqrt(3) on |100> and |011>.
    Its AB marginal is PPT while the A|BC cut is maximally entangled, so
    the monogamy equality fails strictly with residual 1/9.
    """
    amps = np.zeros(12, dtype=complex)
    amps[2] = 1 / math.sqrt(6)  # |002>
    amps[11] = 1 / math.sqrt(6)  # |112>
    amps[6] = 1 / math.sqrt(3)  # |100>
    amps[4] = 1 / math.sqrt(3)  # |011>
    return PureState((2, 2, 3), amps)


# ---------------------------------------------------------------------------
# Randomized batteries and the conjecture scan
# ---------------------------------------------------------------------------


def random_product_state(d: int, rng: np.random.Generator, kind: str) -> PureState:
    """Haar-random factorized 2x2xd state of the requested kind."""
    if kind == "AFactor":
        amps = np.kron(random_pure([2], rng).amps, random_pure([2, d], rng).amps)
    elif kind == "CFactor":
        amps = np.kron(random_pure([2, 2], rng).amps, random_pure([d], rng).amps)
    else:
        raise WrongDimsError(f"unknown product kind {kind!r}")
    return PureState((2, 2, d), amps)


def equivalence_battery(
    d_values,
    product_samples: int,
    generic_samples: int,
    seed: int,
    roof: RoofConfig,
    tol: float = 1e-6,
    roof_tol: float = 1e-4,
    coa_floor: float = 0.1,
    gap_floor: float = 1e-4,
) -> dict:
    """Randomized test battery for the boundary-equivalence theorem.

    Product-family states must satisfy all three equivalent predicates;
    generic states with roof assistance above `coa_floor` must show a
    concurrence gap of at least `gap_floor`.  Returns counts and failures.
    """
    d_values = list(d_values)
    failures = []
    for k in range(product_samples):
        d = d_values[k % len(d_values)]
        kind = "AFactor" if (k // len(d_values)) % 2 == 0 else "CFactor"
        rng = rng_stream(seed, 0, k)
        psi = random_product_state(d, rng, kind)
        cfg = replace(roof, seed=derived_seed(seed, 0, k))
        chk = check_equivalence(psi, cfg, tol=tol, roof_tol=roof_tol)
        ok = (
            chk.factorized
            and chk.zero_assist
            and chk.saturated
            and abs(chk.c_a_bc - chk.c_ab) <= 1e-9
            and chk.coa_roof <= 1e-7
        )
        if not ok:
            failures.append(
                {"family": "product", "index": k, "d": d, "kind": kind,
                 "c_a_bc": chk.c_a_bc, "c_ab": chk.c_ab, "coa_roof": chk.coa_roof,
                 "state": state_to_dict(psi)}
            )
    for k in range(generic_samples):
        d = d_values[k % len(d_values)]
        rng = rng_stream(seed, 1, k)
        psi = random_pure([2, 2, d], rng)
        cfg = replace(roof, mode="maximize", seed=derived_seed(seed, 1, k))
        rho_ac = partial_trace(psi.density(), (0, 2))
        coa = convex_roof(rho_ac, cfg).value
        c_a_bc = pure_concurrence(psi, (0,))
        c_ab = concurrence_2qubit(partial_trace(psi.density(), (0, 1)))
        if coa >= coa_floor and c_a_bc - c_ab < gap_floor:
            failures.append(
                {"family": "generic", "index": k, "d": d,
                 "c_a_bc": c_a_bc, "c_ab": c_ab, "coa_roof": coa,
                 "state": state_to_dict(psi)}
            )
    return {
        "product_samples": product_samples,
        "generic_samples": generic_samples,
        "d_values": d_values,
        "failures": failures,
    }


def equal_marginal_battery(
    d: int, samples: int, seed: int, roof: RoofConfig, tol: float = 1e-6
) -> dict:
    """Run the equal-marginal verification on `samples` random specs."""
    failures = []
    for k in range(samples):
        spec = random_equal_marginal_spec(d, rng_stream(seed, 2, k))
        cfg = replace(roof, seed=derived_seed(seed, 2, k))
        verdict = verify_equal_marginal(spec, cfg, tol=tol)
        if not verdict.passed:
            failures.append(
                {"index": k, "d": d, "c_a_bc": verdict.c_a_bc,
                 "c_ac_assist": verdict.c_ac_assist, "c_ab": verdict.c_ab,
                 "ppt_min_eig": verdict.ppt_min_eig, "swap_gap": verdict.swap_gap,
                 "state": state_to_dict(equal_marginal_state(spec))}
            )
    return {"samples": samples, "d": d, "failures": failures}


def _scan_sample(args) -> tuple[int, float, bool]:
    d, seed, k, roof = args
    psi = random_pure([2, 2, d], rng_stream(seed, k))
    cfg = replace(roof, mode="maximize", seed=derived_seed(seed, k, 1))
    report = monogamy_triple(psi, cfg)
    return k, report.equality_residual, report.roof_converged


def scan_conjecture(
    d: int,
    samples: int,
    seed: int,
    roof: RoofConfig,
    workers: int = 1,
    include_example: bool = False,
) -> dict:
    """Scan Haar-random 2x2xd states for violations of the open inequality
    C_A(BC)^2 >= C_AB^2 + (C^a_AC)^2.

    The roof value is a lower bound of C^a_AC, so computed residuals only
    overestimate the true ones: a candidate below the -1e-6 threshold is
    re-evaluated with eight times the restarts before being reported.
    Results are deterministic for fixed (seed, samples) and independent of
    the worker count.
    """
    if d < 2 or samples < 1:
        raise WrongDimsError("scan needs d >= 2 and samples >= 1")
    jobs = [(d, seed, k, roof) for k in range(samples)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            raw = list(pool.map(_scan_sample, jobs, chunksize=64))
    else:
        raw = [_scan_sample(j) for j in jobs]
    raw.sort(key=lambda t: t[0])
    residuals = np.array([r for _, r, _ in raw])
    unconverged = int(sum(1 for _, _, c in raw if not c))

    candidates = [k for k, r, _ in raw if r < VIOLATION_THRESHOLD]
    violations = []
    cleared = []
    for k in candidates:
        psi = random_pure([2, 2, d], rng_stream(seed, k))
        boosted = replace(
            roof,
            mode="maximize",
            restarts=roof.restarts * 8,
            seed=derived_seed(seed, k, 2),
        )
        report = monogamy_triple(psi, boosted)
        entry = {
            "index": k,
            "first_residual": float(residuals[k]),
            "recheck_residual": report.equality_residual,
            "state": state_to_dict(psi),
        }
        if report.equality_residual < VIOLATION_THRESHOLD:
            violations.append(entry)
        else:
            cleared.append(entry)

    lo, hi = float(residuals.min()), float(residuals.max())
    if hi - lo < 1e-300:
        lo, hi = lo - 0.5, hi + 0.5
    counts, edges = np.histogram(residuals, bins=32, range=(lo, hi))
    summary = {
        "d": d,
        "samples": samples,
        "seed": seed,
        "restarts": roof.restarts,
        "min_residual": float(residuals.min()),
        "mean_residual": float(residuals.mean()),
        "max_residual": float(residuals.max()),
        "violation_threshold": VIOLATION_THRESHOLD,
        "candidates": len(candidates),
        "violations": violations,
        "cleared_candidates": cleared,
        "unconverged_roofs": unconverged,
        "histogram": {"edges": [float(e) for e in edges],
                      "counts": [int(c) for c in counts]},
    }
    if include_example:
        if d != 3:
            raise WrongDimsError("the built-in example lives in d = 3")
        psi = example_state()
        report = monogamy_triple(psi, replace(roof, mode="maximize"))
        summary["example"] = {
            "equality_residual": report.equality_residual,
            "c_a_bc": report.c_a_bc,
            "c_ab": report.c_ab,
            "c_ac_assist": report.c_ac_assist,
            "state": state_to_dict(psi),
        }
    return summary
