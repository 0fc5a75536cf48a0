"""Lewenstein-Sanpera decomposition for two-qubit density matrices.

Every two-qubit state splits uniquely as ``rho = lam rho_s + (1-lam) P_e``
with rho_s separable, P_e a pure entangled projector, and lam maximal.
PPT decides two-qubit separability exactly, so for a fixed candidate pure
remainder e the admissible weights form an interval cut out by two linear
matrix constraints; the largest admissible lam for that e has a closed
form, and the decomposition search reduces to maximizing it over e.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import WrongDimsError
from .measures import concurrence_2qubit, pure_concurrence
from .states import (
    DensityMatrix,
    PureState,
    derived_seed,
    is_ppt,
    partial_trace,
    partial_transpose,
    rng_stream,
)

FEAS_EIG_TOL = 1e-10
FEAS_TRACE_TOL = 1e-9


@dataclass(frozen=True)
class BsaDecomposition:
    """Best separable approximation ``rho = lam rho_s + (1-lam) |p_e><p_e|``.

    `p_e` is absent only when the state is separable (lam = 1).  `certified`
    reports the local-maximality probe: no feasible decomposition was found
    at lam + 1e-4 from perturbed restarts.
    """

    lam: float
    rho_s: DensityMatrix
    p_e: PureState | None
    residual_norm: float
    certified: bool
    converged: bool


def _require_two_qubits(rho: DensityMatrix):
    if rho.dims != (2, 2):
        raise WrongDimsError(f"expected dims (2, 2), got {rho.dims}")


def bsa_feasible(rho: DensityMatrix, lam: float, e: PureState) -> bool:
    """Is ``(rho - (1-lam) |e><e|) / lam`` a separable state?

    Checks positivity, unit trace and PPT of the candidate within fixed
    tolerances.  This is the independent feasibility test behind the
    decomposition search and the maximality probes.
    """
    _require_two_qubits(rho)
    if e.dims != (2, 2):
        raise WrongDimsError(f"remainder dims {e.dims}, expected (2, 2)")
    if not 0 < lam <= 1:
        raise WrongDimsError(f"lam={lam} outside (0, 1]")
    cand = (rho.mat - (1 - lam) * np.outer(e.amps, e.amps.conj())) / lam
    cand = (cand + cand.conj().T) / 2
    if abs(float(np.trace(cand).real) - 1.0) > FEAS_TRACE_TOL:
        return False
    if float(np.linalg.eigvalsh(cand)[0]) < -FEAS_EIG_TOL:
        return False
    da, db = 2, 2
    pt = cand.reshape(da, db, da, db).transpose(0, 3, 2, 1).reshape(4, 4)
    return float(np.linalg.eigvalsh(pt)[0]) >= -FEAS_EIG_TOL


class _Search:
    """Shared precomputations for the max-weight search over remainders."""

    def __init__(self, rho: DensityMatrix):
        self.rho = rho.mat
        self.pt = partial_transpose(rho, 1)
        w, v = np.linalg.eigh(self.rho)
        keep = w > 1e-12
        self.range_basis = v[:, keep]
        self.inv_w = 1.0 / w[keep]
        self.rank = int(keep.sum())
        self.t_grid = np.linspace(0.0, 1.0, 17)
        # the PPT defect lives along the negative eigenvector u of rho^T_B;
        # <e| (u u^dag)^T_B |e> < 0 marks remainders able to lift it
        pw, pv = np.linalg.eigh(self.pt)
        u = pv[:, 0]
        self.guide = (
            np.outer(u, u.conj())
            .reshape(2, 2, 2, 2)
            .transpose(0, 3, 2, 1)
            .reshape(4, 4)
        )

    def informed_starts(self) -> list[np.ndarray]:
        """Remainder candidates aligned with the entangled structure."""
        starts = []
        gw, gv = np.linalg.eigh(self.guide)
        for cand in (gv[:, 0], self.range_basis[:, -1]):
            proj = self.range_basis.conj().T @ cand
            if np.linalg.norm(proj) > 1e-6:
                starts.append(np.concatenate([proj.real, proj.imag]))
        return starts

    def unit_vector(self, x: np.ndarray) -> np.ndarray | None:
        """Map unconstrained reals to a unit vector in the range of rho."""
        c = x[: self.rank] + 1j * x[self.rank :]
        n = np.linalg.norm(c)
        if n < 1e-12:
            return None
        return self.range_basis @ (c / n)

    def evaluate(self, e: np.ndarray) -> tuple[bool, float, float]:
        """(feasible, admissible weight, search score) for a remainder e.

        In terms of t = 1 - lam the constraints are ``rho >= t e e^dag``
        (t at most 1 over the inverse-quadratic form) and PPT of the
        candidate, whose admissible t form an interval by linearity: the
        smallest admissible t is a root of the concave minimum eigenvalue
        of ``rho^T_B - t (e e^dag)^T_B``.  For rank-deficient states that
        interval generically degenerates to a tangency point, so infeasible
        remainders get a smooth score blending the PPT defect into the
        would-be weight; scores of infeasible points may exceed feasible
        weights, which is why feasibility is reported separately and ranks
        first when candidates are compared.
        """
        proj = self.range_basis.conj().T @ e
        t_a = 1.0 / float(np.sum(self.inv_w * np.abs(proj) ** 2))
        ee = np.outer(e, e.conj())
        pt_e = ee.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
        stack = self.pt[None, :, :] - self.t_grid[:, None, None] * pt_e[None, :, :]
        f_grid = np.linalg.eigvalsh(stack)[:, 0]

        def f(t):
            return float(np.linalg.eigvalsh(self.pt - t * pt_e)[0])

        above = np.nonzero(f_grid >= 0.0)[0]
        if above.size == 0:
            # the admissible window can be narrower than the grid (a bare
            # tangency for rank-deficient states): locate the concave peak
            j = int(np.argmax(f_grid))
            lo = self.t_grid[max(0, j - 1)]
            hi = self.t_grid[min(len(self.t_grid) - 1, j + 1)]
            peak = optimize.minimize_scalar(
                lambda t: -f(t), bounds=(lo, hi), method="bounded",
                options={"xatol": 1e-12},
            )
            peak_val = -peak.fun
            t_peak = float(peak.x)
            if peak_val < -1e-11:
                alignment = float((e.conj() @ (self.guide @ e)).real)
                score = (1.0 - t_peak) + 50.0 * peak_val - 0.1 * alignment
                return False, 0.0, score
            t1 = t_peak if peak_val <= 0.0 else optimize.brentq(
                f, lo, t_peak, xtol=1e-13
            )
        else:
            i = above[0]
            if i == 0:
                t1 = 0.0
            else:
                t1 = optimize.brentq(
                    f, self.t_grid[i - 1], self.t_grid[i], xtol=1e-13
                )
        limit = min(t_a, 1.0)
        if t1 <= limit + 1e-11:
            return True, 1.0 - t1, 1.0 - t1
        return False, 0.0, 1.0 - t1 - 10.0 * (t1 - limit)

    def feasibility_gap(self, e: np.ndarray) -> float:
        """Largest PPT margin over the weight parameter (< 0: no admissible
        weight for this remainder at all)."""
        ee = np.outer(e, e.conj())
        pt_e = ee.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
        stack = self.pt[None, :, :] - self.t_grid[:, None, None] * pt_e[None, :, :]
        f_grid = np.linalg.eigvalsh(stack)[:, 0]
        j = int(np.argmax(f_grid))
        lo = self.t_grid[max(0, j - 1)]
        hi = self.t_grid[min(len(self.t_grid) - 1, j + 1)]
        peak = optimize.minimize_scalar(
            lambda t: -float(np.linalg.eigvalsh(self.pt - t * pt_e)[0]),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        return -float(peak.fun)

    def margin(self, lam: float, e: np.ndarray) -> float:
        """Worst constraint eigenvalue of the candidate at fixed lam."""
        t = 1.0 - lam
        ee = np.outer(e, e.conj())
        m1 = float(np.linalg.eigvalsh(self.rho - t * ee)[0])
        pt_e = ee.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
        m2 = float(np.linalg.eigvalsh(self.pt - t * pt_e)[0])
        return min(m1, m2) / lam


def _nelder_mead(fun, x0: np.ndarray, maxfev: int) -> optimize.OptimizeResult:
    return optimize.minimize(
        fun,
        x0,
        method="Nelder-Mead",
        options={"maxfev": maxfev, "xatol": 1e-9, "fatol": 1e-12},
    )


def _det2_bilinear(u: np.ndarray, w: np.ndarray) -> complex:
    """Symmetric bilinear form whose diagonal is det(reshape(v, 2x2))."""
    return 0.5 * (u[0] * w[3] - u[1] * w[2] + w[0] * u[3] - w[1] * u[2])


def _solve_rank2(rho_mat: np.ndarray, range_basis: np.ndarray):
    """Closed-form maximal decomposition for rank-2 entangled states.

    A generic 2-dim subspace of two qubits contains exactly two product
    vectors (roots of the determinant quadratic), so the separable part
    must mix them: maximizing the separable weight on the rank-1-remainder
    hyperbola ``det(R - a Q1 - b Q2) = 0`` is then a scalar problem with
    closed-form stationary points.  Returns (lam, remainder) or None when
    the root structure degenerates.
    """
    v1, v2 = range_basis[:, 0], range_basis[:, 1]
    m11 = _det2_bilinear(v1, v1)
    m12 = 2.0 * _det2_bilinear(v1, v2)
    m22 = _det2_bilinear(v2, v2)
    scale = max(abs(m11), abs(m12), abs(m22))
    if scale < 1e-14:
        return None
    m11, m12, m22 = m11 / scale, m12 / scale, m22 / scale
    roots = []
    if abs(m11) > 1e-12:
        roots = list(np.roots([m11, m12, m22]))
    else:
        if abs(m12) > 1e-12:
            roots = [-m22 / m12]
        roots.append(None)  # projective root (alpha, beta) = (1, 0)
    if len(roots) != 2:
        return None
    prods = []
    for r in roots:
        vec = v1 if r is None else r * v1 + v2
        n = np.linalg.norm(vec)
        if n < 1e-12:
            return None
        prods.append(vec / n)
    q1 = range_basis.conj().T @ prods[0]
    q2 = range_basis.conj().T @ prods[1]
    r_f = range_basis.conj().T @ rho_mat @ range_basis
    qq1 = np.outer(q1, q1.conj())
    qq2 = np.outer(q2, q2.conj())
    alpha = float(np.linalg.det(r_f).real)
    beta = float((np.trace(r_f) * np.trace(qq1) - np.trace(r_f @ qq1)).real)
    gamma = float((np.trace(r_f) * np.trace(qq2) - np.trace(r_f @ qq2)).real)
    delta = float((np.trace(qq1) * np.trace(qq2) - np.trace(qq1 @ qq2)).real)
    cands = []
    if abs(beta) > 1e-14:
        cands.append((alpha / beta, 0.0))
    if abs(gamma) > 1e-14:
        cands.append((0.0, alpha / gamma))
    disc = beta * gamma - delta * alpha
    if delta > 1e-14 and disc >= 0.0:
        for sgn in (-1.0, 1.0):
            a = (gamma + sgn * math.sqrt(disc)) / delta
            den = gamma - delta * a
            if abs(den) > 1e-14:
                cands.append((a, (alpha - beta * a) / den))
    best = None
    for a, b in cands:
        if a < -1e-12 or b < -1e-12 or not a + b < 1.0 + 1e-12:
            continue
        rem = r_f - max(a, 0.0) * qq1 - max(b, 0.0) * qq2
        w = np.linalg.eigvalsh(rem)
        if w[0] < -1e-10:
            continue
        lam = min(max(a, 0.0) + max(b, 0.0), 1.0)
        if best is None or lam > best[0]:
            e_frame = np.linalg.eigh(rem)[1][:, -1]
            best = (lam, range_basis @ e_frame)
    return best


def bsa_decompose(
    rho: DensityMatrix,
    restarts: int = 64,
    seed: int = 0,
    certificate_starts: int = 64,
) -> BsaDecomposition:
    """Best separable approximation of a two-qubit state.

    Separable (PPT) inputs return lam = 1 without a remainder; pure
    entangled inputs return lam = 0.  Otherwise the maximal weight is
    searched by simplex restarts over remainders within the range of rho,
    followed by a local-maximality probe at lam + 1e-4 from
    `certificate_starts` perturbed remainders (climbing further if the
    probe does find a feasible point).
    """
    _require_two_qubits(rho)
    if is_ppt(rho, FEAS_EIG_TOL).is_ppt:
        return BsaDecomposition(
            lam=1.0,
            rho_s=rho,
            p_e=None,
            residual_norm=0.0,
            certified=True,
            converged=True,
        )
    w, v = np.linalg.eigh(rho.mat)
    if rho.purity() >= 1 - 1e-10:
        p_e = PureState((2, 2), v[:, -1] / np.linalg.norm(v[:, -1]))
        mixed = DensityMatrix((2, 2), np.eye(4) / 4)
        residual = float(
            np.max(np.abs(rho.mat - np.outer(p_e.amps, p_e.amps.conj())))
        )
        return BsaDecomposition(
            lam=0.0,
            rho_s=mixed,
            p_e=p_e,
            residual_norm=residual,
            certified=True,
            converged=True,
        )

    search = _Search(rho)
    dim = 2 * search.rank

    def nm_score(x):
        e = search.unit_vector(x)
        if e is None:
            return 4.0
        return -search.evaluate(e)[2]

    def classified(x):
        e = search.unit_vector(x)
        if e is None:
            return False, 0.0, None
        feasible, lam, _ = search.evaluate(e)
        return feasible, lam, e

    def coords(e):
        proj = search.range_basis.conj().T @ e
        return np.concatenate([proj.real, proj.imag])

    best_lam = -math.inf
    best_e = None
    if search.rank == 2:
        solved = _solve_rank2(rho.mat, search.range_basis)
        if solved is not None:
            best_lam, best_e = solved
    if best_e is None:
        starts = search.informed_starts()
        for j in range(restarts):
            if j < len(starts):
                x0 = starts[j]
            else:
                x0 = rng_stream(seed, j).standard_normal(dim)
            res = _nelder_mead(nm_score, x0, maxfev=350)
            feasible, lam, e = classified(res.x)
            if feasible and lam > best_lam + 1e-12:
                best_lam, best_e = lam, e
    if best_e is None:
        # no start reached the admissible region: hunt for any remainder
        # with positive PPT margin first, then maximize the weight from it
        def gap_score(x):
            e = search.unit_vector(x)
            return 4.0 if e is None else -search.feasibility_gap(e)

        for j in range(max(4, restarts)):
            x0 = rng_stream(seed, 20_000 + j).standard_normal(dim)
            res = _nelder_mead(gap_score, x0, maxfev=500)
            if -res.fun <= 1e-9:
                continue
            for x_try in (res.x,):
                res2 = _nelder_mead(nm_score, x_try, maxfev=500)
                for x_cand in (res2.x, x_try):
                    feasible, lam, e = classified(x_cand)
                    if feasible and lam > best_lam:
                        best_lam, best_e = lam, e
            if best_e is not None:
                break
    converged = best_e is not None and 0.0 < best_lam <= 1.0

    # climb while the maximality probe can still find feasible points above
    certified = False
    for _ in range(6):
        if not converged:
            break
        lam_probe = best_lam + 1e-4
        if lam_probe >= 1.0:
            certified = True
            break
        improved = None
        base = coords(best_e)
        for j in range(certificate_starts):
            rng = rng_stream(seed, 10_000 + j)
            x0 = base + 0.05 * rng.standard_normal(dim)
            res = _nelder_mead(
                lambda x: -search.margin(lam_probe, search.unit_vector(x))
                if search.unit_vector(x) is not None
                else 4.0,
                x0,
                maxfev=200,
            )
            if -res.fun >= -FEAS_EIG_TOL:
                improved = search.unit_vector(res.x)
                break
        if improved is None:
            certified = True
            break
        res = _nelder_mead(nm_score, coords(improved), maxfev=400)
        feasible, lam, e = classified(res.x)
        if feasible and lam > best_lam:
            best_lam, best_e = lam, e
        else:
            break

    if not converged:
        p_e = PureState((2, 2), v[:, -1])
        return BsaDecomposition(
            lam=0.0,
            rho_s=DensityMatrix((2, 2), np.eye(4) / 4),
            p_e=p_e,
            residual_norm=float(
                np.max(np.abs(rho.mat - np.outer(p_e.amps, p_e.amps.conj())))
            ),
            certified=False,
            converged=False,
        )

    lam = float(min(best_lam, 1.0))
    t_use = 1.0 - lam
    ee = np.outer(best_e, best_e.conj())
    cand = (rho.mat - t_use * ee) / lam
    cand = (cand + cand.conj().T) / 2
    wc, vc = np.linalg.eigh(cand)
    if wc[0] < -FEAS_EIG_TOL:
        # tangency round-off: project onto the PSD cone
        wc = np.clip(wc, 0.0, None)
        cand = (vc * wc) @ vc.conj().T
        cand = (cand + cand.conj().T) / 2
    rho_s = DensityMatrix((2, 2), cand / np.trace(cand).real)
    p_e = PureState((2, 2), best_e)
    recon = lam * rho_s.mat + (1 - lam) * ee
    residual = float(np.max(np.abs(rho.mat - recon)))
    return BsaDecomposition(
        lam=lam,
        rho_s=rho_s,
        p_e=p_e,
        residual_norm=residual,
        certified=certified,
        converged=True,
    )


@dataclass(frozen=True)
class SaturationCheck:
    """Outcome of the concurrence-saturation / zero-weight consistency test."""

    premise_met: bool
    lam: float | None
    consistent: bool
    c_a_bc: float
    c_ab: float


def saturation_check(
    psi: PureState,
    tol: float = 1e-6,
    restarts: int = 16,
    seed: int = 0,
) -> SaturationCheck:
    """When C_A(BC) = C_AB > 0, the AB marginal must be its own pure
    entangled remainder: its best separable approximation has lam = 0.

    Reports the premise, the decomposed weight, and whether it stays below
    ten times the tolerance.
    """
    if len(psi.dims) != 3 or psi.dims[0] != 2 or psi.dims[1] != 2:
        raise WrongDimsError(f"expected dims (2, 2, d), got {psi.dims}")
    rho_ab = partial_trace(psi.density(), (0, 1))
    c_a_bc = pure_concurrence(psi, (0,))
    c_ab = concurrence_2qubit(rho_ab)
    if abs(c_a_bc - c_ab) > tol or c_ab <= tol:
        return SaturationCheck(
            premise_met=False, lam=None, consistent=True, c_a_bc=c_a_bc, c_ab=c_ab
        )
    dec = bsa_decompose(rho_ab, restarts=restarts, seed=derived_seed(seed, 3))
    return SaturationCheck(
        premise_met=True,
        lam=dec.lam,
        consistent=dec.lam <= 10 * tol,
        c_a_bc=c_a_bc,
        c_ab=c_ab,
    )


def werner_state(fidelity: float) -> DensityMatrix:
    """Werner state ``x |Psi-><Psi-| + (1-x) I/4`` with singlet fidelity F.

    F = (1 + 3x)/4; entangled precisely when F > 1/2, where the maximal
    separable weight is 2(1 - F).
    """
    if not 0.25 <= fidelity <= 1.0:
        raise WrongDimsError(f"fidelity {fidelity} outside [1/4, 1]")
    x = (4 * fidelity - 1) / 3
    singlet = np.zeros(4, dtype=complex)
    singlet[1] = 1 / math.sqrt(2)
    singlet[2] = -1 / math.sqrt(2)
    mat = x * np.outer(singlet, singlet.conj()) + (1 - x) * np.eye(4) / 4
    return DensityMatrix((2, 2), mat)
