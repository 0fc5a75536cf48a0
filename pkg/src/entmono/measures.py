"""Entanglement measures: concurrence, concurrence of assistance, and the
convex-roof optimizer that evaluates both on 2xd mixed states.

The closed forms for two qubits (Wootters spin-flip formula and the
fidelity form of the concurrence of assistance) are fast paths and
independent oracles; ``convex_roof`` is the definition-faithful evaluator
that optimizes the average pure-state concurrence over decompositions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numba
import numpy as np

from .errors import BadCutError, RankExceedsEnsembleSizeError, WrongDimsError
from .linalg import sqrt_det2
from .states import (
    DensityMatrix,
    EnsembleRotation,
    PureEnsemble,
    PureState,
    derived_seed,
    haar_rotation,
    hjw_ensemble,
    pure_partial_matrix,
    rng_stream,
    spectral_ensemble,
)

_SIGMA_YY = np.array(
    [[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=float
)


def pure_concurrence(psi: PureState, cut) -> float:
    """Concurrence of a pure state across a bipartition.

    ``sqrt(2 (1 - tr rho^2))`` with rho the reduced state on `cut`.  When
    the cut side is a qubit this equals ``2 sqrt(det rho)``.  Evaluated as
    ``2 sqrt(sum_{i<j} (s_i s_j)^2)`` over the Schmidt coefficients, which
    is the same number without cancellation near product states.
    """
    cut = sorted(set(int(i) for i in cut))
    if not cut or len(cut) >= len(psi.dims):
        raise BadCutError(f"cut {cut} must be a proper non-empty subset")
    v = pure_partial_matrix(psi, cut)
    s2 = np.linalg.svd(v, compute_uv=False) ** 2
    s2 /= s2.sum()
    cross = (s2.sum() ** 2 - np.sum(s2**2)) / 2.0
    return 2.0 * math.sqrt(max(0.0, float(cross)))


def _require_two_qubits(rho: DensityMatrix):
    if rho.dims != (2, 2):
        raise WrongDimsError(f"expected dims (2, 2), got {rho.dims}")


def spin_flip(rho: DensityMatrix) -> np.ndarray:
    """Tilde state ``(sigma_y x sigma_y) conj(rho) (sigma_y x sigma_y)``."""
    _require_two_qubits(rho)
    return _SIGMA_YY @ rho.mat.conj() @ _SIGMA_YY


def _flip_roots(rho: DensityMatrix) -> np.ndarray:
    """Descending square roots of the eigenvalues of ``rho @ spin_flip(rho)``.

    Computed as the singular values of the symmetric matrix
    ``tau_ij = sqrt(w_i w_j) v_i^T (sigma_y x sigma_y) v_j`` over the
    spectral decomposition of rho.  Unlike eigenvalues of the non-Hermitian
    product, small singular values come out with absolute (not square-root
    amplified) precision.
    """
    w, v = np.linalg.eigh(rho.mat)
    keep = w > 1e-16
    u = v[:, keep] * np.sqrt(w[keep])
    tau = u.T @ _SIGMA_YY @ u
    roots = np.zeros(4)
    s = np.linalg.svd(tau, compute_uv=False)
    roots[: s.size] = s
    return roots


def concurrence_2qubit(rho: DensityMatrix) -> float:
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)``."""
    r = _flip_roots(rho)
    return float(max(0.0, r[0] - r[1] - r[2] - r[3]))


def coa_2qubit(rho: DensityMatrix) -> float:
    """Concurrence of assistance of a two-qubit state.

    Equals the fidelity between rho and its spin flip, i.e. the sum of the
    square roots of the eigenvalues of ``rho @ spin_flip(rho)``.
    """
    return float(_flip_roots(rho).sum())


def average_concurrence(ensemble: PureEnsemble, cut=(0,)) -> float:
    """Weighted average pure-state concurrence of an ensemble."""
    return float(sum(p * pure_concurrence(s, cut) for p, s in ensemble.members))


@dataclass(frozen=True)
class RoofConfig:
    """Settings for the convex-roof optimizer.

    `m` is the ensemble size; None selects ``min(4, rank^2)``, which covers
    the optimal-ensemble bound for the rank-2 marginals arising from pure
    2x2xd states.  The first restart starts from the identity rotation
    (the spectral ensemble); the rest from Haar-random rotations.
    """

    mode: Literal["minimize", "maximize"]
    m: int | None = None
    restarts: int = 32
    max_sweeps: int = 200
    objective_tol: float = 1e-12
    seed: int = 0
    kicks: int = 4

    def __post_init__(self):
        if self.mode not in ("minimize", "maximize"):
            raise WrongDimsError(f"unknown mode {self.mode!r}")
        if self.restarts < 1 or self.max_sweeps < 1:
            raise WrongDimsError("restarts and max_sweeps must be >= 1")
        if not self.objective_tol > 0:
            raise WrongDimsError("objective_tol must be positive")
        if self.kicks < 0:
            raise WrongDimsError("kicks must be >= 0")


@dataclass(frozen=True)
class RoofResult:
    value: float
    ensemble: PureEnsemble
    rotation: EnsembleRotation
    converged: bool
    sweeps_used: int


# ---------------------------------------------------------------------------
# Optimizer kernel.
#
# An ensemble of m members is parametrized by a left-orthonormal m x r
# matrix B acting on the scaled spectral vectors (Hughston-Jozsa-Wootters).
# The objective sum_k 2 sqrt(det tr_C |phi_k><phi_k|) needs no member
# normalization: the 2x2 determinant is degree-2 homogeneous, so each term
# already equals p_k times the member concurrence.  det(V V^dagger) of the
# 2xd amplitude block V is the squared norm of its 2x2 minors
# (Cauchy-Binet), so member contributions are cheap polynomial data.
#
# A sweep cycles over member pairs; each pair is rotated by a complex
# Givens rotation (angle, phase), optimized by a bracketed grid search with
# parabolic polish on each coordinate.  The 1-D slices can be multimodal,
# so a plain golden section is not safe; the grid stage brackets the best
# basin first.  Rotations keep B exactly left-orthonormal, and a pair
# update is applied only when it improves the objective, so sweeps are
# monotone.
# ---------------------------------------------------------------------------


@numba.njit(cache=True)
def _member_minors(phi, row, d, idx_i, idx_j, out):
    for t in range(idx_i.size):
        i, j = idx_i[t], idx_j[t]
        out[t] = phi[row, i] * phi[row, d + j] - phi[row, j] * phi[row, d + i]


@numba.njit(cache=True)
def _cross_minors(phi, k, l, d, idx_i, idx_j, out):
    for t in range(idx_i.size):
        i, j = idx_i[t], idx_j[t]
        out[t] = (
            phi[k, i] * phi[l, d + j]
            + phi[l, i] * phi[k, d + j]
            - phi[k, j] * phi[l, d + i]
            - phi[l, j] * phi[k, d + i]
        )


@numba.njit(cache=True)
def _total_value(phi, d, idx_i, idx_j):
    tot = 0.0
    for k in range(phi.shape[0]):
        acc = 0.0
        for t in range(idx_i.size):
            i, j = idx_i[t], idx_j[t]
            w = phi[k, i] * phi[k, d + j] - phi[k, j] * phi[k, d + i]
            acc += w.real * w.real + w.imag * w.imag
        tot += math.sqrt(acc)
    return 2.0 * tot


@numba.njit(cache=True)
def _pair_value(qu, qw, qx, theta, phi_ang):
    c = math.cos(theta)
    s = math.sin(theta)
    z = complex(math.cos(phi_ang), math.sin(phi_ang))
    sz = s * z
    cz = c * z
    a1, b1, g1 = c * c, sz * sz, c * sz
    a2, b2, g2 = s * s, cz * cz, -s * cz
    n1 = 0.0
    n2 = 0.0
    for t in range(qu.size):
        w1 = a1 * qu[t] + b1 * qw[t] + g1 * qx[t]
        w2 = a2 * qu[t] + b2 * qw[t] + g2 * qx[t]
        n1 += w1.real * w1.real + w1.imag * w1.imag
        n2 += w2.real * w2.real + w2.imag * w2.imag
    return 2.0 * (math.sqrt(n1) + math.sqrt(n2))


@numba.njit(cache=True)
def _optimize_pair(qu, qw, qx, sign):
    """Best (theta, phi) for one Givens rotation; (0, 0) if nothing beats it."""
    base = sign * _pair_value(qu, qw, qx, 0.0, 0.0)
    best_v = base
    best_t = 0.0
    best_p = 0.0
    n_t, n_p = 12, 8
    for it in range(n_t):
        theta = -0.5 * math.pi + math.pi * (it + 0.5) / n_t
        for ip in range(n_p):
            phi_ang = math.pi * (ip + 0.5) / n_p
            v = sign * _pair_value(qu, qw, qx, theta, phi_ang)
            if v > best_v:
                best_v, best_t, best_p = v, theta, phi_ang
    h_t = 0.5 * math.pi / n_t
    h_p = 0.5 * math.pi / n_p
    for _ in range(3):
        for off in range(7):
            theta = best_t + h_t * (off - 3) / 3.0
            v = sign * _pair_value(qu, qw, qx, theta, best_p)
            if v > best_v:
                best_v, best_t = v, theta
        for off in range(7):
            phi_ang = best_p + h_p * (off - 3) / 3.0
            v = sign * _pair_value(qu, qw, qx, best_t, phi_ang)
            if v > best_v:
                best_v, best_p = v, phi_ang
        h_t /= 3.0
        h_p /= 3.0
    # parabolic polish through the final bracket of each coordinate
    fm = sign * _pair_value(qu, qw, qx, best_t - h_t, best_p)
    fp = sign * _pair_value(qu, qw, qx, best_t + h_t, best_p)
    denom = fp - 2.0 * best_v + fm
    if denom < -1e-18:
        theta = best_t + 0.5 * h_t * (fm - fp) / denom
        v = sign * _pair_value(qu, qw, qx, theta, best_p)
        if v > best_v:
            best_v, best_t = v, theta
    fm = sign * _pair_value(qu, qw, qx, best_t, best_p - h_p)
    fp = sign * _pair_value(qu, qw, qx, best_t, best_p + h_p)
    denom = fp - 2.0 * best_v + fm
    if denom < -1e-18:
        phi_ang = best_p + 0.5 * h_p * (fm - fp) / denom
        v = sign * _pair_value(qu, qw, qx, best_t, phi_ang)
        if v > best_v:
            best_v, best_p = v, phi_ang
    if best_v <= base:
        return 0.0, 0.0
    return best_t, best_p


@numba.njit(cache=True)
def _pair_exact(qu, qw, qx, sign):
    """Exact pair rotation when members carry a single 2x2 minor (d = 2).

    The two members' minors transform as ``G tau G^T`` for the symmetric
    matrix tau = [[qu, qx/2], [qx/2, qw]].  Takagi-diagonalizing tau gives
    singular values (s1, s2); the pair optimum of |q1'| + |q2'| is s1 + s2
    (maximize) or s1 - s2 (minimize, mixing the Takagi members so one minor
    vanishes).  Returns the Givens (theta, phi) realizing it; sign 0 asks
    for the bare Takagi rotation regardless of objective.
    """
    t00 = qu[0]
    t01 = 0.5 * qx[0]
    t11 = qw[0]
    # H = tau tau^dagger; for symmetric tau this is tau conj(tau)
    h00 = abs(t00) ** 2 + abs(t01) ** 2
    h11 = abs(t11) ** 2 + abs(t01) ** 2
    h01 = t00 * t01.conjugate() + t01 * t11.conjugate()
    mean = 0.5 * (h00 + h11)
    half = math.sqrt(max(0.0, (0.5 * (h00 - h11)) ** 2 + abs(h01) ** 2))
    s1 = math.sqrt(max(0.0, mean + half))
    s2sq = max(0.0, mean - half)
    s2 = math.sqrt(s2sq)
    if s1 < 1e-300:
        return 0.0, 0.0
    # eigenvector of H for s1^2
    if abs(h01) > 1e-30 * s1 * s1:
        x0, x1 = h01, complex(s1 * s1 - h00, 0.0)
        if abs(s1 * s1 - h11) > abs(s1 * s1 - h00):
            x0, x1 = complex(s1 * s1 - h11, 0.0), h01.conjugate()
    elif h00 >= h11:
        x0, x1 = complex(1.0, 0.0), complex(0.0, 0.0)
    else:
        x0, x1 = complex(0.0, 0.0), complex(1.0, 0.0)
    nrm = math.sqrt(abs(x0) ** 2 + abs(x1) ** 2)
    x0 /= nrm
    x1 /= nrm
    # Takagi vector for s1: v = s1 x + tau conj(x), retry with ix if it cancels
    a0 = t00 * x0.conjugate() + t01 * x1.conjugate()
    a1 = t01 * x0.conjugate() + t11 * x1.conjugate()
    v0 = s1 * x0 + a0
    v1 = s1 * x1 + a1
    nv = math.sqrt(abs(v0) ** 2 + abs(v1) ** 2)
    if nv < 1e-8 * s1:
        v0 = 1j * s1 * x0 - 1j * a0
        v1 = 1j * s1 * x1 - 1j * a1
        nv = math.sqrt(abs(v0) ** 2 + abs(v1) ** 2)
        if nv < 1e-300:
            return 0.0, 0.0
    w10 = v0 / nv
    w11 = v1 / nv
    # orthonormal partner, phase-fixed so tau conj(w2) = s2 w2
    w20 = -w11.conjugate()
    w21 = w10.conjugate()
    u0 = t00 * w20.conjugate() + t01 * w21.conjugate()
    u1 = t01 * w20.conjugate() + t11 * w21.conjugate()
    inner = w20.conjugate() * u0 + w21.conjugate() * u1
    if abs(inner) > 1e-300:
        half_phase = inner / abs(inner)
        # e^{-i delta/2}: square root of conj(phase)
        re = math.sqrt(max(0.0, 0.5 * (1.0 + half_phase.real)))
        im = math.sqrt(max(0.0, 0.5 * (1.0 - half_phase.real)))
        if half_phase.imag < 0.0:
            im = -im
        w20 *= complex(re, im)
        w21 *= complex(re, im)
    # G = W^dagger maps the pair onto diag(s1, s2)
    g00 = w10.conjugate()
    g01 = w11.conjugate()
    g10 = w20.conjugate()
    g11 = w21.conjugate()
    if sign < 0.0 and s1 + s2 > 1e-300:
        # mix diag(s1, s2) so the first minor vanishes: K = [[c, is], [is, c]]
        c = math.sqrt(s2 / (s1 + s2))
        s = math.sqrt(s1 / (s1 + s2))
        k01 = complex(0.0, s)
        n00 = c * g00 + k01 * g10
        n01 = c * g01 + k01 * g11
        n10 = k01 * g00 + c * g10
        n11 = k01 * g01 + c * g11
        g00, g01, g10, g11 = n00, n01, n10, n11
    # normalize to Givens form [[c, s z], [-s conj(z), c]] via member phases
    ca = abs(g00)
    sa = abs(g01)
    theta = math.atan2(sa, ca)
    if sa < 1e-15:
        return 0.0, 0.0
    if ca < 1e-300:
        phi_ang = math.atan2(g01.imag, g01.real)
    else:
        b01 = g01 * (g00.conjugate() / ca)
        phi_ang = math.atan2(b01.imag, b01.real)
    return theta, phi_ang


@numba.njit(cache=True)
def _apply_rotation(mat, k, l, theta, phi_ang):
    c = math.cos(theta)
    s = math.sin(theta)
    z = complex(math.cos(phi_ang), math.sin(phi_ang))
    sz = s * z
    for col in range(mat.shape[1]):
        a = mat[k, col]
        b = mat[l, col]
        mat[k, col] = c * a + sz * b
        mat[l, col] = -sz.conjugate() * a + c * b


@numba.njit(cache=True)
def _takagi_sweeps(b, phi, d, idx_i, idx_j, max_sweeps):
    """Jacobi-style sweeps driving the member-minor matrix to its diagonal
    (Takagi) frame; d = 2 path only.  Ignores the objective."""
    m = b.shape[0]
    qu = np.empty(1, np.complex128)
    qw = np.empty(1, np.complex128)
    qx = np.empty(1, np.complex128)
    for _ in range(max_sweeps):
        off = 0.0
        diag = 0.0
        for k in range(m - 1):
            for l in range(k + 1, m):
                _member_minors(phi, k, d, idx_i, idx_j, qu)
                _member_minors(phi, l, d, idx_i, idx_j, qw)
                _cross_minors(phi, k, l, d, idx_i, idx_j, qx)
                off += abs(qx[0]) ** 2
                diag += abs(qu[0]) ** 2 + abs(qw[0]) ** 2
                if abs(qx[0]) < 1e-300:
                    continue
                theta, phi_ang = _pair_exact(qu, qw, qx, 0.0)
                if theta != 0.0 or phi_ang != 0.0:
                    _apply_rotation(b, k, l, theta, phi_ang)
                    _apply_rotation(phi, k, l, theta, phi_ang)
        if off <= 1e-28 * (diag + 1e-300):
            break


@numba.njit(cache=True)
def _phase_balance(b, phi, d, idx_i, idx_j):
    """Minimize-mode escape move for the kinked d = 2 landscape.

    From a (near-)diagonal minor frame with member minors d_k, mixing all
    members through a Hadamard frame with per-member phase rotations makes
    every new minor proportional to ``sum_k e^{i gamma_k} |d_k|``.  The
    phases close that polygon when possible (all concurrences cancel) and
    anti-align around the largest side otherwise.  Applied only when it
    improves the objective, so safe anywhere.
    """
    m = b.shape[0]
    if m < 2 or (m & (m - 1)) != 0:
        return False
    current = _total_value(phi, d, idx_i, idx_j)
    dg = np.empty(m, np.complex128)
    q = np.empty(1, np.complex128)
    for k in range(m):
        _member_minors(phi, k, d, idx_i, idx_j, q)
        dg[k] = q[0]
    ln = np.abs(dg)
    total = ln.sum()
    if total < 1e-300:
        return False
    order = np.argsort(-ln)
    big = order[0]
    gamma = np.empty(m)
    if 2.0 * ln[big] >= total:
        for k in range(m):
            gamma[k] = math.pi
        gamma[big] = 0.0
    else:
        # split the rest into two balanced groups and close the triangle
        sum2 = 0.0
        sum3 = 0.0
        group = np.zeros(m, np.int64)
        group[big] = 1
        for t in range(1, m):
            k = order[t]
            if sum2 <= sum3:
                group[k] = 2
                sum2 += ln[k]
            else:
                group[k] = 3
                sum3 += ln[k]
        a0 = ln[big]
        if sum2 < 1e-300 or sum3 < 1e-300:
            return False
        cos_beta = (sum3 * sum3 - a0 * a0 - sum2 * sum2) / (2.0 * a0 * sum2)
        cos_beta = min(1.0, max(-1.0, cos_beta))
        beta = math.acos(cos_beta)
        vx = -a0 - sum2 * math.cos(beta)
        vy = -sum2 * math.sin(beta)
        third = math.atan2(vy, vx)
        for k in range(m):
            if group[k] == 1:
                gamma[k] = 0.0
            elif group[k] == 2:
                gamma[k] = beta
            else:
                gamma[k] = third
    # Sylvester Hadamard frame times member phase rotations
    had = np.ones((1, 1))
    size = 1
    while size < m:
        nxt = np.empty((2 * size, 2 * size))
        for i in range(size):
            for j in range(size):
                v = had[i, j]
                nxt[i, j] = v
                nxt[i, j + size] = v
                nxt[i + size, j] = v
                nxt[i + size, j + size] = -v
        had = nxt
        size *= 2
    mix = np.empty((m, m), np.complex128)
    scale = 1.0 / math.sqrt(m)
    for j in range(m):
        alpha = 0.5 * (gamma[j] - math.atan2(dg[j].imag, dg[j].real))
        ph = complex(math.cos(alpha), math.sin(alpha)) * scale
        for i in range(m):
            mix[i, j] = had[i, j] * ph
    new_b = np.dot(mix, b)
    new_phi = np.dot(mix, phi)
    if _total_value(new_phi, d, idx_i, idx_j) < current:
        b[:] = new_b
        phi[:] = new_phi
        return True
    return False


@numba.njit(cache=True)
def _sweep_to_convergence(b, phi, d, idx_i, idx_j, sign, max_sweeps, tol):
    n_minors = idx_i.size
    qu = np.empty(n_minors, np.complex128)
    qw = np.empty(n_minors, np.complex128)
    qx = np.empty(n_minors, np.complex128)
    m = b.shape[0]
    value = _total_value(phi, d, idx_i, idx_j)
    sweeps_used = 0
    converged = n_minors == 0 or m == 1
    for _ in range(max_sweeps):
        if converged:
            break
        prev = value
        for k in range(m - 1):
            for l in range(k + 1, m):
                _member_minors(phi, k, d, idx_i, idx_j, qu)
                _member_minors(phi, l, d, idx_i, idx_j, qw)
                _cross_minors(phi, k, l, d, idx_i, idx_j, qx)
                scale = 0.0
                for t in range(n_minors):
                    scale = max(scale, abs(qu[t]), abs(qw[t]), abs(qx[t]))
                if scale < 1e-300:
                    continue
                if n_minors == 1:
                    theta, phi_ang = _pair_exact(qu, qw, qx, sign)
                    if (theta != 0.0 or phi_ang != 0.0) and (
                        sign * _pair_value(qu, qw, qx, theta, phi_ang)
                        <= sign * _pair_value(qu, qw, qx, 0.0, 0.0)
                    ):
                        theta, phi_ang = 0.0, 0.0
                else:
                    theta, phi_ang = _optimize_pair(qu, qw, qx, sign)
                if theta != 0.0 or phi_ang != 0.0:
                    _apply_rotation(b, k, l, theta, phi_ang)
                    _apply_rotation(phi, k, l, theta, phi_ang)
        value = _total_value(phi, d, idx_i, idx_j)
        sweeps_used += 1
        if abs(value - prev) < tol:
            converged = True
    return value, sweeps_used, converged


@numba.njit(cache=True)
def _run_restart(b, s, d, idx_i, idx_j, sign, max_sweeps, tol, kicks, kick_seed):
    """One restart: converge, then escape pairwise-stationary points with
    seeded random kicks, keeping the best rotation seen."""
    phi = np.dot(b, s)
    m = b.shape[0]
    value, sweeps_used, converged = _sweep_to_convergence(
        b, phi, d, idx_i, idx_j, sign, max_sweeps, tol
    )
    best_value = value
    best_converged = converged
    best_b = b.copy()
    if sign < 0.0 and idx_i.size == 1 and m >= 2 and (m & (m - 1)) == 0:
        # pairwise descent alone stalls on the kinked minimize landscape;
        # detour through the Takagi frame and balance member phases there
        _takagi_sweeps(b, phi, d, idx_i, idx_j, 30)
        _phase_balance(b, phi, d, idx_i, idx_j)
        value, sweeps, converged = _sweep_to_convergence(
            b, phi, d, idx_i, idx_j, sign, max_sweeps, tol
        )
        sweeps_used += sweeps
        if sign * value > sign * best_value:
            best_value = value
            best_converged = converged
            best_b = b.copy()
        else:
            b[:] = best_b
            phi[:] = np.dot(b, s)
    np.random.seed(kick_seed)
    for _ in range(kicks):
        if m < 2 or idx_i.size == 0:
            break
        for k in range(m - 1):
            theta = 0.35 * np.random.standard_normal()
            phi_ang = np.random.uniform(0.0, np.pi)
            _apply_rotation(b, k, k + 1, theta, phi_ang)
            _apply_rotation(phi, k, k + 1, theta, phi_ang)
        value, sweeps, converged = _sweep_to_convergence(
            b, phi, d, idx_i, idx_j, sign, max_sweeps, tol
        )
        sweeps_used += sweeps
        if sign * value > sign * best_value:
            best_value = value
            best_converged = converged
            best_b = b.copy()
        else:
            # hop failed: restart the next kick from the best point
            b[:] = best_b
            phi[:] = np.dot(b, s)
    b[:] = best_b
    return best_value, sweeps_used, best_converged


def convex_roof(rho: DensityMatrix, config: RoofConfig) -> RoofResult:
    """Optimize the average concurrence over decompositions of a 2xd state.

    Returns the best ensemble found over ``config.restarts`` independent
    starts, with ties broken by lowest restart index.  The value is a
    certified average of a genuine decomposition, hence an upper bound of
    the roof minimum and a lower bound of the roof maximum.
    """
    if len(rho.dims) != 2 or rho.dims[0] != 2:
        raise WrongDimsError(f"convex_roof needs dims (2, d), got {rho.dims}")
    d = rho.dims[1]
    spectral = spectral_ensemble(rho)
    r = len(spectral.members)
    m = config.m if config.m is not None else min(4, r * r)
    if m < r:
        raise RankExceedsEnsembleSizeError(f"ensemble size {m} < rank {r}")
    scaled = np.array(
        [np.sqrt(p) * st.amps for p, st in spectral.members], dtype=complex
    )
    idx_i, idx_j = (a.astype(np.int64) for a in np.triu_indices(d, 1))
    sign = 1.0 if config.mode == "maximize" else -1.0

    best = None
    for j in range(config.restarts):
        if j == 0:
            b = np.eye(m, r, dtype=complex)
        else:
            b = np.array(haar_rotation(m, r, rng_stream(config.seed, j)).coeffs)
        b = np.ascontiguousarray(b)
        value, sweeps, converged = _run_restart(
            b,
            np.ascontiguousarray(scaled),
            d,
            idx_i,
            idx_j,
            sign,
            config.max_sweeps,
            config.objective_tol,
            config.kicks,
            derived_seed(config.seed, j) % 2**31,
        )
        if best is None or sign * value > sign * best[0] + 1e-15:
            best = (value, b, sweeps, converged)
    value, b, sweeps, converged = best
    rotation = EnsembleRotation(b)
    ensemble = hjw_ensemble(spectral, rotation)
    return RoofResult(
        value=float(value),
        ensemble=ensemble,
        rotation=rotation,
        converged=bool(converged),
        sweeps_used=int(sweeps),
    )


def roof_value_check(result: RoofResult) -> float:
    """Recompute sum_k p_k C(phi_k) of the returned ensemble.

    Independent of the kernel arithmetic: uses the closed-form 2x2
    determinant on each member's qubit marginal.
    """
    total = 0.0
    for p, st in result.ensemble.members:
        v = pure_partial_matrix(st, (0,))
        total += p * 2.0 * sqrt_det2(v @ v.conj().T)
    return total
