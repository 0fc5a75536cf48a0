"""Quantum state containers, tensor-factor bookkeeping, and sampling.

Pure states are flat complex vectors over an ordered list of subsystem
dimensions with A-major indexing: basis label (i_A, i_B, i_C) lives at
flat index ``i_A*(d_B*d_C) + i_B*d_C + i_C``.  Density matrices follow the
same convention on both indices.  The JSON file formats used by the CLI
are defined at the bottom of this module.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    BadDimsError,
    BadRankError,
    BadSubsystemError,
    DimMismatchError,
    NotBipartiteError,
    NotLeftOrthonormalError,
    ShapeMismatchError,
)
from .linalg import as_complex_matrix, hermiticity_defect, psd_sqrt

NORM_TOL = 1e-10
WEIGHT_DROP_TOL = 1e-14


def rng_stream(seed: int, *key: int) -> np.random.Generator:
    """Independent PCG64 stream derived from (seed, key).

    Sample k of a scan uses ``rng_stream(seed, k)`` so results do not
    depend on thread scheduling or worker count.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def derived_seed(seed: int, *key: int) -> int:
    """Deterministic integer sub-seed for nested seeded components."""
    return int(np.random.SeedSequence(seed, spawn_key=key).generate_state(1)[0])


def _check_dims(dims) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise BadDimsError(f"invalid subsystem dimensions {dims}")
    return dims


@dataclass(frozen=True)
class PureState:
    """Normalized complex amplitude vector over subsystem dimensions."""

    dims: tuple[int, ...]
    amps: np.ndarray

    def __post_init__(self):
        dims = _check_dims(self.dims)
        object.__setattr__(self, "dims", dims)
        amps = np.ascontiguousarray(self.amps, dtype=complex).reshape(-1)
        if amps.size != math.prod(dims):
            raise BadDimsError(f"{amps.size} amplitudes for dims {dims}")
        if not np.all(np.isfinite(amps.view(float))):
            raise BadDimsError("non-finite amplitudes")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise BadDimsError(f"state norm {norm} is not 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per subsystem."""
        return self.amps.reshape(self.dims)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.dims, np.outer(self.amps, self.amps.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, PSD, unit-trace matrix over subsystem dimensions."""

    dims: tuple[int, ...]
    mat: np.ndarray

    def __post_init__(self):
        dims = _check_dims(self.dims)
        object.__setattr__(self, "dims", dims)
        mat = as_complex_matrix(self.mat)
        n = math.prod(dims)
        if mat.shape != (n, n):
            raise BadDimsError(f"matrix shape {mat.shape} for dims {dims}")
        if hermiticity_defect(mat) > NORM_TOL:
            raise BadDimsError("matrix is not Hermitian within 1e-10")
        tr = float(np.trace(mat).real)
        if abs(tr - 1.0) > NORM_TOL:
            raise BadDimsError(f"trace {tr} is not 1")
        if float(np.linalg.eigvalsh(mat)[0]) < -NORM_TOL:
            raise BadDimsError("matrix has an eigenvalue below -1e-10")
        mat = np.array(mat)
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    def purity(self) -> float:
        return float(np.sum(np.abs(self.mat) ** 2))


@dataclass(frozen=True)
class PureEnsemble:
    """Weighted pure-state decomposition of a density matrix."""

    members: tuple[tuple[float, PureState], ...]

    def __post_init__(self):
        members = tuple((float(p), s) for p, s in self.members)
        if not members:
            raise BadDimsError("ensemble has no members")
        if any(p < -WEIGHT_DROP_TOL for p, _ in members):
            raise BadDimsError("negative ensemble weight")
        total = sum(p for p, _ in members)
        if abs(total - 1.0) > NORM_TOL:
            raise BadDimsError(f"ensemble weights sum to {total}")
        object.__setattr__(self, "members", members)

    def mixture(self) -> np.ndarray:
        """The represented density matrix, sum_k p_k |phi_k><phi_k|."""
        out = np.zeros((self.members[0][1].amps.size,) * 2, dtype=complex)
        for p, s in self.members:
            out += p * np.outer(s.amps, s.amps.conj())
        return out


@dataclass(frozen=True)
class EnsembleRotation:
    """Left-orthonormal m x r coefficient matrix mapping the spectral
    ensemble of a rank-r state to an m-member ensemble."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = as_complex_matrix(self.coeffs)
        m, r = c.shape
        if m < r:
            raise ShapeMismatchError(f"rotation is {m}x{r}, needs m >= r")
        gram = c.conj().T @ c
        if np.max(np.abs(gram - np.eye(r))) > NORM_TOL:
            raise NotLeftOrthonormalError("coeffs^dagger @ coeffs is not identity")
        c = np.array(c)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out all subsystems not listed in `keep`.

    Kept subsystems stay in their original order.
    """
    n = len(rho.dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= n:
        raise BadSubsystemError(f"keep={keep} for {n} subsystems")
    t = rho.mat.reshape(rho.dims + rho.dims)
    row = list(range(n))
    col = [n + i if i in keep else i for i in range(n)]
    out = [i for i in keep] + [n + i for i in keep]
    kept_dims = tuple(rho.dims[i] for i in keep)
    d = math.prod(kept_dims)
    reduced = np.einsum(t, row + col, out).reshape(d, d)
    reduced = (reduced + reduced.conj().T) / 2
    return DensityMatrix(kept_dims, reduced)


def pure_partial_matrix(psi: PureState, keep) -> np.ndarray:
    """Amplitudes of a pure state reshaped to (kept, traced) axes.

    ``V @ V.conj().T`` is the reduced density matrix on `keep`; the
    singular values of V give its spectrum without forming the matrix.
    """
    n = len(psi.dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= n:
        raise BadSubsystemError(f"keep={keep} for {n} subsystems")
    rest = [i for i in range(n) if i not in keep]
    t = psi.tensor().transpose(keep + rest)
    d_keep = math.prod(psi.dims[i] for i in keep)
    return t.reshape(d_keep, -1)


def partial_transpose(rho: DensityMatrix, subsystem: int) -> np.ndarray:
    """Transpose the indices of one factor of a bipartite density matrix.

    Returns a plain matrix: the result is Hermitian and trace one but may
    have negative eigenvalues.
    """
    if len(rho.dims) != 2:
        raise NotBipartiteError(f"state has {len(rho.dims)} subsystems")
    if subsystem not in (0, 1):
        raise BadSubsystemError(f"subsystem {subsystem} not in (0, 1)")
    da, db = rho.dims
    t = rho.mat.reshape(da, db, da, db)
    t = t.transpose(2, 1, 0, 3) if subsystem == 0 else t.transpose(0, 3, 2, 1)
    return t.reshape(da * db, da * db)


class PptResult(NamedTuple):
    is_ppt: bool
    min_eigenvalue: float


def is_ppt(rho: DensityMatrix, tol: float = 1e-10) -> PptResult:
    """Peres-Horodecki test: does the partial transpose stay PSD?

    For 2x2 and 2x3 systems this decides separability exactly.
    """
    pt = partial_transpose(rho, 1)
    min_eig = float(np.linalg.eigvalsh(pt)[0])
    return PptResult(min_eig >= -tol, min_eig)


def spectral_ensemble(rho: DensityMatrix, rank_tol: float = 1e-12) -> PureEnsemble:
    """Eigen-decomposition of `rho` as an ensemble of its eigenvectors.

    Eigenvalues at or below `rank_tol` are dropped; the remaining weights
    are renormalized by their sum.
    """
    w, v = np.linalg.eigh(rho.mat)
    keep = w > rank_tol
    w = w[keep]
    members = tuple(
        (float(p / w.sum()), PureState(rho.dims, v[:, i] / np.linalg.norm(v[:, i])))
        for i, p in zip(np.nonzero(keep)[0], w)
    )
    return PureEnsemble(members)


def hjw_ensemble(spectral: PureEnsemble, rotation: EnsembleRotation) -> PureEnsemble:
    """Apply an ensemble rotation to a spectral decomposition.

    Every decomposition of a density matrix arises this way from its
    spectral ensemble (Hughston-Jozsa-Wootters): member k is the
    normalization of ``sum_i coeffs[k,i] * sqrt(p_i) * |e_i>``.  Members
    with weight below 1e-14 are dropped.
    """
    m, r = rotation.coeffs.shape
    if r != len(spectral.members):
        raise ShapeMismatchError(
            f"rotation has {r} columns for {len(spectral.members)} spectral members"
        )
    dims = spectral.members[0][1].dims
    scaled = np.array([np.sqrt(p) * s.amps for p, s in spectral.members])
    vecs = rotation.coeffs @ scaled
    weights = np.einsum("ki,ki->k", vecs, vecs.conj()).real
    members = tuple(
        (float(p), PureState(dims, v / np.sqrt(p)))
        for p, v in zip(weights, vecs)
        if p >= WEIGHT_DROP_TOL
    )
    return PureEnsemble(members)


def haar_rotation(m: int, r: int, rng: np.random.Generator) -> EnsembleRotation:
    """Haar-distributed left-orthonormal m x r coefficient matrix."""
    g = rng.standard_normal((m, r)) + 1j * rng.standard_normal((m, r))
    q, rr = np.linalg.qr(g)
    d = np.diagonal(rr)
    return EnsembleRotation(q * (d / np.abs(d)))


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed n x n unitary (QR of a Ginibre matrix, phase-fixed)."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_pure(dims, seed: int | np.random.Generator) -> PureState:
    """Haar-random pure state: normalized i.i.d. complex Gaussians.

    Deterministic for a fixed integer seed; a Generator may be passed
    directly for pre-derived streams.
    """
    dims = _check_dims(dims)
    rng = seed if isinstance(seed, np.random.Generator) else rng_stream(int(seed))
    n = math.prod(dims)
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return PureState(dims, z / np.linalg.norm(z))


def random_density(dims, rank: int, seed: int | np.random.Generator) -> DensityMatrix:
    """Random density matrix ``G G^dagger / tr`` for a Gaussian n x rank G."""
    dims = _check_dims(dims)
    n = math.prod(dims)
    if not 1 <= rank <= n:
        raise BadRankError(f"rank {rank} outside [1, {n}]")
    rng = seed if isinstance(seed, np.random.Generator) else rng_stream(int(seed))
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    m = g @ g.conj().T
    return DensityMatrix(dims, m / np.trace(m).real)


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity ``tr sqrt(sqrt(rho) sigma sqrt(rho))``.

    Evaluated as the trace norm of ``sqrt(sigma) sqrt(rho)``: singular
    values carry absolute precision, so near-zero spectrum does not get
    square-root amplified.
    """
    if rho.dims != sigma.dims:
        raise DimMismatchError(f"dims {rho.dims} vs {sigma.dims}")
    product = psd_sqrt(sigma.mat) @ psd_sqrt(rho.mat)
    return float(np.linalg.svd(product, compute_uv=False).sum())


# ---------------------------------------------------------------------------
# File formats (consumed by the CLI)
#
# Pure state:     {"dims": [2, 2, 3], "amps": [[re, im], ...]}  A-major order
# Density matrix: {"dims": [2, 2],    "mat":  [[re, im], ...]}  row-major
# ---------------------------------------------------------------------------


def _pairs(values: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in values.reshape(-1)]


def _from_pairs(pairs, field: str) -> np.ndarray:
    try:
        arr = np.asarray(pairs, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"field '{field}' is not a list of [re, im] pairs") from exc
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"field '{field}' is not a list of [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def state_to_dict(psi: PureState) -> dict:
    return {"dims": list(psi.dims), "amps": _pairs(psi.amps)}


def state_from_dict(obj: dict) -> PureState:
    for field in ("dims", "amps"):
        if field not in obj:
            raise ValueError(f"missing field '{field}'")
    amps = _from_pairs(obj["amps"], "amps")
    return PureState(tuple(obj["dims"]), amps)


def density_to_dict(rho: DensityMatrix) -> dict:
    return {"dims": list(rho.dims), "mat": _pairs(rho.mat)}


def density_from_dict(obj: dict) -> DensityMatrix:
    for field in ("dims", "mat"):
        if field not in obj:
            raise ValueError(f"missing field '{field}'")
    flat = _from_pairs(obj["mat"], "mat")
    n = math.prod(int(d) for d in obj["dims"])
    if flat.size != n * n:
        raise ValueError(f"field 'mat' has {flat.size} entries, expected {n * n}")
    return DensityMatrix(tuple(obj["dims"]), flat.reshape(n, n))


def load_state(path) -> PureState:
    with open(path) as fh:
        return state_from_dict(json.load(fh))


def load_density(path) -> DensityMatrix:
    with open(path) as fh:
        return density_from_dict(json.load(fh))
