"""Interpolative decomposition of a snapshot matrix.

A rank-r interpolative decomposition approximates L by r of its own columns
(the column skeleton) times a coefficient matrix that carries an exact r x r
identity block on the selected columns:

    L  ~=  L(:, selected) @ C,      C[:, selected] = I.

Column selection is greedy max-residual-norm QR pivoting; the coefficient
block Z solves R11 Z = R12 from the pivoted QR factors, falling back to the
minimum-Frobenius-norm least-squares solution when R11 is ill-conditioned.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, ToleranceUnreachable
from .linalg import _as_matrix, pivoted_qr, pseudo_inverse, spectral_norm
from .snapshots import SnapshotMatrix

__all__ = ["InterpDecomposition", "build_id", "reconstruct"]

#: Condition estimate of R11 above which the minimum-norm solve is used.
ILL_CONDITION_LIMIT = 1e8


@dataclass(frozen=True)
class InterpDecomposition:
    """Result of :func:`build_id`.

    ``selected`` are the skeleton column indices into the source matrix;
    ``skeleton`` holds those columns verbatim; ``coeffs`` is the r x N
    coefficient matrix; ``residual_norm`` is the spectral norm of the
    reconstruction error, recomputed directly at build time.
    """

    rank: int
    selected: tuple[int, ...]
    skeleton: np.ndarray
    coeffs: np.ndarray
    residual_norm: float

    def __post_init__(self):
        sel = tuple(int(j) for j in self.selected)
        skel = np.asarray(self.skeleton, dtype=np.float64)
        cf = np.asarray(self.coeffs, dtype=np.float64)
        n = cf.shape[1]
        if self.rank != len(sel):
            raise DimensionMismatch("rank must equal the number of selected columns")
        if len(set(sel)) != len(sel):
            raise DimensionMismatch("selected column indices must be distinct")
        if any(j < 0 or j >= n for j in sel):
            raise DimensionMismatch("selected column index out of range")
        if skel.ndim != 2 or skel.shape[1] != self.rank:
            raise DimensionMismatch("skeleton must have one column per selected index")
        if cf.ndim != 2 or cf.shape[0] != self.rank:
            raise DimensionMismatch("coeffs must have one row per selected index")
        if self.rank and not np.allclose(
            cf[:, list(sel)], np.eye(self.rank), rtol=0.0, atol=1e-12
        ):
            raise DimensionMismatch("coeffs must carry an identity block on selected columns")
        skel = skel.copy()
        cf = cf.copy()
        skel.flags.writeable = False
        cf.flags.writeable = False
        object.__setattr__(self, "selected", sel)
        object.__setattr__(self, "skeleton", skel)
        object.__setattr__(self, "coeffs", cf)
        object.__setattr__(self, "residual_norm", float(self.residual_norm))

    @property
    def n_samples(self) -> int:
        return self.coeffs.shape[1]

    def coeff_norm(self) -> float:
        """Spectral norm of the coefficient matrix."""
        return spectral_norm(self.coeffs)


def _solve_coefficient_block(r11: np.ndarray, r12: np.ndarray) -> np.ndarray:
    """Solve R11 Z = R12; minimum-Frobenius-norm solution if ill-conditioned."""
    r = r11.shape[0]
    if r12.shape[1] == 0:
        return np.zeros((r, 0))
    s = np.linalg.svd(r11, compute_uv=False)
    ill = s[-1] == 0.0 or s[0] / s[-1] > ILL_CONDITION_LIMIT
    if ill:
        return pseudo_inverse(r11, cutoff=1e-12) @ r12
    return scipy.linalg.solve_triangular(r11, r12)


def _assemble(low: np.ndarray, perm: np.ndarray, r_factor: np.ndarray, rank: int):
    """Build (selected, skeleton, coeffs, residual) for a given truncation rank."""
    n = low.shape[1]
    selected = tuple(int(j) for j in perm[:rank])
    z = _solve_coefficient_block(r_factor[:rank, :rank], r_factor[:rank, rank:])
    coeffs = np.zeros((rank, n))
    coeffs[np.arange(rank), list(selected)] = 1.0
    coeffs[:, perm[rank:]] = z
    skeleton = low[:, list(selected)]
    if rank == n:
        # all columns selected: coeffs is an exact permuted identity
        residual = 0.0
    else:
        residual = spectral_norm(low - skeleton @ coeffs)
    return selected, skeleton, coeffs, residual


def build_id(low, *, rank: int | None = None, tol: float | None = None) -> InterpDecomposition:
    """Build the interpolative decomposition of ``low``.

    Exactly one of ``rank`` (fixed rank) or ``tol`` (smallest rank whose
    reconstruction residual, measured in the spectral norm, is <= tol) must
    be given. ``low`` may be a :class:`SnapshotMatrix` or a plain array.

    Raises :class:`ToleranceUnreachable` when even the full-rank
    decomposition cannot meet ``tol``.
    """
    data = low.data if isinstance(low, SnapshotMatrix) else _as_matrix(low, "L")
    if (rank is None) == (tol is None):
        raise DimensionMismatch("exactly one of rank= or tol= must be given")

    if rank is not None:
        q, r_factor, perm, got = pivoted_qr(data, rank=rank)
        del q
        selected, skeleton, coeffs, residual = _assemble(data, perm, r_factor, got)
        return InterpDecomposition(
            rank=got,
            selected=selected,
            skeleton=skeleton,
            coeffs=coeffs,
            residual_norm=residual,
        )

    # tolerance mode: the pivot order does not depend on the truncation rank,
    # so factor once at full rank and scan for the smallest admissible rank
    if tol < 0.0 or not np.isfinite(tol):
        raise DimensionMismatch(f"tolerance must be finite and >= 0, got {tol}")
    max_rank = min(data.shape)
    q, r_factor, perm, avail = pivoted_qr(data, rank=max_rank)
    del q
    if avail == 0:
        # all-zero matrix: the empty decomposition already reconstructs it
        selected, skeleton, coeffs, residual = _assemble(data, perm, r_factor, 0)
        return InterpDecomposition(
            rank=0, selected=selected, skeleton=skeleton,
            coeffs=coeffs, residual_norm=residual,
        )
    for cand in range(1, avail + 1):
        selected, skeleton, coeffs, residual = _assemble(data, perm, r_factor, cand)
        if residual <= tol:
            return InterpDecomposition(
                rank=cand,
                selected=selected,
                skeleton=skeleton,
                coeffs=coeffs,
                residual_norm=residual,
            )
    raise ToleranceUnreachable(
        f"tolerance {tol:g} below the achievable residual {residual:g} at rank {avail}"
    )


def reconstruct(decomposition: InterpDecomposition) -> np.ndarray:
    """Low-rank reconstruction skeleton @ coeffs (dim x n_samples)."""
    return decomposition.skeleton @ decomposition.coeffs
