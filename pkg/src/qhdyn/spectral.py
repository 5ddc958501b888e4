"""Biorthogonal eigensystems of non-Hermitian matrices, tracked along a grid.

An N x N diagonalizable matrix H owns N eigenvalue doublets: right kets
H|n> = E_n|n> and left bras <<n|H = E_n<<n|, normalized to <<m|n> = delta_mn
with completeness sum_n |n><<n| = I.  Near an exceptional point a left-right
pair becomes orthogonal and the construction degenerates; that is detected via
the raw overlap magnitude, not via Jordan-form analysis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import AmbiguousMatchError, ComplexSpectrumError, ExceptionalPointError

# raw left-right overlap magnitude below which H is treated as defective
EP_OVERLAP_TOL = 1e-8

# |Im E| above which a spectrum is not accepted as real
REALITY_TOL = 1e-10

# two continuity-matching candidates closer than this are ambiguous
AMBIGUITY_TOL = 1e-6

_BIORTHO_TOL = 1e-10
_EIGEN_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class BiorthogonalFrame:
    """Eigenvalue doublets of one matrix at one time.

    energies      (N,) complex eigenvalues E_n
    right_kets    (N, N), column n is |n>
    left_bras     (N, N), row n is <<n|
    raw_overlaps  (N,) pre-normalization |<<n|n>| magnitudes (conditioning
                  diagnostic; 1 for a Hermitian matrix, -> 0 at an
                  exceptional point)
    """

    t: float
    energies: np.ndarray
    right_kets: np.ndarray
    left_bras: np.ndarray
    raw_overlaps: np.ndarray

    @property
    def dimension(self) -> int:
        return self.energies.shape[0]

    @property
    def spectrum_is_real(self) -> bool:
        return bool(np.max(np.abs(self.energies.imag)) < REALITY_TOL)

    def reconstruct(self) -> np.ndarray:
        """sum_n |n> E_n <<n| -- must reproduce the source matrix."""
        return self.right_kets @ np.diag(self.energies) @ self.left_bras

    def validate(self, matrix: np.ndarray | None = None):
        """Raise unless biorthonormality, completeness, and (optionally) the
        eigen-residuals hold at their standard tolerances."""
        n = self.dimension
        gram = self.left_bras @ self.right_kets
        bi_res = np.max(np.abs(gram - np.eye(n)))
        complete_res = np.max(np.abs(self.right_kets @ self.left_bras - np.eye(n)))
        if bi_res > _BIORTHO_TOL or complete_res > _BIORTHO_TOL:
            raise ExceptionalPointError(
                "biorthogonal frame validation failed "
                f"(biorthonormality residual {bi_res:.3e}, completeness residual "
                f"{complete_res:.3e}); eigenvector system is numerically degenerate"
            )
        if matrix is not None:
            for k in range(n):
                r = np.max(np.abs(matrix @ self.right_kets[:, k] - self.energies[k] * self.right_kets[:, k]))
                l = np.max(np.abs(self.left_bras[k] @ matrix - self.energies[k] * self.left_bras[k]))
                if r > _EIGEN_RESIDUAL_TOL or l > _EIGEN_RESIDUAL_TOL:
                    raise ExceptionalPointError(
                        f"eigenpair {k} residual too large (right {r:.3e}, left {l:.3e})"
                    )


def eig_biorthogonal(
    H: np.ndarray,
    reality_policy: str = "report",
    t: float = 0.0,
) -> BiorthogonalFrame:
    """Biorthogonal eigendecomposition of a complex square matrix.

    Normalization convention: <<n|n> = 1 with the largest-magnitude component
    of each |n> made real and positive.  Eigenpairs are ordered by
    (Re E, Im E) ascending; continuity tracking may reorder them later.

    reality_policy 'assert' raises `ComplexSpectrumError` when any
    |Im E_n| >= 1e-10; 'report' leaves reality to the caller (the frame
    exposes `spectrum_is_real`).

    Raises `ExceptionalPointError` when any raw left-right overlap magnitude
    falls below 1e-8 (defective or near-defective input).
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    if reality_policy not in ("assert", "report"):
        raise ValueError(f"unknown reality_policy {reality_policy!r}")
    n = H.shape[0]

    w, vl, vr = scipy.linalg.eig(H, left=True, right=True)

    # LAPACK returns unit-norm columns; the diagonal overlaps measure how far
    # the left and right systems are from mutual degeneracy.
    raw = np.array([np.vdot(vl[:, k], vr[:, k]) for k in range(n)])
    worst = np.min(np.abs(raw))
    if worst < EP_OVERLAP_TOL:
        raise ExceptionalPointError(
            f"raw left-right overlap {worst:.3e} below {EP_OVERLAP_TOL:.0e}: "
            "matrix is defective or near an exceptional point"
        )
    if reality_policy == "assert":
        worst_im = float(np.max(np.abs(w.imag)))
        if worst_im >= REALITY_TOL:
            raise ComplexSpectrumError(
                f"spectrum has |Im E| = {worst_im:.3e} >= {REALITY_TOL:.0e} "
                "under reality_policy='assert'"
            )

    order = np.lexsort((w.imag, w.real))
    w = w[order]
    vr = vr[:, order]
    vl = vl[:, order]
    raw = raw[order]

    kets = np.empty((n, n), dtype=complex)
    bras = np.empty((n, n), dtype=complex)
    for k in range(n):
        v = vr[:, k]
        pivot = int(np.argmax(np.abs(v)))
        v = v * (abs(v[pivot]) / v[pivot])
        b = vl[:, k].conj()
        b = b / (b @ v)
        kets[:, k] = v
        bras[k, :] = b

    frame = BiorthogonalFrame(
        t=float(t),
        energies=w,
        right_kets=kets,
        left_bras=bras,
        raw_overlaps=np.abs(raw),
    )
    frame.validate(H)
    return frame


def track_continuity(prev: BiorthogonalFrame, cur: BiorthogonalFrame) -> BiorthogonalFrame:
    """Align ``cur`` with ``prev`` across one grid step.

    Eigenpairs of ``cur`` are re-ordered so index n maximizes
    |<<n_prev|n_cur>|, then re-phased so that overlap is real and positive;
    biorthonormality is re-imposed afterwards.  Matching is by eigenvector
    overlap, not by eigenvalue sorting, so branches may cross in E without
    losing their identity.

    Raises `AmbiguousMatchError` when the assignment is not a unique
    permutation (two candidate overlaps within 1e-6 of each other, or two
    rows claiming the same column).
    """
    n = prev.dimension
    if cur.dimension != n:
        raise ValueError("frames have different dimensions")

    overlaps = prev.left_bras @ cur.right_kets
    mags = np.abs(overlaps)

    perm = np.empty(n, dtype=int)
    for m in range(n):
        row = mags[m]
        best = int(np.argmax(row))
        if n > 1:
            runner_up = np.max(np.delete(row, best))
            if row[best] - runner_up < AMBIGUITY_TOL:
                raise AmbiguousMatchError(
                    f"continuity match for eigenpair {m} at t={cur.t:g} is ambiguous "
                    f"(best {row[best]:.3e} vs runner-up {runner_up:.3e})"
                )
        perm[m] = best
    if len(set(perm.tolist())) != n:
        raise AmbiguousMatchError(
            f"continuity matching at t={cur.t:g} is not a permutation: {perm.tolist()}"
        )

    kets = cur.right_kets[:, perm].copy()
    bras = cur.left_bras[perm, :].copy()
    energies = cur.energies[perm].copy()
    raw = cur.raw_overlaps[perm].copy()

    for m in range(n):
        o = overlaps[m, perm[m]]
        if abs(o) == 0.0:
            raise AmbiguousMatchError(f"vanishing continuity overlap for eigenpair {m}")
        z = np.conj(o) / abs(o)
        kets[:, m] *= z
        bras[m, :] *= np.conj(z)
        # re-impose <<m|m> = 1 exactly
        bras[m, :] /= bras[m, :] @ kets[:, m]

    return BiorthogonalFrame(
        t=cur.t,
        energies=energies,
        right_kets=kets,
        left_bras=bras,
        raw_overlaps=raw,
    )
