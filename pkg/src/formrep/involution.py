"""Self-adjoint involutions and the block splitting they induce.

A self-adjoint involution ``J`` (``J* = J``, ``J^2 = I``, ``J != +-I``)
splits the space into its +1 and -1 eigenspaces.  This module validates
involutions, extracts the spectral projectors and orthonormal half-space
bases, checks commutation with other matrices, expresses matrices in block
coordinates, and exhaustively enumerates the diagonal sign patterns.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import (
    EnumerationBoundError,
    InvolutionError,
    MatrixValidationError,
    TrivialInvolutionError,
)
from .spectral import SubspaceBasis, eig_sym, kernel_tol, op_norm, symmetrize

#: Guard for the 2^n diagonal enumeration.
MAX_ENUMERATION_DIM = 24

#: Default relative commutation tolerance.
COMMUTATION_TOL = 1e-10

_EPS_FLOOR = float(np.finfo(np.float64).tiny)


@dataclass(frozen=True)
class Involution:
    """A validated self-adjoint involution with its spectral splitting.

    ``projector_plus = (I + J)/2`` and ``projector_minus = I - projector_plus``
    project onto the +1 / -1 eigenspaces, whose orthonormal bases are stored
    in ``plus_basis`` / ``minus_basis`` (ordered by the spectral-core sign
    convention so block coordinates are deterministic).
    """

    matrix: np.ndarray
    projector_plus: np.ndarray
    projector_minus: np.ndarray
    plus_basis: SubspaceBasis
    minus_basis: SubspaceBasis

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim_plus(self) -> int:
        return self.plus_basis.dim

    @property
    def dim_minus(self) -> int:
        return self.minus_basis.dim

    def half_space_frame(self) -> np.ndarray:
        """Orthonormal frame ``[plus_basis | minus_basis]`` (n x n)."""
        return np.hstack([self.plus_basis.vectors, self.minus_basis.vectors])


@dataclass(frozen=True)
class BlockDecomposition:
    """Blocks of a self-adjoint matrix in the coordinates of an involution.

    In the frame ``[plus_basis | minus_basis]`` the matrix reads
    ``[[plus_block, coupling], [coupling*, minus_block]]``.
    """

    plus_block: np.ndarray
    minus_block: np.ndarray
    coupling: np.ndarray

    def assemble(self) -> np.ndarray:
        """Reassemble the full matrix in block coordinates."""
        top = np.hstack([self.plus_block, self.coupling])
        bottom = np.hstack([self.coupling.conj().T, self.minus_block])
        return np.vstack([top, bottom])


def make_involution(mat: np.ndarray) -> Involution:
    """Validate and package a self-adjoint involution.

    Raises
    ------
    InvolutionError
        If ``J^2 != I`` beyond ``1e-12 * n``.
    TrivialInvolutionError
        If ``J = I`` or ``J = -I`` (a splitting needs both eigenvalues).
    """
    sym = symmetrize(mat, "involution candidate")
    n = sym.shape[0]
    eye = np.eye(n, dtype=sym.dtype)
    square_defect = float(np.linalg.norm(sym @ sym - eye, 2))
    if square_defect > 1e-12 * n:
        raise InvolutionError(
            f"not an involution: ||J^2 - I|| = {square_defect:.3e} exceeds {1e-12 * n:.1e}"
        )
    decomp = eig_sym(sym)
    plus_mask = decomp.eigenvalues > 0.0
    dim_plus = int(np.count_nonzero(plus_mask))
    if dim_plus == 0 or dim_plus == n:
        raise TrivialInvolutionError(
            "trivial involution: J equals +I or -I, both eigenvalues must be present"
        )
    projector_plus = (eye + sym) / 2.0
    return Involution(
        matrix=sym,
        projector_plus=projector_plus,
        projector_minus=eye - projector_plus,
        plus_basis=SubspaceBasis(decomp.eigenvectors[:, plus_mask]),
        minus_basis=SubspaceBasis(decomp.eigenvectors[:, ~plus_mask]),
    )


def commutes(
    inv: Involution, mat: np.ndarray, tol: float = COMMUTATION_TOL
) -> tuple[bool, float]:
    """Check ``[J, M] = 0``; returns ``(verdict, ||JM - MJ||)``.

    The verdict is true iff the commutator norm is at most ``tol * ||M||``.
    """
    sym = symmetrize(mat)
    if sym.shape[0] != inv.n:
        raise MatrixValidationError(
            f"dimension mismatch: involution is {inv.n}, matrix is {sym.shape[0]}"
        )
    commutator = inv.matrix @ sym - sym @ inv.matrix
    residual = float(np.linalg.norm(commutator, 2))
    return residual <= tol * max(op_norm(sym), _EPS_FLOOR), residual


def block_decompose(mat: np.ndarray, inv: Involution) -> BlockDecomposition:
    """Express a self-adjoint matrix in the involution's block coordinates."""
    sym = symmetrize(mat)
    if sym.shape[0] != inv.n:
        raise MatrixValidationError(
            f"dimension mismatch: involution is {inv.n}, matrix is {sym.shape[0]}"
        )
    frame = inv.half_space_frame()
    coords = frame.conj().T @ sym @ frame
    p = inv.dim_plus
    plus_block = symmetrize(coords[:p, :p], "plus block")
    minus_block = symmetrize(coords[p:, p:], "minus block")
    return BlockDecomposition(
        plus_block=plus_block,
        minus_block=minus_block,
        coupling=coords[:p, p:].copy(),
    )


def _diagonal_involution(signs: np.ndarray) -> Involution:
    """Build an Involution for a +-1 diagonal pattern without an eigensolve.

    The canonical unit vectors are the orthonormal eigenbasis, listed in
    ascending index order inside each eigenspace (the same order the
    spectral sign convention produces for diagonal matrices).
    """
    n = signs.shape[0]
    eye = np.eye(n)
    plus_idx = np.flatnonzero(signs > 0)
    minus_idx = np.flatnonzero(signs < 0)
    mat = np.diag(signs.astype(np.float64))
    projector_plus = np.diag((signs > 0).astype(np.float64))
    return Involution(
        matrix=mat,
        projector_plus=projector_plus,
        projector_minus=eye - projector_plus,
        plus_basis=SubspaceBasis(eye[:, plus_idx]),
        minus_basis=SubspaceBasis(eye[:, minus_idx]),
    )


def canonical_involution(dim_plus: int, dim_minus: int) -> Involution:
    """The sign pattern ``diag(+1 x dim_plus, -1 x dim_minus)``."""
    if dim_plus < 1 or dim_minus < 1:
        raise MatrixValidationError(
            "canonical involution needs at least one dimension on each side"
        )
    signs = np.concatenate([np.ones(dim_plus), -np.ones(dim_minus)])
    return _diagonal_involution(signs)


def enumerate_diagonal_involutions(n: int) -> Iterator[Involution]:
    """Yield every diagonal sign-pattern involution except ``+I`` and ``-I``.

    There are exactly ``2**n - 2`` of them; ``n`` is capped at
    ``MAX_ENUMERATION_DIM`` to keep the sweep tractable.
    """
    if n < 1:
        raise MatrixValidationError(f"dimension must be >= 1, got {n}")
    if n > MAX_ENUMERATION_DIM:
        raise EnumerationBoundError(
            f"n = {n} exceeds the enumeration bound {MAX_ENUMERATION_DIM} "
            f"(2^{n} patterns)"
        )
    for bits in range(1, 2**n - 1):
        signs = np.where(
            (bits >> np.arange(n)) & 1 > 0, 1.0, -1.0
        )
        yield _diagonal_involution(signs)
