"""Dense complex matrix primitives and Hilbert-Schmidt subspace arithmetic.

Everything works on square complex128 numpy arrays.  The inner product
throughout is <X, Y> = trace(Y^* X), whose norm is the Frobenius norm, so
vec() of a Hilbert-Schmidt orthonormal family is orthonormal in the usual
vector sense and subspace projections reduce to BLAS calls.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_CONFIG, InvalidInputError, NumericConfig


def as_matrix(M, dim: int | None = None) -> np.ndarray:
    """Validate and return M as a square complex128 array."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {A.shape}")
    if A.shape[0] == 0:
        raise InvalidInputError("empty matrix")
    if not np.isfinite(A).all():
        raise InvalidInputError("matrix has non-finite entries")
    if dim is not None and A.shape[0] != dim:
        raise InvalidInputError(f"expected dimension {dim}, got {A.shape[0]}")
    return A


def op_norm(M) -> float:
    """Operator (spectral) norm: the largest singular value."""
    A = as_matrix(M)
    return float(np.linalg.svd(A, compute_uv=False)[0])


def hs_inner(X, Y) -> complex:
    """<X, Y> = trace(Y^* X)."""
    return complex(np.vdot(Y, X))


def hs_norm(X) -> float:
    return float(np.linalg.norm(X))


def commutator(X, Y) -> np.ndarray:
    A = as_matrix(X)
    B = as_matrix(Y, dim=A.shape[0])
    return A @ B - B @ A


def kron(X, Y) -> np.ndarray:
    return np.kron(as_matrix(X), as_matrix(Y))


def direct_sum(*mats) -> np.ndarray:
    """Block-diagonal direct sum of square matrices."""
    blocks = [as_matrix(M) for M in mats]
    if not blocks:
        raise InvalidInputError("direct_sum needs at least one summand")
    n = sum(B.shape[0] for B in blocks)
    out = np.zeros((n, n), dtype=np.complex128)
    at = 0
    for B in blocks:
        k = B.shape[0]
        out[at : at + k, at : at + k] = B
        at += k
    return out


def _frozen(A: np.ndarray) -> np.ndarray:
    B = np.array(A, dtype=np.complex128)
    B.flags.writeable = False
    return B


@dataclass(frozen=True)
class OperatorSubspace:
    """A linear subspace of n x n matrices with a stored orthonormal basis.

    The basis is Hilbert-Schmidt orthonormal by construction; use
    orthonormalize() to build one from arbitrary spanning matrices.
    """

    ambient_dim: int
    basis: tuple = ()
    _stack: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise InvalidInputError("ambient_dim must be >= 1")
        mats = tuple(_frozen(as_matrix(B, dim=self.ambient_dim)) for B in self.basis)
        object.__setattr__(self, "basis", mats)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def stack(self) -> np.ndarray:
        """(dim, n^2) array whose rows are vec() of the basis elements."""
        if self._stack is None:
            n = self.ambient_dim
            S = (
                np.stack([B.ravel() for B in self.basis])
                if self.basis
                else np.zeros((0, n * n), dtype=np.complex128)
            )
            S.flags.writeable = False
            object.__setattr__(self, "_stack", S)
        return self._stack

    def coeffs(self, T) -> np.ndarray:
        """Coordinates <T, B_i> of the projection of T onto this subspace."""
        A = as_matrix(T, dim=self.ambient_dim)
        return self.stack.conj() @ A.ravel()

    def project(self, T) -> np.ndarray:
        """Orthogonal projection of T onto this subspace."""
        c = self.coeffs(T)
        n = self.ambient_dim
        return (self.stack.T @ c).reshape(n, n)

    def residual(self, T) -> float:
        """Frobenius distance from T to this subspace."""
        A = as_matrix(T, dim=self.ambient_dim)
        return float(np.linalg.norm(A - self.project(A)))

    def gram_defect(self) -> float:
        """Max-abs deviation of the basis Gram matrix from the identity."""
        if not self.basis:
            return 0.0
        G = self.stack.conj() @ self.stack.T
        return float(np.max(np.abs(G - np.eye(self.dim))))


def orthonormalize(
    mats, cfg: NumericConfig = DEFAULT_CONFIG, ambient_dim: int | None = None
) -> OperatorSubspace:
    """Orthonormal basis of span(mats), truncated at numerical rank.

    Singular values below rank_tol times the largest are treated as zero.
    """
    mats = list(mats)
    if not mats:
        if ambient_dim is None:
            raise InvalidInputError("ambient_dim required for an empty span")
        return OperatorSubspace(ambient_dim, ())
    arrs = [as_matrix(M, dim=ambient_dim) for M in mats]
    n = arrs[0].shape[0]
    arrs = [as_matrix(M, dim=n) for M in arrs]
    V = np.stack([A.ravel() for A in arrs])
    _, svals, Vh = np.linalg.svd(V, full_matrices=False)
    if svals.size == 0 or svals[0] <= 0:
        return OperatorSubspace(n, ())
    rank = int(np.sum(svals > cfg.rank_tol * svals[0]))
    basis = tuple(Vh[i].reshape(n, n) for i in range(rank))
    return OperatorSubspace(n, basis)


def subspace_contains(
    V: OperatorSubspace, W: OperatorSubspace, cfg: NumericConfig = DEFAULT_CONFIG
) -> bool:
    """True when every element of W lies in V within eq_tol."""
    if V.ambient_dim != W.ambient_dim:
        raise InvalidInputError("subspaces live in different ambient dimensions")
    return all(V.residual(B) <= cfg.eq_tol for B in W.basis)


def subspace_equal(
    V: OperatorSubspace, W: OperatorSubspace, cfg: NumericConfig = DEFAULT_CONFIG
) -> bool:
    return subspace_contains(V, W, cfg) and subspace_contains(W, V, cfg)


def subspace_distance(V: OperatorSubspace, W: OperatorSubspace) -> float:
    """Largest basis-element residual in either direction; 0 iff equal spans."""
    if V.ambient_dim != W.ambient_dim:
        raise InvalidInputError("subspaces live in different ambient dimensions")
    r = [V.residual(B) for B in W.basis] + [W.residual(B) for B in V.basis]
    return max(r, default=0.0)


def random_matrix(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    """Ginibre matrix: iid standard complex normal entries times scale."""
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * Z / np.sqrt(2.0)


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    Z = random_matrix(rng, n, scale)
    return (Z + Z.conj().T) / 2.0


def random_unit_hs(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random matrix of Frobenius norm 1 (Ginibre direction)."""
    Z = random_matrix(rng, n)
    return Z / np.linalg.norm(Z)


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre matrix with phase fix."""
    Q, R = np.linalg.qr(random_matrix(rng, n))
    return Q * np.exp(-1j * np.angle(np.diag(R)))


def haar_unitaries(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    """(count, n, n) stack of independent Haar unitaries."""
    Z = rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))
    Q, R = np.linalg.qr(Z)
    phase = np.exp(-1j * np.angle(np.einsum("kii->ki", R)))
    return Q * phase[:, None, :]
