"""Subalgebras of M_n: generation, relative commutants, and normality.

A MatrixAlgebra is an OperatorSubspace that is closed under multiplication,
tagged with whether it contains the ambient identity and whether it is
closed under the adjoint.  The relative commutant of a set S inside an
ambient algebra B is {X in B : XS = SX for every S}, computed as the
nullspace of the stacked commutator maps restricted to B's coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CONFIG, DIM_CAP, InvalidInputError, NumericConfig, ResourceLimitError, StructureError
from .linalg import (
    OperatorSubspace,
    as_matrix,
    hs_norm,
    orthonormalize,
    subspace_contains,
    subspace_equal,
)

# products per closure round beyond this are refused rather than ground through
MAX_PRODUCTS_PER_ROUND = 300_000


@dataclass(frozen=True)
class MatrixAlgebra:
    """A multiplicatively closed subspace of M_n with structure flags."""

    space: OperatorSubspace
    unital: bool
    selfadjoint: bool

    @property
    def ambient_dim(self) -> int:
        return self.space.ambient_dim

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def basis(self) -> tuple:
        return self.space.basis


def full_matrix_algebra(n: int) -> MatrixAlgebra:
    """All of M_n, with the matrix units as the stored basis."""
    if not 1 <= n <= DIM_CAP:
        raise ResourceLimitError(f"ambient dimension {n} outside [1, {DIM_CAP}]")
    basis = []
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n), dtype=np.complex128)
            E[i, j] = 1.0
            basis.append(E)
    return MatrixAlgebra(OperatorSubspace(n, tuple(basis)), True, True)


def diagonal_algebra(n: int) -> MatrixAlgebra:
    """The diagonal masa of M_n."""
    if not 1 <= n <= DIM_CAP:
        raise ResourceLimitError(f"ambient dimension {n} outside [1, {DIM_CAP}]")
    basis = []
    for i in range(n):
        E = np.zeros((n, n), dtype=np.complex128)
        E[i, i] = 1.0
        basis.append(E)
    return MatrixAlgebra(OperatorSubspace(n, tuple(basis)), True, True)


def scalar_algebra(n: int) -> MatrixAlgebra:
    """The scalar multiples of the identity in M_n."""
    if not 1 <= n <= DIM_CAP:
        raise ResourceLimitError(f"ambient dimension {n} outside [1, {DIM_CAP}]")
    return MatrixAlgebra(
        OperatorSubspace(n, (np.eye(n, dtype=np.complex128) / np.sqrt(n),)), True, True
    )


def algebra_from_space(
    space: OperatorSubspace, cfg: NumericConfig = DEFAULT_CONFIG
) -> MatrixAlgebra:
    """Wrap a multiplicatively closed subspace, detecting the structure flags."""
    n = space.ambient_dim
    unital = space.residual(np.eye(n)) <= cfg.eq_tol * np.sqrt(n)
    selfadjoint = all(space.residual(B.conj().T) <= cfg.eq_tol for B in space.basis)
    return MatrixAlgebra(space, unital, selfadjoint)


def _pairwise_products(basis: tuple) -> np.ndarray:
    B = np.stack(basis)
    m, n = B.shape[0], B.shape[1]
    if m * m * n * n > MAX_PRODUCTS_PER_ROUND * 16:
        raise ResourceLimitError(
            f"closure round needs {m * m} products of {n}x{n} matrices"
        )
    return np.einsum("iab,jbc->ijac", B, B).reshape(m * m, n, n)


def generate_algebra(
    generators,
    cfg: NumericConfig = DEFAULT_CONFIG,
    unital: bool = True,
    star: bool = False,
    dim_cap: int = DIM_CAP,
) -> MatrixAlgebra:
    """Smallest algebra containing the generators.

    With unital=True the ambient identity is thrown in; with star=True the
    adjoints are, making the result selfadjoint.  Closure is reached by
    repeatedly appending all pairwise products of the current basis, which
    doubles the attainable degree each round.
    """
    gens = [as_matrix(G) for G in generators]
    if not gens:
        raise InvalidInputError("generate_algebra needs at least one generator")
    n = gens[0].shape[0]
    if n > dim_cap:
        raise ResourceLimitError(f"ambient dimension {n} exceeds cap {dim_cap}")
    seed = [as_matrix(G, dim=n) for G in gens]
    if star:
        seed += [G.conj().T for G in gens]
    if unital:
        seed.append(np.eye(n, dtype=np.complex128))
    space = orthonormalize(seed, cfg)
    for _ in range(64):
        products = _pairwise_products(space.basis)
        grown = orthonormalize(list(space.basis) + list(products), cfg)
        if grown.dim == space.dim:
            break
        space = grown
    else:
        raise StructureError("algebra closure did not stabilize")
    selfadjoint = star or all(
        space.residual(B.conj().T) <= cfg.eq_tol for B in space.basis
    )
    is_unital = unital or space.residual(np.eye(n)) <= cfg.eq_tol * np.sqrt(n)
    return MatrixAlgebra(space, is_unital, selfadjoint)


def _commuted_set(S) -> list:
    if isinstance(S, MatrixAlgebra):
        return list(S.basis)
    if isinstance(S, OperatorSubspace):
        return list(S.basis)
    return [as_matrix(M) for M in S]


def relative_commutant(
    S, ambient: MatrixAlgebra, cfg: NumericConfig = DEFAULT_CONFIG
) -> MatrixAlgebra:
    """{X in ambient : XS = SX for all S}, as an algebra.

    Solved as the numerical nullspace, in ambient coordinates, of the
    stacked maps X -> S_i X - X S_i.  The nullspace basis returned by the
    SVD is orthonormal in coordinates, hence Hilbert-Schmidt orthonormal
    as matrices.
    """
    mats = _commuted_set(S)
    n = ambient.ambient_dim
    mats = [as_matrix(M, dim=n) for M in mats]
    m = ambient.dim
    if m == 0:
        return MatrixAlgebra(OperatorSubspace(n, ()), False, ambient.selfadjoint)
    Bstack = np.stack(ambient.basis)
    if not mats:
        coeff_basis = np.eye(m)
    else:
        A = np.stack(mats)
        left = np.einsum("iab,kbc->ikac", A, Bstack)
        right = np.einsum("kab,ibc->ikac", Bstack, A)
        D = (left - right).reshape(len(mats), m, n * n)
        M = D.transpose(0, 2, 1).reshape(len(mats) * n * n, m)
        # rows >= m always (m <= n^2), so economy Vh still carries all m rows
        _, svals, Vh = np.linalg.svd(M, full_matrices=False)
        top = svals[0] if svals.size else 0.0
        # scale against the commuted set, not only sigma_max: when every
        # basis element commutes the stack is numerical noise and the whole
        # coordinate space is nullspace
        scale = max(top, max(np.linalg.norm(S) for S in mats))
        rank = int(np.sum(svals > cfg.rank_tol * scale)) if scale > 0 else 0
        coeff_basis = Vh[rank:].conj()
    flat = coeff_basis @ Bstack.reshape(m, n * n)
    basis = tuple(row.reshape(n, n) for row in flat)
    space = OperatorSubspace(n, basis)
    if mats:
        sa_set = subspace_contains(
            orthonormalize(mats, cfg), orthonormalize([M.conj().T for M in mats], cfg), cfg
        )
    else:
        sa_set = True
    selfadjoint = ambient.selfadjoint and sa_set
    unital = ambient.unital or space.residual(np.eye(n)) <= cfg.eq_tol * np.sqrt(n)
    return MatrixAlgebra(space, unital, selfadjoint)


def double_commutant(
    A, ambient: MatrixAlgebra, cfg: NumericConfig = DEFAULT_CONFIG
) -> MatrixAlgebra:
    """(S, ambient)'' : the commutant, inside ambient, of the relative commutant."""
    if isinstance(A, MatrixAlgebra) and not subspace_contains(ambient.space, A.space, cfg):
        raise InvalidInputError("algebra does not lie inside the ambient algebra")
    C = relative_commutant(A, ambient, cfg)
    return relative_commutant(C, ambient, cfg)


def center(B: MatrixAlgebra, cfg: NumericConfig = DEFAULT_CONFIG) -> MatrixAlgebra:
    """Elements of B commuting with all of B."""
    return relative_commutant(B, B, cfg)


def is_normal(
    A: MatrixAlgebra, ambient: MatrixAlgebra, cfg: NumericConfig = DEFAULT_CONFIG
):
    """Whether A equals its double commutant relative to ambient.

    Returns (flag, witness); when the flag is False the witness is a
    double-commutant element far from A.
    """
    D = double_commutant(A, ambient, cfg)
    inside = subspace_contains(D.space, A.space, cfg)
    collapsed = subspace_contains(A.space, D.space, cfg)
    if inside and collapsed:
        return True, None
    residuals = [A.space.residual(B) for B in D.basis]
    witness = D.basis[int(np.argmax(residuals))] if residuals else None
    return False, witness


def hs_conditional_expectation(
    T, A: MatrixAlgebra, cfg: NumericConfig = DEFAULT_CONFIG
) -> np.ndarray:
    """Trace-preserving conditional expectation onto a selfadjoint unital algebra.

    For such algebras the Hilbert-Schmidt orthogonal projection is the
    unique trace-preserving conditional expectation, so this is just the
    projection onto A's span.
    """
    if not (A.selfadjoint and A.unital):
        raise InvalidInputError(
            "conditional expectation needs a selfadjoint unital algebra"
        )
    return A.space.project(as_matrix(T, dim=A.ambient_dim))


def verify_algebra(A: MatrixAlgebra, cfg: NumericConfig = DEFAULT_CONFIG) -> dict:
    """Check the structural invariants of a MatrixAlgebra; report defects."""
    space = A.space
    n = A.ambient_dim
    report = {
        "gram_defect": space.gram_defect(),
        "closure_defect": 0.0,
        "unital_defect": 0.0,
        "adjoint_defect": 0.0,
    }
    if space.dim:
        products = _pairwise_products(space.basis)
        report["closure_defect"] = max(space.residual(P) for P in products)
    if A.unital:
        report["unital_defect"] = space.residual(np.eye(n)) / np.sqrt(n)
    if A.selfadjoint:
        report["adjoint_defect"] = max(
            (space.residual(B.conj().T) for B in space.basis), default=0.0
        )
    report["passed"] = all(
        v <= cfg.eq_tol for k, v in report.items() if k != "passed"
    )
    return report
