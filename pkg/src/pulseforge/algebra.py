"""Operator bases for qubits and qutrits, spin operators, and basis projection.

The toolkit represents every Hamiltonian and propagator as a dense complex
matrix on a d^n dimensional Hilbert space (d = 2 or 3, n small).  This module
supplies the generalized Pauli bases used to turn operators into real
coefficient vectors and back:

- d=2: identity plus the three Pauli matrices.
- d=3: lambda_0 = sqrt(2/3)*I plus the eight Gell-Mann matrices, ordered so
  that indices 1-3 are the x-type (symmetric) elements of the three two-level
  subspaces, 4-6 the y-type (antisymmetric) elements, and 7-8 the diagonal
  elements.

Both bases satisfy Tr(sigma_j sigma_k) = 2 delta_jk, so a single trace
normalization constant serves both dimensions.  Basis order for a qutrit is
(|+1>, |0>, |-1>), which makes S_z = diag(1, 0, -1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Trace normalization shared by both bases: Tr(sigma_j sigma_k) = 2 delta_jk.
TRACE_NORM = 2.0

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# Gell-Mann matrices grouped by two-level subspace, in the basis
# (|+1>, |0>, |-1>).  Subspace 1 couples levels (+1, 0), subspace 2 couples
# (0, -1), subspace 3 couples (+1, -1).
LAMBDA_0 = np.sqrt(2.0 / 3.0) * np.eye(3, dtype=complex)
LAMBDA_1 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex)
LAMBDA_2 = np.array([[0, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=complex)
LAMBDA_3 = np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]], dtype=complex)
LAMBDA_4 = np.array([[0, -1j, 0], [1j, 0, 0], [0, 0, 0]], dtype=complex)
LAMBDA_5 = np.array([[0, 0, 0], [0, 0, -1j], [0, 1j, 0]], dtype=complex)
LAMBDA_6 = np.array([[0, 0, -1j], [0, 0, 0], [1j, 0, 0]], dtype=complex)
LAMBDA_7 = np.array([[1, 0, 0], [0, -1, 0], [0, 0, 0]], dtype=complex)
LAMBDA_8 = np.array([[1, 0, 0], [0, 1, 0], [0, 0, -2]], dtype=complex) / np.sqrt(3.0)

# Indexed so GELL_MANN[k] is lambda_k; slot 0 holds the scaled identity.
GELL_MANN = (LAMBDA_0, LAMBDA_1, LAMBDA_2, LAMBDA_3, LAMBDA_4, LAMBDA_5,
             LAMBDA_6, LAMBDA_7, LAMBDA_8)

# Diagonal generators of the second and third two-level subspaces.
ZETA = 0.5 * (np.sqrt(3.0) * LAMBDA_8 - LAMBDA_7)   # diag(0, 1, -1)
ETA = 0.5 * (np.sqrt(3.0) * LAMBDA_8 + LAMBDA_7)    # diag(1, 0, -1)

HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class BasisSet:
    """Ordered operator basis for one qudit.

    Attributes
    ----------
    d : int
        Qudit dimension (2 or 3).
    elements : tuple of ndarray
        d**2 Hermitian matrices; index 0 is the identity-like element, the
        rest are traceless.
    norm_const : float
        c_d in the trace orthogonality relation Tr(s_j s_k) = c_d delta_jk.
    """

    d: int
    elements: tuple = field(repr=False)
    norm_const: float = TRACE_NORM

    def __len__(self):
        return len(self.elements)

    def stack(self):
        """All elements as one (d**2, d, d) array."""
        return np.stack(self.elements)


def pauli_basis(d):
    """Return the generalized Pauli basis for one qudit.

    Parameters
    ----------
    d : int
        Qudit dimension, 2 or 3.

    Returns
    -------
    BasisSet
        For d=2: (I, sigma_x, sigma_y, sigma_z).  For d=3:
        (lambda_0, lambda_1, ..., lambda_8) with lambda_0 = sqrt(2/3)*I.

    Raises
    ------
    ValueError
        If d is not 2 or 3.
    """
    if d == 2:
        elements = (SIGMA_0, SIGMA_X, SIGMA_Y, SIGMA_Z)
    elif d == 3:
        elements = GELL_MANN
    else:
        raise ValueError(f"unsupported qudit dimension {d}; expected 2 or 3")
    return BasisSet(d=d, elements=tuple(np.asarray(e) for e in elements))


def spin_operators(d):
    """Return the spin operator triple (Sx, Sy, Sz) for one qudit.

    d=2 gives the spin-1/2 operators sigma_k/2; d=3 gives the spin-1
    operators, with Sz = diag(1, 0, -1) = (lambda_7 + sqrt(3) lambda_8)/2.
    """
    if d == 2:
        return SIGMA_X / 2.0, SIGMA_Y / 2.0, SIGMA_Z / 2.0
    if d == 3:
        sx = (LAMBDA_1 + LAMBDA_2) / np.sqrt(2.0)
        sy = (LAMBDA_4 + LAMBDA_5) / np.sqrt(2.0)
        sz = 0.5 * (LAMBDA_7 + np.sqrt(3.0) * LAMBDA_8)
        return sx, sy, sz
    raise ValueError(f"unsupported qudit dimension {d}; expected 2 or 3")


def subalgebra_generators(k):
    """Return the su(2) generator triple (gx, gy, gz) of qutrit subsystem k.

    Subsystem 1 couples levels (+1, 0) with generators (lambda_1, lambda_4,
    lambda_7); subsystem 2 couples (0, -1) with (lambda_2, lambda_5, zeta),
    zeta = (sqrt(3) lambda_8 - lambda_7)/2; subsystem 3 couples (+1, -1) with
    (lambda_3, lambda_6, eta), eta = (sqrt(3) lambda_8 + lambda_7)/2.

    Each triple obeys [gx, gy] = 2i gz on its two-level subspace.
    """
    if k == 1:
        return LAMBDA_1, LAMBDA_4, LAMBDA_7
    if k == 2:
        return LAMBDA_2, LAMBDA_5, ZETA
    if k == 3:
        return LAMBDA_3, LAMBDA_6, ETA
    raise ValueError(f"invalid subsystem index {k}; expected 1, 2 or 3")


def tensor(ops):
    """Kronecker product of a list of operators, leftmost factor first.

    Raises
    ------
    ValueError
        On an empty list or if the result dimension would exceed 2**20.
    """
    if len(ops) == 0:
        raise ValueError("tensor of an empty operator list")
    total = 1
    for op in ops:
        total *= np.asarray(op).shape[0]
        if total > 2 ** 20:
            raise ValueError("tensor result dimension exceeds 2**20")
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def basis_tensor_stack(d, n):
    """All n-fold tensor products of the d-dimensional basis.

    Returns a (d**(2n), d**n, d**n) array whose index is mixed-radix in the
    single-spin basis indices with the leftmost factor most significant.
    """
    single = pauli_basis(d).stack()
    out = single
    for _ in range(n - 1):
        # out[i] kron single[j] laid out so index = i*d^2 + j
        out = np.einsum("iab,jcd->ijacbd", out, single).reshape(
            out.shape[0] * single.shape[0],
            out.shape[1] * single.shape[1],
            out.shape[2] * single.shape[2],
        )
    return out


@dataclass(frozen=True)
class ProjectionVector:
    """Real coefficients of an operator in the tensor generalized-Pauli basis.

    Attributes
    ----------
    d, n : int
        Qudit dimension and spin count; len(coeffs) == d**(2n).
    coeffs : ndarray
        Real coefficient vector, mixed-radix indexed (leftmost spin most
        significant).
    imag_residual : float
        Largest imaginary magnitude discarded during projection; < 1e-12 for
        Hermitian input.
    """

    d: int
    n: int
    coeffs: np.ndarray = field(repr=False)
    imag_residual: float = 0.0

    def __post_init__(self):
        if len(self.coeffs) != self.d ** (2 * self.n):
            raise ValueError(
                f"coefficient length {len(self.coeffs)} != {self.d}^(2*{self.n})"
            )


def project(h, d, n):
    """Project an operator onto the n-spin tensor basis.

    coeffs[i] = Tr(H S_i) / 2**n, where S_i runs over all n-fold tensor
    products of the single-qudit basis.  The real parts are kept; the largest
    discarded imaginary magnitude is recorded as ``imag_residual``.

    Parameters
    ----------
    h : ndarray
        Operator of dimension d**n.
    d, n : int
        Qudit dimension and spin count.

    Returns
    -------
    ProjectionVector
    """
    h = np.asarray(h, dtype=complex)
    dim = d ** n
    if h.shape != (dim, dim):
        raise ValueError(f"operator shape {h.shape} does not match d^n = {dim}")
    basis = basis_tensor_stack(d, n)
    raw = np.einsum("kij,ji->k", basis, h) / (TRACE_NORM ** n)
    return ProjectionVector(
        d=d, n=n, coeffs=raw.real.copy(),
        imag_residual=float(np.max(np.abs(raw.imag))),
    )


def reconstruct(v):
    """Rebuild the operator from its projection coefficients."""
    basis = basis_tensor_stack(v.d, v.n)
    return np.einsum("k,kij->ij", np.asarray(v.coeffs, dtype=float), basis)


def dagger(u):
    """Conjugate transpose."""
    return np.asarray(u).conj().T


def is_hermitian(m, tol=HERMITICITY_TOL):
    m = np.asarray(m)
    return bool(np.max(np.abs(m - m.conj().T)) < tol)


def is_unitary(u, tol=HERMITICITY_TOL):
    u = np.asarray(u)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) < tol)
