"""Conversion between density matrices and their Pauli tensor data.

A state on n qubits is held as one coherent 3-vector per qubit plus one dense
real tensor of shape 3^|S| for every subset S of two or more qubits.  The
single 4^n coefficient tensor is never materialized; its squared norm is
recovered exactly as (1 + squared_norm_sum) / 2^n.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .linalg import ValidationError, validate_density

_ID = np.eye(2, dtype=complex)
_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)

# sigma_0..sigma_3 stacked; axis 0 indexes (I, x, y, z).
PAULI = np.stack([_ID, _SX, _SY, _SZ])

_IMAG_RESIDUE_TOL = 1e-10


def pauli_basis():
    """The orthonormal single-qubit operator basis (I, sx, sy, sz)/sqrt(2)."""
    return [p / np.sqrt(2.0) for p in PAULI]


@dataclass
class BlochDecomposition:
    """Coherent vectors and correlation tensors of an n-qubit state.

    coherent maps qubit index k (1-based) to the 3-vector of Pauli
    expectations on qubit k; tensors maps each sorted index tuple S with
    |S| >= 2 to the dense array of Pauli-string expectations on S, axes
    ordered like S, axis values 0,1,2 meaning x,y,z.
    """

    n: int
    coherent: dict
    tensors: dict


def _coefficient_tensor(rho, n):
    """All Pauli-string expectations tr(rho * sigma_a1 x ... x sigma_an)."""
    rt = np.asarray(rho).reshape((2,) * (2 * n))
    operands = [rt, list(range(2 * n))]
    out = []
    for k in range(n):
        # tr picks up sigma[a, j, i] against rho[..i.., ..j..].
        operands.append(PAULI)
        operands.append([2 * n + k, n + k, k])
        out.append(2 * n + k)
    coeffs = np.einsum(*operands, out, optimize=True)
    residue = float(np.abs(coeffs.imag).max())
    if residue > _IMAG_RESIDUE_TOL:
        raise ValidationError(f"imaginary residue {residue:.3e} in Bloch data")
    return coeffs.real


def decompose(rho, n=None):
    """Extract all coherent vectors and correlation tensors of a state.

    The input must be a valid density matrix (Hermitian, PSD, unit trace
    within ingestion tolerances).
    """
    n = validate_density(rho, n)
    coeffs = _coefficient_tensor(rho, n)
    coherent = {}
    for k in range(1, n + 1):
        idx = tuple(slice(1, 4) if j == k else 0 for j in range(1, n + 1))
        coherent[k] = np.array(coeffs[idx])
    tensors = {}
    for size in range(2, n + 1):
        for subset in itertools.combinations(range(1, n + 1), size):
            idx = tuple(slice(1, 4) if j in subset else 0 for j in range(1, n + 1))
            tensors[subset] = np.array(coeffs[idx])
    return BlochDecomposition(n=n, coherent=coherent, tensors=tensors)


def reconstruct(bd):
    """Rebuild the density matrix from its Bloch data.

    Hermitian with unit trace by construction; positivity is not checked, so
    hand-crafted tensors may reconstruct to a non-PSD matrix.
    """
    n = bd.n
    coeffs = np.zeros((4,) * n)
    coeffs[(0,) * n] = 1.0
    for k, s in bd.coherent.items():
        idx = tuple(slice(1, 4) if j == k else 0 for j in range(1, n + 1))
        coeffs[idx] = s
    for subset, t in bd.tensors.items():
        idx = tuple(slice(1, 4) if j in subset else 0 for j in range(1, n + 1))
        coeffs[idx] = t
    operands = [coeffs, list(range(n))]
    for k in range(n):
        operands.append(PAULI)
        operands.append([k, n + k, 2 * n + k])
    out = [n + k for k in range(n)] + [2 * n + k for k in range(n)]
    rho_t = np.einsum(*operands, out, optimize=True)
    dim = 2**n
    return rho_t.reshape(dim, dim) / dim


def squared_norm_sum(bd):
    """Sum of squared Euclidean norms of all coherent vectors and tensors.

    Satisfies tr(rho^2) = (1 + squared_norm_sum) / 2^n.
    """
    total = 0.0
    for s in bd.coherent.values():
        total += float(np.dot(s, s))
    for t in bd.tensors.values():
        total += float(np.sum(t * t))
    return total


def contract(bd, subset, position, v):
    """Contract the tensor on `subset` with unit vector `v` at one qubit slot.

    `position` is the qubit index (a member of `subset`) whose axis is summed
    against v; the result keeps the remaining axes in subset order.
    """
    key = tuple(sorted(int(k) for k in subset))
    if key not in bd.tensors:
        raise ValueError(f"no tensor stored for subset {key}")
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise ValueError("contraction vector must be unit length")
    if position not in key:
        raise ValueError(f"position {position} not in subset {key}")
    axis = key.index(position)
    return np.tensordot(bd.tensors[key], v, axes=(axis, 0))
