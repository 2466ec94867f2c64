"""Dense linear algebra primitives shared by every other module.

Operators live in plain numpy arrays (complex128); the small real symmetric
matrices driving the eigenvalue machinery get their own 3x3 type.  Qubit 1 is
always the leftmost (most significant) tensor factor, and every index
convention downstream inherits that choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Ingestion tolerances.  Violations are hard errors, never silent repairs.
HERMITICITY_TOL = 1e-10
PSD_FLOOR = -1e-10
TRACE_TOL = 1e-10

# Cyclic Jacobi eigensolver controls (dimensions stay <= 64, so robustness
# beats speed).
_JACOBI_OFF_THRESHOLD = 1e-13
_JACOBI_MAX_SWEEPS = 100

# Eigenvalues closer to the top one than this are treated as one eigenspace
# when picking a deterministic representative direction.
_DEGENERACY_WINDOW = 1e-11


class ValidationError(ValueError):
    """A matrix failed density-matrix ingestion checks."""


class UnsupportedSizeError(ValueError):
    """The requested qubit count is outside the supported range."""


@dataclass(frozen=True)
class Sym3:
    """Real symmetric 3x3 matrix; only the upper triangle is stored."""

    xx: float
    xy: float
    xz: float
    yy: float
    yz: float
    zz: float

    @classmethod
    def from_matrix(cls, m, tol=1e-9):
        m = np.asarray(m, dtype=float)
        if m.shape != (3, 3):
            raise ValueError("expected a 3x3 matrix")
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.T).max() > tol * scale:
            raise ValidationError("matrix is not symmetric")
        return cls(m[0, 0], m[0, 1], m[0, 2], m[1, 1], m[1, 2], m[2, 2])

    def to_matrix(self):
        return np.array(
            [
                [self.xx, self.xy, self.xz],
                [self.xy, self.yy, self.yz],
                [self.xz, self.yz, self.zz],
            ]
        )


@dataclass
class EigenPair3:
    """Top eigenvalue of a Sym3 together with a unit eigenvector."""

    eta: float
    e_hat: np.ndarray


def kron(a, b):
    """Kronecker product; dimensions multiply."""
    return np.kron(np.asarray(a), np.asarray(b))


def hs_dist_sq(a, b):
    """Squared Hilbert-Schmidt distance tr((a-b)^dag (a-b)).

    The trace is a sum of squared moduli, so the imaginary part vanishes
    identically and is discarded.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    d = (a - b).ravel()
    return float(np.vdot(d, d).real)


def partial_trace(rho, n, keep):
    """Trace out all qubits not in `keep` (1-based, qubit 1 leftmost).

    Returns the reduced matrix on the kept qubits, ordered as in `keep`
    after sorting.  Trace is preserved.
    """
    rho = np.asarray(rho)
    dim = 2**n
    if rho.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} matrix for n={n}")
    kept = sorted(set(int(k) for k in keep))
    if not kept:
        raise ValueError("keep set must be nonempty")
    if kept[0] < 1 or kept[-1] > n:
        raise ValueError(f"keep set {kept} out of range 1..{n}")

    rt = rho.reshape((2,) * (2 * n))
    bra = list(range(n))
    ket = [n + i for i in range(n)]
    # Contract each traced qubit's bra index against its ket index.
    for q in range(1, n + 1):
        if q not in kept:
            ket[q - 1] = bra[q - 1]
    out = [bra[q - 1] for q in kept] + [n + q - 1 for q in kept]
    reduced = np.einsum(rt, bra + ket, out)
    d_keep = 2 ** len(kept)
    return reduced.reshape(d_keep, d_keep)


def _offdiag_norm(a):
    off = a - np.diag(np.diag(a))
    return math.sqrt(float(np.vdot(off, off).real))


def _jacobi(a, want_vectors):
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Sweeps row pairs in fixed order until the off-diagonal Frobenius norm
    drops below the threshold, or the sweep cap is hit.  Returns eigenvalues
    in ascending order and, optionally, the accumulated unitary.
    """
    d = a.shape[0]
    A = np.array(a, dtype=complex)
    V = np.eye(d, dtype=complex) if want_vectors else None
    threshold = _JACOBI_OFF_THRESHOLD * max(1.0, float(np.linalg.norm(A)))
    skip = threshold / max(1, d * d)

    for _ in range(_JACOBI_MAX_SWEEPS):
        if _offdiag_norm(A) <= threshold:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                g = A[p, q]
                mag = abs(g)
                if mag <= skip:
                    continue
                phase = g / mag
                tau = (A[q, q].real - A[p, p].real) / (2.0 * mag)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # A <- J^dag A J with the (p,q) rotation J.
                ap = A[:, p].copy()
                aq = A[:, q].copy()
                A[:, p] = c * ap - s * np.conj(phase) * aq
                A[:, q] = s * phase * ap + c * aq
                rp = A[p, :].copy()
                rq = A[q, :].copy()
                A[p, :] = c * rp - s * phase * rq
                A[q, :] = s * np.conj(phase) * rp + c * rq
                if want_vectors:
                    vp = V[:, p].copy()
                    vq = V[:, q].copy()
                    V[:, p] = c * vp - s * np.conj(phase) * vq
                    V[:, q] = s * phase * vp + c * vq

    vals = np.real(np.diag(A))
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    if want_vectors:
        return vals, V[:, order]
    return vals, None


def hermitian_eig(m):
    """Eigendecomposition of a Hermitian matrix via cyclic Jacobi rotations.

    Returns (eigenvalues ascending, eigenvectors as orthonormal columns).
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(1.0, float(np.abs(m).max()))
    if np.abs(m - m.conj().T).max() > HERMITICITY_TOL * scale:
        raise ValidationError("matrix is not Hermitian within tolerance")
    h = (m + m.conj().T) / 2.0
    return _jacobi(h, want_vectors=True)


def _canonical_sign(v):
    for comp in v:
        if abs(comp) > 1e-12:
            return v if comp > 0 else -v
    return v


def sym3_top_eig(g):
    """Top eigenpair of a Sym3 with a deterministic direction policy.

    When the top eigenvalue is degenerate (or the matrix vanishes), the
    returned vector is the unit vector in the top eigenspace with the largest
    z component, ties broken by y then x; the overall sign is flipped so the
    first nonzero component is positive.
    """
    m = g.to_matrix() if isinstance(g, Sym3) else np.asarray(g, dtype=float)
    vals, vecs = _jacobi(m.astype(complex), want_vectors=True)
    vecs = np.real(vecs)
    top = vals[-1]
    window = _DEGENERACY_WINDOW * max(1.0, abs(top))
    members = [i for i in range(3) if top - vals[i] <= window]
    if len(members) == 1:
        e = vecs[:, members[0]]
    else:
        basis = vecs[:, members]
        proj = basis @ basis.T
        e = None
        for axis in (np.array([0.0, 0.0, 1.0]), np.array([0.0, 1.0, 0.0]), np.array([1.0, 0.0, 0.0])):
            w = proj @ axis
            nw = np.linalg.norm(w)
            if nw > 1e-8:
                e = w / nw
                break
        if e is None:  # pragma: no cover - a projector always hits some axis
            e = basis[:, 0]
    e = _canonical_sign(e / np.linalg.norm(e))
    return EigenPair3(eta=float(top), e_hat=e)


def validate_density(rho, n=None):
    """Check Hermiticity, positivity, and unit trace; return the qubit count.

    Raises ValidationError on any violation.  Tolerances: Hermiticity 1e-10,
    eigenvalue floor -1e-10, trace deviation 1e-10.
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError("state matrix must be square")
    dim = rho.shape[0]
    inferred = int(round(math.log2(dim)))
    if 2**inferred != dim or inferred < 1:
        raise ValidationError(f"dimension {dim} is not a power of two")
    if n is not None and n != inferred:
        raise ValidationError(f"expected n={n} (dim {2**n}), got dim {dim}")
    if np.abs(rho - rho.conj().T).max() > HERMITICITY_TOL:
        raise ValidationError("matrix is not Hermitian within 1e-10")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValidationError(f"trace deviates from 1 by {abs(tr - 1.0):.3e}")
    h = (rho + rho.conj().T) / 2.0
    vals, _ = _jacobi(h, want_vectors=False)
    if vals[0] < PSD_FLOOR:
        raise ValidationError(f"negative eigenvalue {vals[0]:.3e} below floor")
    return inferred
