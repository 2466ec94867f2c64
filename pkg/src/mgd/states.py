"""Generators for benchmark states, seeded random states, and local unitaries."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bloch import PAULI
from .linalg import validate_density

_KINDS = (
    "ghz",
    "w",
    "plus-product",
    "basis-product",
    "werner-ghz",
    "w-ghz-mix",
    "classical-mix",
    "family",
    "random-density",
    "random-pure",
)
_UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class StateSpec:
    """Declarative recipe for a benchmark state.

    Parameters
    ----------
    kind : str
        One of ghz, w, plus-product, basis-product, werner-ghz, w-ghz-mix,
        classical-mix, family, random-density, random-pure.
    n : int
        Qubit count.
    p : float, optional
        Mixing parameter in [0, 1] for the blended kinds.
    c : sequence of 3 floats, optional
        Axis weights for the family kind; requires ||c|| <= 1.
    bits : str, optional
        Computational-basis label for basis-product, length n.
    seed : int
        RNG seed for the random kinds.
    rank : int, optional
        Rank for random-density, in [1, 2^n].
    """

    kind: str
    n: int
    p: float | None = None
    c: tuple | None = None
    bits: str | None = None
    seed: int = 0
    rank: int | None = None


def _ghz_ket(n):
    v = np.zeros(2**n, dtype=complex)
    v[0] = v[-1] = 1.0
    return v


def _w_ket(n):
    v = np.zeros(2**n, dtype=complex)
    for k in range(n):
        v[1 << k] = 1.0
    return v


def _plus_ket(n):
    return np.ones(2**n, dtype=complex)


def _basis_ket(bits):
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def _proj(ket):
    # normalizing the projector (not the ket) keeps entries like 1/2
    # and 1/3 exact in floating point
    return np.outer(ket, ket.conj()) / np.vdot(ket, ket).real


def _pauli_power(j, n):
    out = PAULI[j].astype(complex)
    for _ in range(n - 1):
        out = np.kron(out, PAULI[j])
    return out


def _require_p(spec):
    if spec.p is None or not 0.0 <= spec.p <= 1.0:
        raise ValueError(f"kind {spec.kind!r} needs p in [0, 1], got {spec.p!r}")
    return float(spec.p)


def make(spec: StateSpec) -> np.ndarray:
    """Build the density matrix described by spec.

    Every output is validated (Hermitian, PSD, unit trace); a family spec
    whose spectrum dips negative is rejected here even when ||c|| <= 1.
    """
    if spec.kind not in _KINDS:
        raise ValueError(f"unknown state kind {spec.kind!r}")
    if spec.n < 1:
        raise ValueError(f"n must be positive, got {spec.n}")
    n = spec.n
    dim = 2**n

    if spec.kind == "ghz":
        rho = _proj(_ghz_ket(n))
    elif spec.kind == "w":
        if n < 2:
            raise ValueError("w state needs n >= 2")
        rho = _proj(_w_ket(n))
    elif spec.kind == "plus-product":
        rho = _proj(_plus_ket(n))
    elif spec.kind == "basis-product":
        if spec.bits is None or len(spec.bits) != n or set(spec.bits) - {"0", "1"}:
            raise ValueError(f"basis-product needs a length-{n} bit string")
        rho = _proj(_basis_ket(spec.bits))
    elif spec.kind == "werner-ghz":
        p = _require_p(spec)
        rho = p * _proj(_ghz_ket(n)) + (1.0 - p) * np.eye(dim, dtype=complex) / dim
    elif spec.kind == "w-ghz-mix":
        p = _require_p(spec)
        if n < 2:
            raise ValueError("w-ghz-mix needs n >= 2")
        rho = p * _proj(_w_ket(n)) + (1.0 - p) * _proj(_ghz_ket(n))
    elif spec.kind == "classical-mix":
        p = _require_p(spec)
        rho = p * _proj(_basis_ket("0" * n)) + (1.0 - p) * _proj(_plus_ket(n))
    elif spec.kind == "family":
        c = np.asarray(spec.c, dtype=float) if spec.c is not None else None
        if c is None or c.shape != (3,):
            raise ValueError("family needs a real 3-vector c")
        if np.linalg.norm(c) > 1.0 + 1e-12:
            raise ValueError(f"family needs ||c|| <= 1, got {np.linalg.norm(c):.6f}")
        rho = np.eye(dim, dtype=complex)
        for j in range(3):
            if c[j] != 0.0:
                rho = rho + c[j] * _pauli_power(j + 1, n)
        rho = rho / dim
    elif spec.kind == "random-density":
        rank = spec.rank if spec.rank is not None else dim
        rho = random_density(n, rank, spec.seed)
    else:  # random-pure
        rho = random_density(n, 1, spec.seed)

    validate_density(rho, n)
    return rho


def apply_local_unitaries(rho, us):
    """Conjugate rho by u_1 x ... x u_n, checking each factor is unitary."""
    us = [np.asarray(u, dtype=complex) for u in us]
    for k, u in enumerate(us):
        if u.shape != (2, 2):
            raise ValueError(f"factor {k} is not 2x2")
        if np.max(np.abs(u.conj().T @ u - np.eye(2))) > _UNITARY_TOL:
            raise ValueError(f"factor {k} is not unitary")
    full = us[0]
    for u in us[1:]:
        full = np.kron(full, u)
    return full @ np.asarray(rho, dtype=complex) @ full.conj().T


def random_density(n, rank, seed):
    """Seeded Ginibre state: G G^dag / tr with G of shape (2^n, rank)."""
    dim = 2**n
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must be in [1, {dim}], got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
