"""Conditional measurement trees, dephasing, and the distance objective.

A tree holds one unit direction per outcome history for qubits 1..n-1 (qubit
n is never measured).  Dephasing projects a state onto the classical-quantum
form selected by the tree; the squared Hilbert-Schmidt distance to that state
is the quantity the optimizer and the closed form both compute.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .bloch import squared_norm_sum
from .linalg import hs_dist_sq, validate_density

_UNIT_TOL = 1e-12
_NULL_BRANCH_TOL = 1e-14


@dataclass
class MeasurementTree:
    """One unit vector in R^3 per outcome history.

    vectors maps a history tuple (outcomes in {1,2}, length m-1 for level m)
    to the direction measured at that node; levels run 1..n-1, so a complete
    tree stores 2^(n-1) - 1 vectors.  Outcome 2 measures along the negated
    direction, encoded by the outcome index rather than a second vector.
    """

    n: int
    vectors: dict


def node_histories(n):
    """All node histories of a complete tree, level by level, lexicographic."""
    out = []
    for m in range(1, n):
        out.extend(itertools.product((1, 2), repeat=m - 1))
    return out


def branch_histories(n):
    """All complete outcome histories (length n-1), lexicographic."""
    return list(itertools.product((1, 2), repeat=n - 1))


def check_complete(tree, n=None):
    """Raise if the tree is missing nodes, has extras, or non-unit vectors."""
    n = tree.n if n is None else n
    expected = node_histories(n)
    if set(tree.vectors.keys()) != set(expected):
        raise ValueError(f"incomplete measurement tree for n={n}")
    for h, v in tree.vectors.items():
        if abs(np.linalg.norm(np.asarray(v, dtype=float)) - 1.0) > _UNIT_TOL:
            raise ValueError(f"non-unit tree vector at history {h}")


def history_key(history):
    """Serialize an outcome history as a bit string (outcome j -> bit j-1)."""
    return "".join(str(j - 1) for j in history)


@dataclass
class DephasedState:
    """A zero-discord state plus the probability of each complete branch."""

    matrix: np.ndarray
    branch_probabilities: dict

    def __post_init__(self):
        probs = list(self.branch_probabilities.values())
        if min(probs) < -1e-12:
            raise ValueError(f"negative branch probability {min(probs):.3e}")
        if abs(sum(probs) - 1.0) > 1e-10:
            raise ValueError("branch probabilities do not sum to 1")


def projector(v, outcome):
    """Rank-1 qubit projector (I + (-1)^(outcome-1) v.sigma) / 2."""
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise ValueError("projector direction must be a unit vector")
    if outcome not in (1, 2):
        raise ValueError("outcome must be 1 or 2")
    sign = 1.0 if outcome == 1 else -1.0
    return 0.5 * np.array(
        [
            [1.0 + sign * v[2], sign * (v[0] - 1j * v[1])],
            [sign * (v[0] + 1j * v[1]), 1.0 - sign * v[2]],
        ]
    )


def bloch_ket(v, outcome):
    """Eigenket of v.sigma for the given outcome (+1 for 1, -1 for 2)."""
    v = np.asarray(v, dtype=float)
    theta = math.acos(max(-1.0, min(1.0, float(v[2]))))
    phi = math.atan2(float(v[1]), float(v[0]))
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    if outcome == 1:
        return np.array([c, s * complex(math.cos(phi), math.sin(phi))])
    return np.array([-s * complex(math.cos(phi), -math.sin(phi)), c])


def branch_kets(tree):
    """Product kets of all complete branches, stacked (2^(n-1), 2^(n-1)).

    Row h is the tensor product over qubits 1..n-1 of the outcome ket at each
    node along branch h; rows follow lexicographic branch order.
    """
    n = tree.n
    branches = branch_histories(n)
    kets = np.empty((len(branches), 2 ** (n - 1)), dtype=complex)
    node_kets = {
        h: (bloch_ket(vec, 1), bloch_ket(vec, 2)) for h, vec in tree.vectors.items()
    }
    for row, branch in enumerate(branches):
        acc = np.array([1.0 + 0.0j])
        for level in range(1, n):
            ket = node_kets[branch[: level - 1]][branch[level - 1] - 1]
            acc = (acc[:, None] * ket[None, :]).reshape(-1)
        kets[row] = acc
    return kets


def dephase(rho, tree):
    """Project the state onto the tree's classical-quantum form.

    Returns the dephased matrix together with the probability of every
    complete outcome branch.  Idempotent; trace preserving.  Zero-probability
    branches contribute nothing, which leaves the result well defined.
    """
    rho = np.asarray(rho, dtype=complex)
    n = validate_density(rho)
    check_complete(tree, n)
    half = 2 ** (n - 1)
    rho_r = rho.reshape(half, 2, half, 2)
    kets = branch_kets(tree)
    # One 2x2 conditional block per branch.
    blocks = np.einsum("hi,hj,ixjy->hxy", kets.conj(), kets, rho_r, optimize=True)
    matrix = np.einsum("hi,hj,hxy->ixjy", kets, kets.conj(), blocks, optimize=True)
    matrix = matrix.reshape(2**n, 2**n)
    probs = np.einsum("hxx->h", blocks).real
    branch_probabilities = {
        h: float(p) for h, p in zip(branch_histories(n), probs)
    }
    return DephasedState(matrix=matrix, branch_probabilities=branch_probabilities)


def distance_objective(rho, tree):
    """Squared Hilbert-Schmidt distance from rho to its dephased image."""
    return hs_dist_sq(rho, dephase(rho, tree).matrix)


def tensor_objective(bd, tree):
    """Evaluate the overlap objective from the G-matrix quadratic forms.

    Equals (1 + squared_norm_sum) / 2^n - distance_objective for every
    complete tree; the per-level G matrices carry the whole tree dependence.
    """
    from .closedform import build_conditional_G, build_root_G

    n = bd.n
    check_complete(tree, n)
    total = 1.0 + float(np.dot(bd.coherent[n], bd.coherent[n]))
    for m in range(1, n):
        for history in itertools.product((1, 2), repeat=m - 1):
            if m == 1:
                g = build_root_G(bd)
            else:
                ancestors = [tree.vectors[history[:mu]] for mu in range(m - 1)]
                g = build_conditional_G(bd, history, ancestors)
            e = np.asarray(tree.vectors[history], dtype=float)
            total += float(e @ g.to_matrix() @ e)
    return total / 2**n


def purity_identity_residual(rho, bd):
    """|tr(rho^2) - (1 + squared_norm_sum) / 2^n|, a self-check helper."""
    purity = float(np.vdot(rho, rho).real)
    return abs(purity - (1.0 + squared_norm_sum(bd)) / 2**bd.n)
