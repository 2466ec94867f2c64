"""Closed-form evaluation of the multipartite geometric discord.

The value is assembled from squared tensor norms minus a sum of eigenvalues:
one 3x3 symmetric matrix per outcome history, whose top eigenvalue is the
history's contribution and whose top eigenvector fixes the measurement
direction passed down to every descendant history.

The conditional matrix at level m with history (j_1..j_{m-1}) is

    G = (V V^t + M M^t) / 2^(m-1)

where V sums, over every subset A of the ancestor levels, the tensor on
A + {m} contracted with the ancestor directions at A and signed by the
outcome parities, and M does the same with the tensors on A + {m, n}.  The
empty subset contributes the coherent vector of qubit m to V and the pair
tensor T^(m,n) to M.  Enumerating all ancestor subsets (not only the
contiguous ones) is what makes the matrix path agree exactly with the
distance objective for every tree; the equivalence tests pin that choice.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .bloch import contract, squared_norm_sum
from .linalg import Sym3, UnsupportedSizeError, _jacobi, _canonical_sign, sym3_top_eig
from .measurement import MeasurementTree

# Eigenvalues this close to the top of a G matrix are treated as one
# degenerate eigenspace and explored exhaustively downstream.
_EXPLORE_WINDOW = 1e-9
# A candidate replaces the incumbent only on a strict downstream improvement.
_IMPROVEMENT_MARGIN = 1e-12


@dataclass
class GMatrixSet:
    """Root and conditional G matrices with their top eigenvalues.

    etas is keyed by history, with the empty tuple for the root.
    """

    root: Sym3
    conditional: dict
    etas: dict


@dataclass
class ClosedFormResult:
    """Closed-form discord value plus everything used to assemble it.

    norm_budget maps (k,) to the squared coherent-vector norm of qubit k
    (k < n only) and each subset S to the squared norm of its tensor; the
    value equals (sum of the budget - sum of etas) / 2^n by construction.
    """

    value: float
    tree: MeasurementTree
    gmatrices: GMatrixSet
    norm_budget: dict


def _outcome_sign(outcome):
    return 1.0 if outcome == 1 else -1.0


def _contract_ancestors(bd, key, members, ancestors):
    """Contract tensor `key` with ancestor vectors at the given qubit slots.

    `members` lists the contracted qubit indices in ascending order; they all
    precede the free indices of `key`, so contracting axis 0 repeatedly walks
    through them left to right.
    """
    t = bd.tensors[key]
    for mu in members:
        t = np.tensordot(np.asarray(ancestors[mu - 1], dtype=float), t, axes=(0, 0))
    return t


def build_root_G(bd):
    """Root matrix s^(1) s^(1)^t + T^(1n) T^(1n)^t."""
    if bd.n < 2:
        raise ValueError("need at least two qubits")
    s = np.asarray(bd.coherent[1], dtype=float)
    t = np.asarray(bd.tensors[(1, bd.n)], dtype=float)
    return Sym3.from_matrix(np.outer(s, s) + t @ t.T)


def build_conditional_G(bd, history, ancestors):
    """Conditional matrix at level len(history)+1 given the ancestor choices.

    history holds the outcomes (each 1 or 2) leading to this node; ancestors
    holds the measurement directions chosen at levels 1..m-1 along it.
    """
    n = bd.n
    m = len(history) + 1
    if len(ancestors) != len(history):
        raise ValueError("need one ancestor vector per past outcome")
    if not 2 <= m <= n - 1:
        raise ValueError(f"level {m} out of range 2..{n - 1}")
    for v in ancestors:
        if abs(np.linalg.norm(np.asarray(v, dtype=float)) - 1.0) > 1e-9:
            raise ValueError("ancestor vectors must be unit length")

    signs = [_outcome_sign(j) for j in history]
    vec = np.asarray(bd.coherent[m], dtype=float).copy()
    mat = np.asarray(bd.tensors[(m, n)], dtype=float).copy()
    past = range(1, m)
    for size in range(1, m):
        for members in itertools.combinations(past, size):
            tau = 1.0
            for mu in members:
                tau *= signs[mu - 1]
            key_v = tuple(members) + (m,)
            key_m = tuple(members) + (m, n)
            vec = vec + tau * _contract_ancestors(bd, key_v, members, ancestors)
            mat = mat + tau * _contract_ancestors(bd, key_m, members, ancestors)
    g = (np.outer(vec, vec) + mat @ mat.T) / 2 ** (m - 1)
    return Sym3.from_matrix(g)


def build_conditional_G_3q(bd, history, ancestors):
    """Three-qubit conditional matrix, written out term by term.

    Redundant with build_conditional_G; kept as an independent cross-check of
    the general construction.
    """
    if bd.n != 3:
        raise ValueError("three-qubit form only")
    if len(history) != 1 or len(ancestors) != 1:
        raise ValueError("three qubits have a single conditional level")
    e1 = np.asarray(ancestors[0], dtype=float)
    sgn = _outcome_sign(history[0])
    s2 = np.asarray(bd.coherent[2], dtype=float)
    y = contract(bd, (1, 2), 1, e1)
    t23 = np.asarray(bd.tensors[(2, 3)], dtype=float)
    x23 = contract(bd, (1, 2, 3), 1, e1)
    a = s2 + sgn * y
    b = t23 + sgn * x23
    return Sym3.from_matrix((np.outer(a, a) + b @ b.T) / 2.0)


def build_conditional_G_4q(bd, history, ancestors):
    """Four-qubit conditional matrices, written out term by term.

    Redundant with build_conditional_G; kept as an independent cross-check of
    the general construction.
    """
    if bd.n != 4:
        raise ValueError("four-qubit form only")
    m = len(history) + 1
    if m == 2:
        e1 = np.asarray(ancestors[0], dtype=float)
        sgn = _outcome_sign(history[0])
        a = np.asarray(bd.coherent[2], dtype=float) + sgn * contract(bd, (1, 2), 1, e1)
        b = np.asarray(bd.tensors[(2, 4)], dtype=float) + sgn * contract(
            bd, (1, 2, 4), 1, e1
        )
        return Sym3.from_matrix((np.outer(a, a) + b @ b.T) / 2.0)
    if m == 3:
        e1 = np.asarray(ancestors[0], dtype=float)
        e2 = np.asarray(ancestors[1], dtype=float)
        s1 = _outcome_sign(history[0])
        s2 = _outcome_sign(history[1])
        a = (
            np.asarray(bd.coherent[3], dtype=float)
            + s1 * contract(bd, (1, 3), 1, e1)
            + s2 * contract(bd, (2, 3), 2, e2)
            + s1 * s2 * np.tensordot(e2, contract(bd, (1, 2, 3), 1, e1), axes=(0, 0))
        )
        b = (
            np.asarray(bd.tensors[(3, 4)], dtype=float)
            + s1 * contract(bd, (1, 3, 4), 1, e1)
            + s2 * contract(bd, (2, 3, 4), 2, e2)
            + s1
            * s2
            * np.tensordot(e2, contract(bd, (1, 2, 3, 4), 1, e1), axes=(0, 0))
        )
        return Sym3.from_matrix((np.outer(a, a) + b @ b.T) / 4.0)
    raise ValueError("four qubits have conditional levels 2 and 3 only")


def _top_eigenspace_candidates(g):
    """Directions worth exploring when the top eigenvalue is degenerate.

    The first candidate is always the deterministic sym3_top_eig choice;
    further candidates are the remaining eigenvectors whose eigenvalues sit
    within the exploration window, preference-ordered by |z|, |y|, |x|.
    """
    pair = sym3_top_eig(g)
    vals, vecs = _jacobi(g.to_matrix().astype(complex), want_vectors=True)
    vecs = np.real(vecs)
    window = _EXPLORE_WINDOW * max(1.0, abs(vals[-1]))
    members = [i for i in range(3) if vals[-1] - vals[i] <= window]
    if len(members) == 1:
        return pair, [pair.e_hat]
    extras = []
    for i in members:
        v = _canonical_sign(vecs[:, i] / np.linalg.norm(vecs[:, i]))
        if abs(float(np.dot(v, pair.e_hat))) < 0.99:
            extras.append(v)
    extras.sort(key=lambda v: (-abs(v[2]), -abs(v[1]), -abs(v[0])))
    return pair, [pair.e_hat] + extras


def _greedy_subtree(bd, history, ancestors):
    """Pick directions for this node and its descendants, greedily per level.

    Returns (eta_sum, assignments) where assignments maps each history in the
    subtree to (vector, G matrix, eta).  When the node's top eigenvalue is
    degenerate, each eigenspace direction is tried and the one with the best
    downstream eta sum is kept.
    """
    n = bd.n
    m = len(history) + 1
    g = build_root_G(bd) if m == 1 else build_conditional_G(bd, history, ancestors)
    if m == n - 1:
        pair = sym3_top_eig(g)
        return pair.eta, {history: (pair.e_hat, g, pair.eta)}

    pair, candidates = _top_eigenspace_candidates(g)
    best_total = None
    best_assign = None
    for cand in candidates:
        total = pair.eta
        assign = {history: (cand, g, pair.eta)}
        for outcome in (1, 2):
            sub_total, sub_assign = _greedy_subtree(
                bd, history + (outcome,), ancestors + [cand]
            )
            total += sub_total
            assign.update(sub_assign)
        if best_total is None or total > best_total + _IMPROVEMENT_MARGIN:
            best_total = total
            best_assign = assign
    return best_total, best_assign


def discord_closed(bd):
    """Closed-form discord via the sequential top-eigenvector procedure.

    Directions are chosen level by level: the root matrix fixes the first
    qubit's direction, and each conditional matrix fixes one history's
    direction from the ancestors already chosen.  No joint refinement is
    performed; the numeric module quantifies any gap that policy leaves.
    """
    n = bd.n
    if n < 2:
        raise UnsupportedSizeError("discord requires at least two qubits")

    norm_budget = {}
    for k in range(1, n):
        s = np.asarray(bd.coherent[k], dtype=float)
        norm_budget[(k,)] = float(np.dot(s, s))
    for subset, t in bd.tensors.items():
        norm_budget[subset] = float(np.sum(t * t))

    eta_sum, assignments = _greedy_subtree(bd, (), [])
    value = (sum(norm_budget.values()) - eta_sum) / 2**n

    vectors = {h: vec for h, (vec, _, _) in assignments.items()}
    etas = {h: eta for h, (_, _, eta) in assignments.items()}
    conditional = {
        h: g for h, (_, g, _) in assignments.items() if len(h) > 0
    }
    root_g = assignments[()][1]
    return ClosedFormResult(
        value=float(value),
        tree=MeasurementTree(n=n, vectors=vectors),
        gmatrices=GMatrixSet(root=root_g, conditional=conditional, etas=etas),
        norm_budget=norm_budget,
    )


def two_qubit_discord(bd):
    """Two-qubit geometric discord (||x||^2 + ||T||^2 - top eigenvalue) / 4.

    Independent of the sequential machinery; serves as its n=2 cross-check.
    """
    if bd.n != 2:
        raise ValueError("two-qubit states only")
    x = np.asarray(bd.coherent[1], dtype=float)
    t = np.asarray(bd.tensors[(1, 2)], dtype=float)
    k = Sym3.from_matrix(np.outer(x, x) + t @ t.T)
    top = sym3_top_eig(k).eta
    return (float(np.dot(x, x)) + float(np.sum(t * t)) - top) / 4.0


def family_discord(c, n):
    """Discord of (I + sum_j c_j sigma_j^(x n)) / 2^n in closed form."""
    c = np.asarray(c, dtype=float)
    if c.shape != (3,):
        raise ValueError("c must be a real 3-vector")
    if n < 2:
        raise ValueError("need at least two qubits")
    if np.linalg.norm(c) > 1.0 + 1e-12:
        raise ValueError("||c|| > 1 does not define a state")
    sq = c * c
    return float((sq.sum() - sq.max()) / 2**n)


def closed_value_residual(result):
    """|value - (budget - etas) / 2^n| recomputed from the result's fields."""
    n = result.tree.n
    recomputed = (
        sum(result.norm_budget.values()) - sum(result.gmatrices.etas.values())
    ) / 2**n
    return abs(result.value - recomputed)


def norm_budget_total(bd):
    """Budget entering the discord formula: all tensors, coherent k < n."""
    total = squared_norm_sum(bd)
    s_last = np.asarray(bd.coherent[bd.n], dtype=float)
    return total - float(np.dot(s_last, s_last))
