"""Brute-force minimization of the distance objective over measurement trees.

Multi-start cyclic coordinate descent over the two spherical angles of every
tree direction, with a golden-section line search per angle.  Restart 0 is
seeded from the closed-form greedy tree, so the numeric value can never land
above it; the remaining restarts start from a deterministic sphere covering
shuffled by the seeded generator.  Everything here is deterministic given
(state, config).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import UnsupportedSizeError, validate_density
from .measurement import MeasurementTree, branch_histories, node_histories

_MAX_QUBITS = 6
_POLE_SIN = 1e-8
_ANGLE_TOL = 1e-6
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    sphere_grid: int = 64
    refine_tol: float = 1e-11
    max_iters: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.sphere_grid < 1 or self.max_iters < 1:
            raise ValueError("counts must be at least 1")
        if self.refine_tol <= 0:
            raise ValueError("refine_tol must be positive")


@dataclass
class NumericResult:
    value: float
    tree: MeasurementTree
    restart_log: list = field(default_factory=list)
    converged: bool = False


def fibonacci_sphere(count):
    """Deterministic low-discrepancy covering of the unit sphere."""
    i = np.arange(count, dtype=float)
    z = 1.0 - 2.0 * (i + 0.5) / count
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = i * math.pi * (3.0 - math.sqrt(5.0))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def tree_to_angles(tree):
    """Stack the tree's directions as (theta, phi) rows in node order."""
    n = tree.n
    out = np.empty((2 ** (n - 1) - 1, 2))
    for i, h in enumerate(node_histories(n)):
        v = np.asarray(tree.vectors[h], dtype=float)
        out[i, 0] = math.acos(max(-1.0, min(1.0, float(v[2]))))
        out[i, 1] = math.atan2(float(v[1]), float(v[0]))
    return out


def angles_to_tree(angles, n):
    vectors = {}
    for i, h in enumerate(node_histories(n)):
        th, ph = angles[i]
        vectors[h] = np.array(
            [math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)]
        )
    return MeasurementTree(n=n, vectors=vectors)


class _Objective:
    """Fast evaluator of the distance objective on angle arrays.

    The dephased state is never materialized: with mutually orthogonal
    branch projectors the objective reduces to tr(rho^2) minus the sum of
    squared Frobenius norms of the 2x2 conditional blocks, one per branch.
    """

    def __init__(self, rho, n):
        half = 2 ** (n - 1)
        self.n = n
        self.rho_r = np.ascontiguousarray(np.asarray(rho, dtype=complex)).reshape(
            half, 2, half, 2
        )
        self.purity = float(np.vdot(rho, rho).real)
        nodes = node_histories(n)
        index = {h: i for i, h in enumerate(nodes)}
        branches = branch_histories(n)
        # branch b, level k uses node prefix b[:k] with outcome b[k].
        self.node_of = np.array(
            [[index[b[:k]] for k in range(n - 1)] for b in branches], dtype=int
        )
        self.outcome_of = np.array(
            [[b[k] - 1 for k in range(n - 1)] for b in branches], dtype=int
        )

    def evaluate(self, angles):
        th = angles[:, 0]
        ph = angles[:, 1]
        c = np.cos(th / 2.0)
        s = np.sin(th / 2.0)
        e = np.exp(1j * ph)
        # Outcome kets per node: rows (cos, e^{i phi} sin) and
        # (-e^{-i phi} sin, cos).
        kets = np.empty((angles.shape[0], 2, 2), dtype=complex)
        kets[:, 0, 0] = c
        kets[:, 0, 1] = s * e
        kets[:, 1, 0] = -s * np.conj(e)
        kets[:, 1, 1] = c
        per_level = kets[self.node_of, self.outcome_of]  # (branches, n-1, 2)
        v = per_level[:, 0, :]
        for k in range(1, self.n - 1):
            v = (v[:, :, None] * per_level[:, k, None, :]).reshape(v.shape[0], -1)
        blocks = np.einsum("hi,hj,ixjy->hxy", v.conj(), v, self.rho_r, optimize=True)
        overlap = float(np.einsum("hxy,hyx->", blocks, blocks).real)
        return self.purity - overlap


def _golden_section(f, lo, hi):
    """Golden-section minimum of f on [lo, hi] to a fixed angular tolerance."""
    a, b = lo, hi
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1 = f(x1)
    f2 = f(x2)
    while b - a > _ANGLE_TOL:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def _refine_angles(obj, angles, cfg):
    """Cyclic coordinate descent; accepted steps never increase the value."""
    current = obj.evaluate(angles)
    n_nodes = angles.shape[0]
    for _ in range(cfg.max_iters):
        start = current

        for i in range(n_nodes):
            def f_theta(t, i=i):
                old = angles[i, 0]
                angles[i, 0] = t
                val = obj.evaluate(angles)
                angles[i, 0] = old
                return val

            t_best, v_best = _golden_section(f_theta, 0.0, math.pi)
            if v_best < current:
                angles[i, 0] = t_best
                current = v_best

            if math.sin(angles[i, 0]) >= _POLE_SIN:
                def f_phi(p, i=i):
                    old = angles[i, 1]
                    angles[i, 1] = p
                    val = obj.evaluate(angles)
                    angles[i, 1] = old
                    return val

                p0 = angles[i, 1]
                p_best, v_best = _golden_section(f_phi, p0 - math.pi, p0 + math.pi)
                if v_best < current:
                    angles[i, 1] = math.remainder(p_best, 2.0 * math.pi)
                    current = v_best

        if start - current < cfg.refine_tol:
            break
    return angles, current


def refine(rho, tree, cfg=None):
    """Locally refine a complete tree; the objective never increases."""
    cfg = cfg or OptimizerConfig()
    rho = np.asarray(rho, dtype=complex)
    n = validate_density(rho)
    obj = _Objective(rho, n)
    angles, _ = _refine_angles(obj, tree_to_angles(tree), cfg)
    return angles_to_tree(angles, n)


def discord_numeric(rho, cfg=None):
    """Minimize the distance objective over complete measurement trees.

    Deterministic given (rho, cfg).  The restart log holds each restart's
    final objective in restart order; converged means the best two restarts
    agree within ten times the refinement tolerance.
    """
    from .bloch import decompose
    from .closedform import discord_closed

    cfg = cfg or OptimizerConfig()
    rho = np.asarray(rho, dtype=complex)
    n = validate_density(rho)
    if not 2 <= n <= _MAX_QUBITS:
        raise UnsupportedSizeError(
            f"numeric search supports 2 to {_MAX_QUBITS} qubits, got {n}"
        )

    obj = _Objective(rho, n)
    n_nodes = 2 ** (n - 1) - 1
    greedy = discord_closed(decompose(rho, n)).tree
    points = fibonacci_sphere(cfg.sphere_grid)
    rng = np.random.default_rng(cfg.seed)

    starts = [tree_to_angles(greedy)]
    for _ in range(cfg.restarts - 1):
        pick = rng.permutation(cfg.sphere_grid)[:n_nodes]
        vs = points[pick]
        th = np.arccos(np.clip(vs[:, 2], -1.0, 1.0))
        ph = np.arctan2(vs[:, 1], vs[:, 0])
        starts.append(np.column_stack([th, ph]))

    restart_log = []
    best_value = None
    best_angles = None
    for angles in starts:
        refined, final = _refine_angles(obj, angles, cfg)
        restart_log.append(final)
        if best_value is None or final < best_value:
            best_value = final
            best_angles = refined.copy()

    finals = sorted(restart_log)
    converged = len(finals) >= 2 and finals[1] - finals[0] <= 10.0 * cfg.refine_tol
    return NumericResult(
        value=float(best_value),
        tree=angles_to_tree(best_angles, n),
        restart_log=restart_log,
        converged=converged,
    )
