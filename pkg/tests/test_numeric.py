"""Brute-force optimizer: known values, feasibility, determinism."""

import numpy as np
import pytest

from mgd.bloch import decompose
from mgd.closedform import discord_closed
from mgd.linalg import UnsupportedSizeError
from mgd.measurement import MeasurementTree, distance_objective, node_histories
from mgd.numeric import (
    OptimizerConfig,
    discord_numeric,
    fibonacci_sphere,
    refine,
    tree_to_angles,
)

FAST = OptimizerConfig(restarts=6)


def ghz(n):
    v = np.zeros(2**n, dtype=complex)
    v[0] = v[-1] = 2**-0.5
    return np.outer(v, v.conj())


def random_density(n, seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(2**n, 2**n)) + 1j * rng.normal(size=(2**n, 2**n))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def all_z_tree(n):
    z = np.array([0.0, 0.0, 1.0])
    return MeasurementTree(n=n, vectors={h: z.copy() for h in node_histories(n)})


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(restarts=0)
    with pytest.raises(ValueError):
        OptimizerConfig(refine_tol=0.0)
    with pytest.raises(ValueError):
        OptimizerConfig(max_iters=0)


def test_fibonacci_sphere_covers_unit_sphere():
    pts = fibonacci_sphere(64)
    np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)
    assert np.max(pts[:, 2]) > 0.9 and np.min(pts[:, 2]) < -0.9


def test_trivial_states():
    assert discord_numeric(np.eye(8, dtype=complex) / 8, FAST).value == pytest.approx(
        0.0, abs=1e-12)
    basis = np.zeros((8, 8), dtype=complex)
    basis[0, 0] = 1.0
    res = discord_numeric(basis, FAST)
    assert res.value == pytest.approx(0.0, abs=1e-10)
    # optimal directions are the poles
    assert abs(res.tree.vectors[()][2]) == pytest.approx(1.0, abs=1e-3)


def test_ghz3_matches_closed_form():
    res = discord_numeric(ghz(3), FAST)
    assert res.value == pytest.approx(0.5, abs=1e-6)
    assert res.converged


def test_result_invariants():
    rho = random_density(3, 42)
    res = discord_numeric(rho, FAST)
    assert res.value == pytest.approx(min(res.restart_log), abs=1e-14)
    assert res.value == pytest.approx(distance_objective(rho, res.tree), abs=1e-12)
    assert len(res.restart_log) == FAST.restarts


def test_feasibility_bound():
    rho = random_density(3, 43)
    res = discord_numeric(rho, FAST)
    closed = discord_closed(decompose(rho, 3))
    assert res.value <= distance_objective(rho, closed.tree) + 1e-12
    assert res.value <= distance_objective(rho, all_z_tree(3)) + 1e-12
    assert res.value <= closed.value + 1e-7


def test_refine_is_monotone_and_stable_at_optimum():
    rho = ghz(3)
    greedy = discord_closed(decompose(rho, 3)).tree
    before = distance_objective(rho, greedy)
    after_tree = refine(rho, greedy, FAST)
    after = distance_objective(rho, after_tree)
    assert after <= before + 1e-15
    assert after == pytest.approx(before, abs=1e-10)  # already a local minimum
    # identity on the maximally mixed state
    tree = all_z_tree(3)
    out = refine(np.eye(8, dtype=complex) / 8, tree, FAST)
    assert distance_objective(np.eye(8, dtype=complex) / 8, out) == pytest.approx(
        0.0, abs=1e-14)


def test_refine_recovers_perturbed_optimum():
    # two-qubit Werner state: known optimum p^2/2
    p = 0.6
    psi = np.array([0, 1, -1, 0]) / np.sqrt(2)
    rho = p * np.outer(psi, psi).astype(complex) + (1 - p) * np.eye(4) / 4
    best = discord_numeric(rho, FAST)
    angles = tree_to_angles(best.tree)
    angles += 1e-3
    perturbed = MeasurementTree(n=2, vectors={
        (): np.array([np.sin(angles[0, 0]) * np.cos(angles[0, 1]),
                      np.sin(angles[0, 0]) * np.sin(angles[0, 1]),
                      np.cos(angles[0, 0])])})
    out = refine(rho, perturbed, FAST)
    assert distance_objective(rho, out) == pytest.approx(p * p / 2, abs=1e-9)


def test_werner_known_values():
    psi = np.array([0, 1, -1, 0]) / np.sqrt(2)
    for p in (0.0, 0.25, 0.5, 0.75, 1.0):
        rho = p * np.outer(psi, psi).astype(complex) + (1 - p) * np.eye(4) / 4
        assert discord_numeric(rho, FAST).value == pytest.approx(p * p / 2, abs=1e-7)


def test_mixture_scaling():
    # p GHZ + (1-p) I/8: the objective scales as p^2
    base = discord_numeric(ghz(3), FAST).value
    for p in (0.3, 0.7):
        rho = p * ghz(3) + (1 - p) * np.eye(8, dtype=complex) / 8
        assert discord_numeric(rho, FAST).value == pytest.approx(p * p * base,
                                                                 abs=1e-6)


def test_determinism():
    rho = random_density(3, 44)
    a = discord_numeric(rho, FAST)
    b = discord_numeric(rho, FAST)
    assert a.restart_log == b.restart_log
    assert a.value == b.value


def test_single_restart_is_not_converged():
    res = discord_numeric(ghz(3), OptimizerConfig(restarts=1))
    assert res.converged is False


def test_size_limits():
    with pytest.raises(UnsupportedSizeError):
        discord_numeric(np.eye(128, dtype=complex) / 128, FAST)
    with pytest.raises(UnsupportedSizeError):
        discord_numeric(np.eye(2, dtype=complex) / 2, FAST)
