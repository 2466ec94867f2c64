"""Command-line interface: discord computation, sweeps, validation, generation.

Exit codes: 0 success, 1 a validation check failed, 2 parse error or invalid
spec, 3 state-validation error (non-PSD etc.), 4 unsupported qubit count.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bloch import decompose, reconstruct, squared_norm_sum
from .closedform import discord_closed
from .linalg import UnsupportedSizeError, ValidationError, validate_density
from .measurement import (
    MeasurementTree,
    distance_objective,
    history_key,
    node_histories,
    tensor_objective,
)
from .numeric import OptimizerConfig, discord_numeric
from .states import StateSpec, make, random_density

_SWEEP_FAMILIES = ("werner-ghz", "w-ghz-mix", "classical-mix", "family")
_GEN_KINDS = (
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


class StateFileError(ValueError):
    """The file is not a well-formed state description."""


def write_state_file(path, rho, n):
    matrix = [
        [[float(rho[i, j].real), float(rho[i, j].imag)] for j in range(rho.shape[1])]
        for i in range(rho.shape[0])
    ]
    with open(path, "w", newline="\n") as fh:
        json.dump({"n_qubits": int(n), "matrix": matrix}, fh)
        fh.write("\n")


def read_state_file(path):
    """Parse and validate a state file; returns (rho, n)."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{path}: not valid JSON ({exc})") from exc
    except OSError as exc:
        raise StateFileError(f"{path}: {exc}") from exc
    if not isinstance(data, dict) or "n_qubits" not in data or "matrix" not in data:
        raise StateFileError(f"{path}: expected keys n_qubits and matrix")
    n = data["n_qubits"]
    if not isinstance(n, int) or n < 1:
        raise StateFileError(f"{path}: n_qubits must be a positive integer")
    dim = 2**n
    rows = data["matrix"]
    try:
        arr = np.asarray(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"{path}: matrix entries must be [re, im] pairs") from exc
    if arr.shape != (dim, dim, 2):
        raise StateFileError(
            f"{path}: matrix must be {dim}x{dim} [re, im] pairs, got {arr.shape}"
        )
    rho = arr[..., 0] + 1j * arr[..., 1]
    validate_density(rho, n)
    return rho, n


def permute_qubits(rho, n, order):
    """Relabel tensor factors so new qubit i is original qubit order[i]."""
    if sorted(order) != list(range(1, n + 1)):
        raise StateFileError(f"--order must be a permutation of 1..{n}, got {order}")
    axes = [o - 1 for o in order]
    t = np.asarray(rho, dtype=complex).reshape((2,) * (2 * n))
    t = t.transpose(axes + [n + a for a in axes])
    return np.ascontiguousarray(t).reshape(2**n, 2**n)


def _parse_floats(text, count, flag):
    parts = text.split(",")
    if len(parts) != count:
        raise StateFileError(f"{flag} needs {count} comma-separated numbers")
    try:
        return tuple(float(x) for x in parts)
    except ValueError as exc:
        raise StateFileError(f"{flag}: {exc}") from exc


def _parse_order(text, n):
    try:
        order = tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise StateFileError(f"--order: {exc}") from exc
    if len(order) != n:
        raise StateFileError(f"--order must list all {n} qubit labels")
    return order


def _config(args):
    kwargs = {}
    if getattr(args, "restarts", None) is not None:
        kwargs["restarts"] = args.restarts
    if getattr(args, "seed", None) is not None:
        kwargs["seed"] = args.seed
    return OptimizerConfig(**kwargs)


def _tree_json(tree):
    return {history_key(h): [float(x) for x in v] for h, v in sorted(tree.vectors.items())}


def cmd_discord(args):
    rho, n = read_state_file(args.state)
    if args.order:
        rho = permute_qubits(rho, n, _parse_order(args.order, n))
    report = {"n_qubits": n, "method": args.method}
    closed_value = numeric_value = None
    if args.method in ("closed", "both"):
        res = discord_closed(decompose(rho, n))
        closed_value = res.value
        report["closed"] = {
            "value": res.value,
            "etas": {history_key(h): float(e) for h, e in sorted(res.gmatrices.etas.items())},
            "tree": _tree_json(res.tree),
        }
    if args.method in ("numeric", "both"):
        nres = discord_numeric(rho, _config(args))
        numeric_value = nres.value
        report["numeric"] = {
            "value": nres.value,
            "tree": _tree_json(nres.tree),
            "converged": nres.converged,
            "restarts": len(nres.restart_log),
        }
    if closed_value is not None and numeric_value is not None:
        report["gap"] = closed_value - numeric_value
    print(json.dumps(report, indent=2))
    return 0


def _sweep_state(family, n, p, c):
    if family == "family":
        return make(StateSpec(kind="family", n=n, c=tuple(p * x for x in c)))
    return make(StateSpec(kind=family, n=n, p=p))


def sweep_rows(family, n, p_values, c, method, cfg):
    """Evaluate one sweep; returns (header, rows) with rows in grid order."""
    both = method == "both"
    header = "p,discord_closed,discord_numeric,gap" if both else "p,discord_closed"
    rows = []
    for p in p_values:
        rho = _sweep_state(family, n, float(p), c)
        closed = discord_closed(decompose(rho, n)).value
        row = [float(p), closed]
        if both:
            numeric = discord_numeric(rho, cfg).value
            row += [numeric, closed - numeric]
        rows.append(row)
    return header, rows


def cmd_sweep(args):
    if args.family == "family" and args.c is None:
        raise StateFileError("sweep over kind family needs --c")
    c = _parse_floats(args.c, 3, "--c") if args.c is not None else None
    p_values = np.linspace(args.p_from, args.p_to, args.steps)
    header, rows = sweep_rows(args.family, args.n, p_values, c, args.method, _config(args))
    with open(args.out, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(f"{x:.16e}" for x in row) + "\n")
    return 0


def _random_tree(n, rng):
    vectors = {}
    for h in node_histories(n):
        v = rng.normal(size=3)
        vectors[h] = v / np.linalg.norm(v)
    return MeasurementTree(n=n, vectors=vectors)


def cmd_validate(args):
    if args.state is None and args.random is None:
        raise StateFileError("validate needs --state or --random")
    if args.state is not None:
        states = [read_state_file(args.state)]
    else:
        n, seed, count = args.random
        if n < 2:
            raise UnsupportedSizeError("validate --random needs n >= 2")
        states = [(random_density(n, 2**n, seed + i), n) for i in range(count)]

    rng = np.random.default_rng(0 if args.random is None else args.random[1])
    failures = 0
    for idx, (rho, n) in enumerate(states):
        bd = decompose(rho, n)
        purity = float(np.vdot(rho, rho).real)
        sns = squared_norm_sum(bd)
        r_purity = abs(purity - (1.0 + sns) / 2**n)
        r_round = float(np.max(np.abs(reconstruct(bd) - rho)))
        checks = [("purity-identity", r_purity, 1e-10), ("bloch-roundtrip", r_round, 1e-12)]
        if n >= 2:
            tree = _random_tree(n, rng)
            dist = distance_objective(rho, tree)
            tens = tensor_objective(bd, tree)
            r_equiv = abs((1.0 + sns) / 2**n - dist - tens)
            checks.append(("objective-equivalence", r_equiv, 1e-10))
        for name, residual, tol in checks:
            ok = residual <= tol
            failures += 0 if ok else 1
            print(f"state {idx} {name}: residual={residual:.3e} "
                  f"tol={tol:.0e} {'pass' if ok else 'FAIL'}")
    print(f"{'all checks passed' if failures == 0 else f'{failures} checks failed'}")
    return 0 if failures == 0 else 1


def cmd_gen(args):
    spec = StateSpec(
        kind=args.kind,
        n=args.n,
        p=args.p,
        c=_parse_floats(args.c, 3, "--c") if args.c is not None else None,
        bits=args.bits,
        seed=args.seed if args.seed is not None else 0,
        rank=args.rank,
    )
    try:
        rho = make(spec)
    except ValueError as exc:  # bad parameters and PSD failures alike
        print(f"invalid spec: {exc}", file=sys.stderr)
        return 2
    write_state_file(args.out, rho, args.n)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="mgd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_disc = sub.add_parser("discord", help="compute discord of a state file")
    p_disc.add_argument("--state", required=True)
    p_disc.add_argument("--method", choices=("closed", "numeric", "both"), default="closed")
    p_disc.add_argument("--restarts", type=int)
    p_disc.add_argument("--seed", type=int)
    p_disc.add_argument("--order", help="comma-separated qubit relabeling, e.g. 2,3,1")
    p_disc.set_defaults(func=cmd_discord)

    p_sweep = sub.add_parser("sweep", help="sweep a one-parameter family to CSV")
    p_sweep.add_argument("--family", choices=_SWEEP_FAMILIES, required=True)
    p_sweep.add_argument("--n", type=int, required=True)
    p_sweep.add_argument("--from", dest="p_from", type=float, default=0.0)
    p_sweep.add_argument("--to", dest="p_to", type=float, default=1.0)
    p_sweep.add_argument("--steps", type=int, default=11)
    p_sweep.add_argument("--c", help="base 3-vector for kind family, scaled by p")
    p_sweep.add_argument("--method", choices=("closed", "both"), default="closed")
    p_sweep.add_argument("--restarts", type=int)
    p_sweep.add_argument("--seed", type=int)
    p_sweep.add_argument("--out", required=True)
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate", help="run self-consistency checks")
    p_val.add_argument("--state")
    p_val.add_argument("--random", nargs=3, type=int, metavar=("N", "SEED", "COUNT"))
    p_val.set_defaults(func=cmd_validate)

    p_gen = sub.add_parser("gen", help="generate a state file")
    p_gen.add_argument("kind", choices=_GEN_KINDS)
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--p", type=float)
    p_gen.add_argument("--c")
    p_gen.add_argument("--bits")
    p_gen.add_argument("--seed", type=int)
    p_gen.add_argument("--rank", type=int)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_gen)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except StateFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except UnsupportedSizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
