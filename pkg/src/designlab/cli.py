"""Command-line front end: ``designlab <subcommand> [flags]``.

Exit codes: 0 success, 2 validation or usage error, 3 budget error,
4 convergence error.
"""
import argparse
import json
import os
import sys

import numpy as np

from . import __version__, config
from .brauer import enumerate_pairings
from .circuits import (
    BrickArchitecture,
    layer_moment_operator,
    parameter_ratio,
    spectral_gap,
)
from .designs import EMBEDDINGS, lemma1_residuals, mixed_state_gap, pure_moment_input, state_design_test
from .errors import BudgetError, ConvergenceError, ValidationError
from .operator import Operator
from .records import dumps, make_record, to_csv
from .sampling import EnsembleSpec
from .shadows import ShadowProtocol, channel_distance, estimate_observable

EXIT_OK, EXIT_VALIDATION, EXIT_BUDGET, EXIT_CONVERGENCE = 0, 2, 3, 4


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _load_operator(path):
    with open(path) as fh:
        return Operator.from_dict(json.load(fh))


def _zero_state(d):
    psi = np.zeros(d)
    psi[0] = 1
    return psi


def _random_state(d, rng):
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return psi / np.linalg.norm(psi)


def _complex_list(values):
    values = np.asarray(values, dtype=complex)
    if np.max(np.abs(values.imag), initial=0.0) <= 1e-12:
        return values.real.tolist()
    return [[z.real, z.imag] for z in values]


# -- subcommands ----------------------------------------------------------------
# Each returns (result, csv_rows or None).


def cmd_pairings(args):
    diagrams = enumerate_pairings(args.t)
    result = {"t": args.t, "count": len(diagrams)}
    if not args.count_only:
        result["pairings"] = [str(s) for s in diagrams]
    return result, None


def cmd_twirl(args):
    from .weingarten import build_basis, twirl

    if args.input:
        x = _load_operator(args.input)
        if (x.d, x.t) != (args.d, args.t):
            raise ValidationError("input operator does not match --d/--t")
    else:
        x = pure_moment_input(_zero_state(args.d), args.t)
    res = twirl(x, build_basis(args.family, args.t, args.d))
    return {
        "coefficients": _complex_list(res.coefficients),
        "basis_labels": list(res.basis.labels),
        "trace_in": res.trace_in.real,
        "trace_out": res.trace_out.real,
    }, None


def cmd_design_test(args):
    rows = []
    sizes = args.n or [None]
    for n in sizes:
        rep = state_design_test(
            args.family, args.t, args.d, args.mode, n=n, seed=args.seed, workers=args.streams
        )
        rows.append({
            "family": rep.family, "t": rep.t, "d": rep.d, "mode": rep.mode,
            "samples": rep.samples, "distance": rep.distance,
            "tolerance": rep.tolerance, "verdict": rep.verdict,
        })
    result = rows[0] if len(rows) == 1 else {"reports": rows}
    return result, rows


def cmd_lemma1(args):
    if args.state == "zero":
        psi = _zero_state(args.d)
    else:
        psi = _random_state(args.d, np.random.default_rng(args.seed))
    res = lemma1_residuals(args.t, args.d, psi)
    entries = [
        {"diagram": str(s), "permutation": r.permutation, "state_left": r.state_left,
         "state_right": r.state_right, "sym_left": r.sym_left, "sym_right": r.sym_right}
        for s, r in res.items()
    ]
    worst = max((r.max_residual() for r in res.values() if not r.permutation), default=0.0)
    return {"t": args.t, "d": args.d, "max_nonpermutation_residual": worst, "diagrams": entries}, entries


def cmd_mixed_gap(args):
    rep = mixed_state_gap(args.lam0, args.d, args.embedding)
    return {
        "spectrum": [rep.lam0, rep.lam1],
        "d": rep.d,
        "embedding": rep.embedding,
        "twirl_U": {"coefficients": _complex_list(rep.twirl_u.coefficients),
                    "basis_labels": list(rep.twirl_u.basis.labels)},
        "twirl_SP": {"coefficients": _complex_list(rep.twirl_sp.coefficients),
                     "basis_labels": list(rep.twirl_sp.basis.labels)},
        "gap": rep.gap,
        "closed_form_applicable": rep.closed_form_applicable,
        "closed_form_error_U": rep.closed_form_error_u,
        "closed_form_error_SP": rep.closed_form_error_sp,
        "simplified_applicable": rep.simplified_applicable,
        "simplified_error": rep.simplified_error,
    }, None


def cmd_shadows(args):
    d = args.d
    if args.observable:
        obs = _load_operator(args.observable).dense()
    else:
        obs = np.zeros((d, d))
        obs[0, 0], obs[1, 1] = 1 / np.sqrt(2), -1 / np.sqrt(2)
    if args.state:
        rho = _load_operator(args.state).dense()
    else:
        rho = np.outer(_zero_state(d), _zero_state(d))
    protocol = ShadowProtocol(EnsembleSpec(args.ensemble, d, args.seed), args.n)
    est = estimate_observable(protocol, rho, obs, workers=args.streams)
    return {
        "mean": est.mean,
        "variance": est.variance,
        "stderr": est.stderr,
        "exact_mean": est.exact_mean,
        "exact_variance": est.exact_variance,
        "channel_distance": channel_distance(d),
        "n": est.n,
    }, None


def cmd_gap(args):
    rows = []
    for n in args.n:
        arch = getattr(BrickArchitecture, args.architecture)(n)
        res = spectral_gap(layer_moment_operator(arch), tol=args.tol, max_iters=args.max_iters,
                           seed=args.seed)
        rows.append({"n": n, "architecture": args.architecture, "lambda": res.value,
                     "iterations": res.iterations, "residual": res.residual,
                     "parameters_per_layer": arch.parameters_per_layer()})
    result = rows[0] if len(rows) == 1 else {"gaps": rows}
    return result, rows


def cmd_ratio(args):
    return {"ratio": parameter_ratio(args.lam_u, args.lam_sp, args.n_u, args.n_sp)}, None


def cmd_selftest(args):
    from .selftest import run_checks

    checks = run_checks()
    rows = [c.as_dict() for c in checks]
    return {"passed": all(c.ok for c in checks), "checks": rows}, rows


# -- parser -----------------------------------------------------------------------


def _global_flags():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--streams", type=int, default=1, help="worker threads")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--budget-dim", type=int, default=None,
                   help=f"max d**t (env {config.ENV_BUDGET_DIM})")
    return p


def build_parser():
    parser = _Parser(prog="designlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"designlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = [_global_flags()]

    def add(name, fn, help_text):
        p = sub.add_parser(name, parents=common, help=help_text)
        p.set_defaults(func=fn)
        return p

    p = add("pairings", cmd_pairings, "enumerate Brauer diagrams")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--count-only", action="store_true")

    p = add("twirl", cmd_twirl, "exact twirl of an operator")
    p.add_argument("--family", default="symplectic")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--input", help="Operator JSON file (default |0><0|^t)")

    p = add("design-test", cmd_design_test, "distance of a state moment to Pi_sym")
    p.add_argument("--family", default="symplectic")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--mode", choices=("exact", "monte_carlo"), default="exact")
    p.add_argument("--n", type=int, nargs="+", help="sample counts (monte_carlo)")

    p = add("lemma1", cmd_lemma1, "annihilation residuals of Brauer operators")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--state", choices=("zero", "random"), default="zero")

    p = add("mixed-gap", cmd_mixed_gap, "unitary vs symplectic twirl of a rank-two state")
    p.add_argument("--lam0", type=float, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--embedding", choices=EMBEDDINGS, default="basis")

    p = add("shadows", cmd_shadows, "classical-shadow estimate")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--ensemble", default="symplectic")
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--observable", help="Operator JSON file")
    p.add_argument("--state", help="Operator JSON file (default |0><0|)")

    p = add("gap", cmd_gap, "spectral gap of a brickwork layer")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--architecture", choices=("unitary", "symplectic"), default="unitary")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iters", type=int, default=5000)

    p = add("ratio", cmd_ratio, "parameter ratio of two architectures")
    p.add_argument("--lam-u", type=float, required=True)
    p.add_argument("--lam-sp", type=float, required=True)
    p.add_argument("--n-u", type=int, required=True)
    p.add_argument("--n-sp", type=int, required=True)

    add("selftest", cmd_selftest, "run the invariant suite")
    return parser


def _resolved_config(args):
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    cfg["budget_dim"] = config.budget_dim()
    return cfg


def run(argv=None, stdout=None, stderr=None):
    """Execute one command and return its exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.streams < 1:
            raise ValidationError("--streams must be positive")
        previous = config._override
        if args.budget_dim is not None:
            config.set_budget_dim(args.budget_dim)
        try:
            result, rows = args.func(args)
        finally:
            config.set_budget_dim(previous)
    except BudgetError as exc:
        print(f"budget error: {exc}", file=stderr)
        return EXIT_BUDGET
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=stderr)
        return EXIT_CONVERGENCE
    except UsageError as exc:
        parser.print_usage(stderr)
        print(f"error: {exc}", file=stderr)
        return EXIT_VALIDATION
    except ValidationError as exc:
        print(f"validation error: {exc}", file=stderr)
        return EXIT_VALIDATION

    if args.format == "csv":
        if rows is None:
            rows = [{k: v for k, v in result.items() if not isinstance(v, (dict, list))}]
        text = to_csv(rows)
    else:
        text = dumps(make_record(args.command, _resolved_config(args), result)) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if args.command == "selftest" and not result["passed"]:
        return EXIT_VALIDATION
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
