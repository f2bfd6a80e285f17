"""Command-line front end.

Exit status: 0 on success, 1 on invalid input, 2 when the audit verdict is
ImpliesSignalling.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any

import numpy as np

from . import audit, bell, observables, states
from .linalg import LinalgError

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_SIGNALLING = 2
SIGNIFICANT_DIGITS = 12

EPILOG = """\
exit status:
  0  success
  1  invalid arguments or input document
  2  audit verdict ImpliesSignalling

The CHSH value is |E(A,B) + E(A',B)| + |E(A,B') - E(A',B')|; correlations are
always given in the order E(A,B), E(A',B), E(A,B'), E(A',B'). Relabeling the
observables moves the minus sign to a different term.

states: singlet, mixed, product (|00>), werner:P (P in [0, 1])
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _vector(text: str) -> np.ndarray:
    try:
        parts = [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}") from None
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    return np.array(parts)


def _correlations(text: str) -> tuple[float, float, float, float]:
    try:
        parts = tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected four comma-separated numbers, got {text!r}") from None
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"expected four comma-separated numbers, got {text!r}")
    return parts


def parse_state(name: str) -> states.TwoQubitState:
    name = name.strip().lower()
    if name == "singlet":
        return states.singlet()
    if name in ("mixed", "maximally-mixed"):
        return states.maximally_mixed()
    if name == "product":
        return states.product_state()
    if name.startswith("werner:"):
        try:
            p = float(name.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad Werner weight in {name!r}") from None
        return states.werner(p)
    raise UsageError(f"unknown state {name!r}")


def round_floats(obj: Any, digits: int = SIGNIFICANT_DIGITS) -> Any:
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value):
            return value
        return float(f"{value:.{digits}g}")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, dict):
        return {k: round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return round_floats(obj.tolist(), digits)
    return obj


def _flatten(obj: Any, prefix: str = ""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def _table_rows(table: dict) -> list[list]:
    rows = []
    for key, block in table["p"].items():
        x, y = (int(t) for t in key.split(","))
        for ia, a in enumerate((1, -1)):
            for ib, b in enumerate((1, -1)):
                rows.append([x, y, a, b, block[ia][ib]])
    return rows


def render(report: dict, fmt: str) -> str:
    report = round_floats(report)
    if fmt == "json":
        return json.dumps(report, sort_keys=True)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if "table" in report:
            writer.writerow(["x", "y", "a", "b", "probability"])
            writer.writerows(_table_rows(report["table"]))
        else:
            writer.writerow(["key", "value"])
            writer.writerows(_flatten(report))
        return buf.getvalue().rstrip("\n")
    return "\n".join(f"{k}: {v}" for k, v in _flatten(report))


def _read_input(path: str | None) -> dict | None:
    if path is None:
        return None
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read input document: {exc}") from exc


def _spin(lam: float, direction) -> observables.UnsharpSpin:
    return observables.UnsharpSpin(lam, direction)


def cmd_coexist(args) -> tuple[dict, int]:
    u1 = _spin(args.lambda1, args.dir1)
    u2 = _spin(args.lambda2, args.dir2)
    coexistent, lhs = observables.coexistence_check(u1, u2)
    report = {
        "coexistent": coexistent,
        "lhs": lhs,
        "max_equal_lambda": observables.max_equal_lambda(u1.direction, u2.direction),
    }
    return report, EXIT_OK


def _operator_dict(m: np.ndarray) -> dict:
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def cmd_joint_povm(args) -> tuple[dict, int]:
    u1 = _spin(args.lambda1, args.dir1)
    u2 = _spin(args.lambda2, args.dir2)
    joint = observables.build_joint_povm(u1, u2)
    low, high = observables.gamma_interval(u1, u2)
    report = {
        "gamma": joint.gamma,
        "gamma_interval": [low, high],
        "effects": {f"{j:+d},{k:+d}": _operator_dict(g) for (j, k), g in joint.g.items()},
        "marginal_error": max(
            float(np.max(np.abs(joint.marginal(which, s) - observables.unsharp_effect(u, s))))
            for which, u in ((1, u1), (2, u2))
            for s in observables.SIGNS
        ),
    }
    return report, EXIT_OK


def _setting_from_args(args) -> bell.ChshSetting:
    dirs = (args.a, args.a_prime, args.b, args.b_prime)
    if all(d is None for d in dirs):
        return bell.ChshSetting.singlet_optimal()
    if any(d is None for d in dirs):
        raise UsageError("give all of --a, --a-prime, --b, --b-prime or none of them")
    return bell.ChshSetting(*dirs)


def cmd_chsh(args) -> tuple[dict, int]:
    doc = _read_input(args.input)
    if doc is not None:
        table = states.BehaviorTable.from_dict(doc)
        report = bell.chsh_from_correlations(*table.correlations()).to_dict()
    elif args.correlations is not None:
        report = bell.chsh_from_correlations(*args.correlations).to_dict()
    else:
        setting = _setting_from_args(args)
        state = parse_state(args.state)
        report = bell.chsh_quantum(state, setting, args.lam).to_dict()
        report["setting"] = setting.to_dict()
        report["lambda"] = args.lam
    report["lhv_bound"] = bell.lhv_max()
    return report, EXIT_OK


def cmd_optimize(args) -> tuple[dict, int]:
    state = parse_state(args.state)
    best, setting = bell.tsirelson_optimize(state, seed=args.seed, starts=args.starts)
    report = best.to_dict()
    report["setting"] = setting.to_dict()
    report["oracle"] = bell.horodecki_oracle(state)
    report["seed"] = args.seed
    return report, EXIT_OK


def cmd_chain(args) -> tuple[dict, int]:
    doc = _read_input(args.input)
    if doc is not None:
        jb = states.JointBehavior.from_dict(doc)
    else:
        state = parse_state(args.state)
        joint = observables.build_joint_povm(_spin(args.lam, args.dir1), _spin(args.lam, args.dir2))
        jb = states.joint_behavior_from_state(
            state, joint, [observables.SharpSpin(args.bob1), observables.SharpSpin(args.bob2)]
        )
    report = bell.verify_derivation_chain(jb).to_dict()
    report["joint_behavior"] = jb.to_dict()
    return report, EXIT_OK


def cmd_audit(args) -> tuple[dict, int]:
    doc = _read_input(args.input)
    if doc is not None:
        verdict = audit.audit_behavior(states.BehaviorTable.from_dict(doc), args.lam, args.dir1, args.dir2)
    elif args.correlations is not None:
        verdict = audit.causality_audit(*args.correlations, args.lam, args.dir1, args.dir2)
    else:
        raise UsageError("audit needs --correlations or an --input behavior table")
    status = EXIT_SIGNALLING if verdict.kind is audit.VerdictKind.IMPLIES_SIGNALLING else EXIT_OK
    return verdict.to_dict(), status


def cmd_simulate(args) -> tuple[dict, int]:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    state = parse_state(args.state)
    setting = _setting_from_args(args)
    alice = [observables.as_observable(args.lam, d) for d in (setting.a, setting.a_prime)]
    bob = [observables.SharpSpin(d) for d in (setting.b, setting.b_prime)]
    exact = states.behavior_from_state(state, alice, bob)
    seed = 0 if args.seed is None else args.seed
    empirical = np.empty((2, 2, 2, 2))
    for x in range(2):
        for y in range(2):
            counts = states.sample_outcomes(state, alice[x], bob[y], args.n, seed=[seed, x, y])
            empirical[x, y] = counts / args.n
    table = states.BehaviorTable(empirical)
    report = {
        "n": args.n,
        "seed": seed,
        "lambda": args.lam,
        "setting": setting.to_dict(),
        "correlations": list(table.correlations()),
        "exact_correlations": list(exact.correlations()),
        "chsh_estimate": bell.chsh_value(*table.correlations()),
        "chsh_exact": bell.chsh_value(*exact.correlations()),
        "table": table.to_dict(),
    }
    return report, EXIT_OK


COMMANDS = {
    "coexist": cmd_coexist,
    "joint-povm": cmd_joint_povm,
    "chsh": cmd_chsh,
    "optimize": cmd_optimize,
    "chain": cmd_chain,
    "audit": cmd_audit,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", choices=("json", "csv", "text"), default="json")
    common.add_argument("--seed", type=int, default=None, help="64-bit seed for random starts and sampling")
    common.add_argument("--input", default=None, help="JSON input document; '-' reads standard input")

    parser = _Parser(
        prog="unsharpbell",
        description="Unsharp spin observables, joint measurability and CHSH causality audits.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def add(name, help_text):
        return sub.add_parser(
            name, parents=[common], help=help_text, epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter
        )

    def pair(p, required=True):
        p.add_argument("--lambda1", type=float, required=required)
        p.add_argument("--dir1", type=_vector, required=required)
        p.add_argument("--lambda2", type=float, required=required)
        p.add_argument("--dir2", type=_vector, required=required)

    def setting(p):
        for flag in ("--a", "--a-prime", "--b", "--b-prime"):
            p.add_argument(flag, type=_vector, default=None)

    pair(add("coexist", "check joint measurability of two unsharp spins"))
    pair(add("joint-povm", "construct the joint POVM of two coexistent unsharp spins"))

    p = add("chsh", "evaluate the CHSH combination")
    p.add_argument("--correlations", type=_correlations, default=None)
    p.add_argument("--state", default="singlet")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    setting(p)

    p = add("optimize", "maximize the sharp CHSH value over measurement directions")
    p.add_argument("--state", default="singlet")
    p.add_argument("--starts", type=int, default=16)

    p = add("chain", "check each step of the joint-measurement Bell inequality")
    p.add_argument("--state", default="singlet")
    p.add_argument("--lambda", dest="lam", type=float, default=1 / math.sqrt(2))
    p.add_argument("--dir1", type=_vector, default=np.array([1.0, 0.0, 0.0]))
    p.add_argument("--dir2", type=_vector, default=np.array([0.0, 0.0, 1.0]))
    p.add_argument("--bob1", type=_vector, default=np.array([1.0, 0.0, 1.0]) / math.sqrt(2))
    p.add_argument("--bob2", type=_vector, default=np.array([-1.0, 0.0, 1.0]) / math.sqrt(2))

    p = add("audit", "decide whether correlations at unsharpness lambda imply signalling")
    p.add_argument("--correlations", type=_correlations, default=None)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--dir1", type=_vector, required=True)
    p.add_argument("--dir2", type=_vector, required=True)

    p = add("simulate", "sample measurement outcomes and estimate correlations")
    p.add_argument("--state", default="singlet")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--n", type=int, default=100_000)
    setting(p)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "optimize" and args.seed is None:
            args.seed = 0
        report, status = COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_INVALID
    except (ValueError, LinalgError, bell.OptimizationError) as exc:
        print(f"unsharpbell: error: {exc}", file=stderr)
        return EXIT_INVALID
    print(render(report, args.output), file=stdout)
    return status


def main() -> None:
    sys.exit(run())
