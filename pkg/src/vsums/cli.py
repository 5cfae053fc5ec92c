"""Command-line front end: ``vsums <subcommand> ...``.

Results go to standard output as JSON (CSV for ``su3 --format csv``); diagnostics go to
standard error. Exit codes: 0 success, 1 a verification suite failed, 2 bad configuration,
3 engine error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from fractions import Fraction
from typing import Callable, Sequence

import jsonschema

from .errors import NonGenericChamberPointError, NonGenericGammaError, VSumsError, WallPointError
from .exactnum import parse_rational, rational_to_str, value_to_json
from .lattice import AugmentedWeight, LatticeContext
from .verlinde import VerlindeProblem

RATIONAL = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^\s*-?\d+\s*(/\s*[1-9]\d*\s*)?$"},
    ]
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["rank", "weights"],
    "properties": {
        "rank": {"type": "integer", "minimum": 1},
        "xi_generators": {"type": "array", "items": {"type": "array", "items": RATIONAL}},
        "inner_product": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "weights": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["alpha"],
                "properties": {
                    "alpha": {"type": "array", "items": {"type": "integer"}},
                    "u": RATIONAL,
                },
            },
        },
        "gamma": {"type": "array", "items": RATIONAL},
        "chamber": {"type": "array", "items": RATIONAL},
        "names": {"type": "array", "items": {"type": "string"}},
    },
}

PERTURB_DENOMINATOR = 10**6
PERTURB_ATTEMPTS = 50


class ConfigError(Exception):
    """Bad configuration, reported with a JSON pointer to the offending field."""


class ProblemConfig:
    """A validated problem file: lattice context, weights, optional gamma and chamber."""

    def __init__(self, data: dict):
        self.data = data
        try:
            jsonschema.validate(data, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            pointer = "/" + "/".join(str(p) for p in exc.absolute_path)
            raise ConfigError(f"{pointer}: {exc.message}") from None
        r = data["rank"]
        for key in ("xi_generators", "inner_product"):
            rows = data.get(key)
            if rows is not None and (len(rows) != r or any(len(row) != r for row in rows)):
                raise ConfigError(f"/{key}: expected an {r} x {r} matrix")
        for i, w in enumerate(data["weights"]):
            if len(w["alpha"]) != r:
                raise ConfigError(f"/weights/{i}/alpha: expected {r} entries")
            if not any(w["alpha"]):
                print(f"warning: /weights/{i} has alpha = 0", file=sys.stderr)
        for key in ("gamma", "chamber"):
            if key in data and len(data[key]) != r:
                raise ConfigError(f"/{key}: expected {r} entries")
        try:
            self.ctx = LatticeContext.from_json(data)
        except VSumsError as exc:
            raise ConfigError(f"/: {exc}") from None
        self.weights = tuple(AugmentedWeight.from_json(w) for w in data["weights"])
        self.problem = VerlindeProblem(self.ctx, self.weights)

    @classmethod
    def load(cls, path: str) -> "ProblemConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})") from None
        return cls(data)

    def point(self, key: str) -> tuple | None:
        if key not in self.data:
            return None
        return tuple(parse_rational(x) for x in self.data[key])


# ------------------------------------------------------------------ parsing


def _int_vector(text: str, rank: int, flag: str) -> tuple:
    try:
        v = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"{flag}: expected comma-separated integers, got {text!r}") from None
    if len(v) != rank:
        raise ConfigError(f"{flag}: expected {rank} entries, got {len(v)}")
    return v


def _rational_vector(text: str, rank: int, flag: str) -> tuple:
    try:
        v = tuple(parse_rational(x) for x in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{flag}: expected comma-separated rationals p/q, got {text!r}") from None
    if len(v) != rank:
        raise ConfigError(f"{flag}: expected {rank} entries, got {len(v)}")
    return v


def _point_arg(cfg: ProblemConfig, text: str | None, key: str, flag: str) -> tuple:
    if text is not None:
        return _rational_vector(text, cfg.ctx.rank, flag)
    p = cfg.point(key)
    if p is None:
        raise ConfigError(f"{flag} is required (or set \"{key}\" in the config)")
    return p


def _with_perturbation(point: tuple, seed: int | None, fn: Callable[[tuple], object]):
    """Run fn(point); on a genericity failure retry at seeded offsets when a seed is given.

    Offsets are independent uniform integers in [-1000, 1000] over 10^6 per coordinate.
    Returns (result, point actually used).
    """
    try:
        return fn(point), point
    except (NonGenericGammaError, NonGenericChamberPointError, WallPointError) as exc:
        if seed is None:
            raise
        first = exc
    rng = random.Random(seed)
    for _ in range(PERTURB_ATTEMPTS):
        q = tuple(x + Fraction(rng.randint(-1000, 1000), PERTURB_DENOMINATOR) for x in point)
        try:
            out = fn(q)
        except (NonGenericGammaError, NonGenericChamberPointError, WallPointError):
            continue
        print(f"note: {first}; perturbed to ({', '.join(rational_to_str(x) for x in q)})", file=sys.stderr)
        return out, q
    raise first


def _dump(obj, out) -> None:
    json.dump(obj, out, sort_keys=False, separators=(",", ":"))
    out.write("\n")


# ------------------------------------------------------------------ commands


def cmd_eval(args, out) -> int:
    from .verlinde import direct_verlinde

    cfg = ProblemConfig.load(args.config)
    lam = _int_vector(args.lam, cfg.ctx.rank, "--lambda")
    value = direct_verlinde(cfg.problem, lam, args.ell, force=args.force)
    _dump({"value": value_to_json(value)}, out)
    return 0


def cmd_germ(args, out) -> int:
    from .szenes import _plan, szenes_germ

    cfg = ProblemConfig.load(args.config)
    point = _point_arg(cfg, args.chamber, "chamber", "--chamber")
    germ, used = _with_perturbation(point, args.auto_perturb, lambda q: szenes_germ(cfg.problem, q))
    data = germ.to_json()
    data["chamber"] = [rational_to_str(x) for x in used]
    if args.symbolic:
        data["symbolic"] = [
            {"lambda_res": list(lr), "ell_res": er, "expression": repr(p)} for lr, er, p in germ.classes()
        ]
        data["vertices"] = _plan(cfg.problem, used).vertex_report()
    if args.out:
        with open(args.out, "w") as fh:
            _dump(data, fh)
        _dump({"written": args.out, "modulus": germ.modulus}, out)
    else:
        _dump(data, out)
    return 0


def cmd_decompose(args, out) -> int:
    from .arrange import Chamber
    from .decomp import Decomposer
    from .szenes import QuasiPolynomial
    from .verlinde import direct_verlinde

    cfg = ProblemConfig.load(args.config)
    r = cfg.ctx.rank
    gamma = _point_arg(cfg, args.gamma, "gamma", "--gamma")
    lam = _int_vector(args.lam, r, "--lambda")
    override = None
    cached_point = None
    if args.germ_cache:
        try:
            with open(args.germ_cache) as fh:
                cached = json.load(fh)
            override = QuasiPolynomial.from_json(cached, r)
            if "chamber" in cached:
                cached_point = tuple(parse_rational(x) for x in cached["chamber"])
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"--germ-cache: unreadable germ file ({exc})") from None

    def run(g):
        if cached_point is not None and cfg.problem.span_rank() == r:
            # the cached germ replaces the top term, so it must belong to gamma's chamber
            if not Chamber(cfg.ctx, [w.alpha for w in cfg.problem.weights], g).contains(cached_point):
                raise ConfigError("--germ-cache: the cached germ belongs to a different chamber than gamma")
        return Decomposer(cfg.problem, g, top_override=override).evaluate(lam, args.ell)

    rep, used = _with_perturbation(gamma, args.auto_perturb, run)
    if args.oracle:
        rep.oracle = direct_verlinde(cfg.problem, lam, args.ell, force=args.force)
    _dump(rep.to_json(), out)
    return 0


def cmd_partition(args, out) -> int:
    from .partition import partition_eval

    cfg = ProblemConfig.load(args.config)
    r = cfg.ctx.rank
    tau = _rational_vector(args.tau, r, "--tau")
    lam = _int_vector(args.lam, r, "--lambda")
    _dump({"value": value_to_json(partition_eval(cfg.weights, tau, lam))}, out)
    return 0


def cmd_equivariant(args, out) -> int:
    from .equivariant import equivariant_direct

    cfg = ProblemConfig.load(args.config)
    lam = _int_vector(args.lam, cfg.ctx.rank, "--lambda")
    if args.order < 0:
        raise ConfigError("--order: must be nonnegative")
    _dump(equivariant_direct(cfg.problem, lam, args.ell, args.order).to_json(), out)
    return 0


SU3_COLUMNS = ("mu1", "mu2", "ell", "germ", "dim1_total", "dim0_total", "total", "oracle", "match")


def cmd_su3(args, out) -> int:
    from .decomp import su3_report

    rep = su3_report(args.ell, args.window)
    data = rep.to_json()
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SU3_COLUMNS)
        for row in data["rows"]:
            writer.writerow([_csv_cell(row[c]) for c in SU3_COLUMNS])
        out.write(buf.getvalue())
    else:
        _dump(data, out)
    return 0


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, dict):
        return json.dumps(v, separators=(",", ":"))
    return str(v)


def cmd_verify(args, out) -> int:
    from .suites import run_suite

    results = run_suite(args.suite, seed=args.seed)
    for res in results:
        print(res.line(), file=sys.stderr)
        for f in res.failures:
            print(f"    {f}", file=sys.stderr)
    passed = all(r.passed for r in results)
    rows = [{k: v for k, v in r.to_json().items() if k != "seconds"} for r in results]
    _dump({"suite": args.suite, "seed": args.seed, "passed": passed, "criteria": rows}, out)
    return 0 if passed else 1


# ------------------------------------------------------------------ wiring


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vsums", description="Exact Verlinde sums, germs and decompositions.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name: str, fn, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        return p

    p = add("eval", cmd_eval, "direct Verlinde sum V(lambda, ell)")
    p.add_argument("--config", required=True)
    p.add_argument("--lambda", dest="lam", required=True, help="comma-separated integers")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--force", action="store_true", help="ignore the oracle size guard")

    p = add("germ", cmd_germ, "quasi-polynomial germ on the chamber of a point")
    p.add_argument("--config", required=True)
    p.add_argument("--chamber", help="interior point p/q,...; defaults to the config's chamber")
    p.add_argument("--symbolic", action="store_true", help="add readable class polynomials and the vertex report")
    p.add_argument("--out", help="write the germ JSON here instead of standard output")
    p.add_argument("--auto-perturb", type=int, metavar="SEED")

    p = add("decompose", cmd_decompose, "decomposition into germs and partition functions")
    p.add_argument("--config", required=True)
    p.add_argument("--gamma", help="generic point p/q,...; defaults to the config's gamma")
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--oracle", action="store_true", help="also evaluate the direct sum")
    p.add_argument("--germ-cache", help="germ JSON from 'germ' for the top-dimensional term")
    p.add_argument("--auto-perturb", type=int, metavar="SEED")
    p.add_argument("--force", action="store_true")

    p = add("partition", cmd_partition, "generalized partition function")
    p.add_argument("--config", required=True)
    p.add_argument("--tau", required=True, help="polarizing vector p/q,...")
    p.add_argument("--lambda", dest="lam", required=True)

    p = add("equivariant", cmd_equivariant, "equivariant Verlinde sum as a truncated series")
    p.add_argument("--config", required=True)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--order", type=int, required=True)

    p = add("su3", cmd_su3, "SU(3) report on a window")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--window", type=int, required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = add("verify", cmd_verify, "run an acceptance suite")
    p.add_argument("--suite", choices=("rank1", "su3", "random"), required=True)
    p.add_argument("--seed", type=int, default=0)
    return ap


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    args = build_parser().parse_args(argv)
    if getattr(args, "ell", 1) is not None and getattr(args, "ell", 1) < 1:
        print("config error: --ell must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.func(args, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except VSumsError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())
