"""Command-line entry point.

One binary, subcommand style; every run writes a JSON report (schema 1)
that echoes the versioned defaults table, so results are reproducible
and diffable.  Exit codes: 0 verdict holds, 1 fails, 2 usage or parse
error, 3 numeric failure, 4 inconclusive.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys

import numpy as np

from . import defaults
from .assoc import (
    association_mc_test,
    fkg_lattice_test,
    random_scalings,
    resolvent_monotonicity_scan,
    shifted_strong_order_test,
)
from .betaperm import beta_permanent, beta_positivity_scan
from .densities import pair_grid, squared_pair_density
from .errors import (
    InputFormatError,
    InvalidIndexError,
    PermacheckError,
    SchemaMismatchError,
)
from .green import (
    TransientChain,
    green_from_chain,
    hadamard_power,
    is_green,
    plus_constant_check,
    restriction,
)
from .idcheck import id_verdict, shifted_pair_id_test
from .matcore import dumps_matrix, load_matrix
from .sampler import PermanentalSpec, sample_permanental, save_batch
from .verdict import Verdict

__all__ = ["main", "parse_and_dispatch", "report_render"]

_USAGE_ERRORS = (InputFormatError, InvalidIndexError, SchemaMismatchError)


def _parse_list(text: str) -> list:
    vals = [float(t) for t in text.split(",") if t.strip()]
    if not vals:
        raise InputFormatError(f"empty numeric list {text!r}")
    return vals


def _parse_grid(text: str) -> list:
    """Either "start:stop:step" (inclusive) or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InputFormatError(f"grid {text!r} is not start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise InputFormatError(f"bad grid bounds in {text!r}")
        return [float(v) for v in np.arange(start, stop + step / 2, step)]
    return _parse_list(text)


def _parse_r_pairs(text: str) -> list:
    pairs = []
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        vals = _parse_list(chunk)
        if len(vals) != 2:
            raise InputFormatError(f"r-pair {chunk!r} is not r,r'")
        pairs.append((vals[0], vals[1]))
    if not pairs:
        raise InputFormatError("no r-pairs given")
    return pairs


def _parse_scalings(text: str, n: int, seed: int) -> list:
    if text.startswith("random:"):
        count = int(text.split(":", 1)[1])
        return random_scalings(n, count, seed)
    if text == "identity":
        return [np.ones(n)]
    out = []
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        vals = _parse_list(chunk)
        if len(vals) != n:
            raise InputFormatError(
                f"scaling {chunk!r} has {len(vals)} entries, kernel needs {n}")
        out.append(np.array(vals))
    if not out:
        raise InputFormatError("no scalings given")
    return out


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    env = os.environ.get("PERMACHECK_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise InputFormatError(f"PERMACHECK_SEED must be an integer: {env!r}") from exc
    return defaults.DEFAULT_SEED


def _exit_code(verdict: Verdict) -> int:
    if verdict.status in (Verdict.HOLDS, Verdict.HOLDS_UP_TO_DENSITY):
        return 0
    if verdict.status == Verdict.FAILS:
        return 1
    return 4


def _report(command: str, inputs: dict, result: dict) -> dict:
    return {
        "schema": defaults.SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "result": result,
        "defaults": defaults.defaults_table(),
    }


def _emit(report: dict, args, extra_stdout: str = None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2)
    path = getattr(args, "report", None)
    if extra_stdout is not None:
        sys.stdout.write(extra_stdout)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    elif extra_stdout is None:
        sys.stdout.write(text + "\n")


def report_render(report: dict, fmt: str = "json") -> str:
    """Stable rendering of a schema-1 report; table mode is lossy."""
    if report.get("schema") != defaults.SCHEMA_VERSION:
        raise SchemaMismatchError(
            f"report schema {report.get('schema')!r} is not {defaults.SCHEMA_VERSION}")
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    if fmt != "table":
        raise InputFormatError(f"unknown render format {fmt!r}")
    out = io.StringIO()
    out.write(f"command: {report.get('command', '?')}\n")
    result = report.get("result", {})
    verdict = result.get("verdict")
    if isinstance(verdict, dict):
        out.write(f"verdict: {verdict.get('status')}\n")
        if verdict.get("detail"):
            out.write(f"detail:  {verdict['detail']}\n")
        witness = verdict.get("witness")
        if witness:
            cells = "  ".join(f"{k}={witness[k]}" for k in sorted(witness))
            out.write(f"witness: {cells}\n")
    pairs = result.get("pairs")
    if isinstance(pairs, list):
        out.write("f\th\tcov\tse\tz\n")
        for row in pairs:
            out.write(f"{row['f']}\t{row['h']}\t{row['cov']:.6g}"
                      f"\t{row['se']:.6g}\t{row['z']:.3f}\n")
    for key in sorted(result):
        if key in ("verdict", "pairs") or isinstance(result[key], (dict, list)):
            continue
        out.write(f"{key}: {result[key]}\n")
    return out.getvalue()


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="permacheck",
        description="Infinite-divisibility and positive-correlation checks "
                    "for squared Gaussian and permanental vectors.")
    p.add_argument("--threads", type=int, default=1,
                   help="worker cap for parallel scans (results do not depend on it)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check-id", help="infinite-divisibility verdict for a kernel")
    s.add_argument("--input", required=True, help="matrix CSV or JSON file")
    s.add_argument("--beta", type=float, default=2.0)
    s.add_argument("--betas", help="scan beta grid, list or start:stop:step")
    s.add_argument("--alphas", help="scan alpha grid, list or start:stop:step")
    s.add_argument("--m-max", type=int, dest="m_max")
    s.add_argument("--report")

    s = sub.add_parser("perm", help="beta-permanent of a matrix")
    s.add_argument("--input", required=True)
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--exponent", choices=("cycles", "signature"), default="cycles")
    s.add_argument("--report")

    s = sub.add_parser("scan", help="beta-positivity scan over resolvents")
    s.add_argument("--input", required=True)
    s.add_argument("--betas")
    s.add_argument("--alphas")
    s.add_argument("--m-max", type=int, dest="m_max")
    s.add_argument("--report")

    g = sub.add_parser("green", help="Green-matrix operations")
    gsub = g.add_subparsers(dest="green_command", required=True)

    s = gsub.add_parser("gen", help="potential matrix of a transient chain")
    s.add_argument("--chain", required=True, help="one-step kernel CSV or JSON")
    s.add_argument("--out", help="write the matrix CSV here instead of stdout")
    s.add_argument("--report")

    s = gsub.add_parser("check", help="recognize a Green matrix")
    s.add_argument("--input", required=True)
    s.add_argument("--report")

    s = gsub.add_parser("power", help="entrywise power with Green verdict")
    s.add_argument("--input", required=True)
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--out")
    s.add_argument("--report")

    s = gsub.add_parser("plus-c", help="ID verdicts for G + c*ones over a grid")
    s.add_argument("--input", required=True)
    s.add_argument("--grid", default=",".join(str(c) for c in defaults.C_GRID))
    s.add_argument("--report")

    s = gsub.add_parser("restrict", help="principal submatrix with Green verdict")
    s.add_argument("--input", required=True)
    s.add_argument("--keep", required=True, help="comma list of 0-based indices")
    s.add_argument("--out")
    s.add_argument("--report")

    s = sub.add_parser("sample", help="draw a permanental sample batch")
    s.add_argument("--kernel", required=True)
    s.add_argument("--k", type=int, default=1, help="index beta = 2/k")
    s.add_argument("--n", type=float, default=1000.0)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True, help="binary batch file")
    s.add_argument("--report")

    s = sub.add_parser("check-assoc", help="Monte Carlo association test")
    s.add_argument("--kernel", required=True)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--n", type=float, default=1e5)
    s.add_argument("--seed", type=int)
    s.add_argument("--report")

    s = sub.add_parser("scan-monotone", help="resolvent monotonicity scan")
    s.add_argument("--kernel", required=True)
    s.add_argument("--alphas",
                   default=f"0:{defaults.MONOTONE_ALPHA_MAX:g}:"
                           f"{defaults.MONOTONE_ALPHA_MAX / (defaults.MONOTONE_ALPHA_POINTS - 1):g}")
    s.add_argument("--scalings", default="identity",
                   help='"identity", "random:COUNT", or semicolon-separated vectors')
    s.add_argument("--seed", type=int)
    s.add_argument("--report")

    s = sub.add_parser("shifted-order", help="strong stochastic ordering of shifted pairs")
    s.add_argument("--kernel", required=True)
    s.add_argument("--r-pairs", required=True, dest="r_pairs",
                   help='semicolon-separated r,r\' pairs, e.g. "1,0.5;2,1"')
    s.add_argument("--report")

    s = sub.add_parser("check-fkg", help="FKG lattice test for a 2x2 kernel")
    s.add_argument("--kernel", required=True)
    s.add_argument("--shift", type=float, default=0.0)
    s.add_argument("--report")

    s = sub.add_parser("check-shifted-pair",
                       help="shift-stable ID test for a Gaussian pair")
    s.add_argument("--vx", type=float, required=True)
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--vy", type=float, required=True)
    s.add_argument("--report")

    s = sub.add_parser("render", help="re-render a report JSON")
    s.add_argument("--input", required=True)
    s.add_argument("--format", choices=("json", "table"), default="json")
    return p


def _cmd_check_id(args) -> int:
    G = load_matrix(args.input)
    betas = _parse_grid(args.betas) if args.betas else None
    alphas = _parse_grid(args.alphas) if args.alphas else None
    iv = id_verdict(G, args.beta, betas=betas, alphas=alphas, m_max=args.m_max)
    inputs = {"input": args.input, "beta": args.beta, "m_max": args.m_max,
              "betas": betas, "alphas": alphas}
    _emit(_report("check-id", inputs, iv.to_dict()), args)
    return _exit_code(iv.verdict)


def _cmd_perm(args) -> int:
    G = load_matrix(args.input)
    value = beta_permanent(G.entries, args.beta, exponent=args.exponent)
    inputs = {"input": args.input, "beta": args.beta, "exponent": args.exponent}
    _emit(_report("perm", inputs, {"value": value}), args,
          extra_stdout=f"{value:.17g}\n")
    return 0


def _cmd_scan(args) -> int:
    G = load_matrix(args.input)
    betas = _parse_grid(args.betas) if args.betas else None
    alphas = _parse_grid(args.alphas) if args.alphas else None
    rep = beta_positivity_scan(G, betas=betas, alphas=alphas,
                               m_max=args.m_max, threads=args.threads)
    inputs = {"input": args.input, "betas": betas, "alphas": alphas,
              "m_max": args.m_max}
    _emit(_report("scan", inputs, rep.to_dict()), args)
    return _exit_code(rep.verdict)


def _cmd_green(args) -> int:
    if args.green_command == "gen":
        chain = TransientChain(load_matrix(args.chain).entries)
        G = green_from_chain(chain)
        verdict = is_green(G)
        csv_text = dumps_matrix(G)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(csv_text)
        result = {"verdict": verdict.to_dict(), "kernel": G.to_dict()}
        _emit(_report("green gen", {"chain": args.chain}, result), args,
              extra_stdout=None if args.out else csv_text)
        return _exit_code(verdict)
    if args.green_command == "check":
        verdict = is_green(load_matrix(args.input))
        _emit(_report("green check", {"input": args.input},
                      {"verdict": verdict.to_dict()}), args)
        return _exit_code(verdict)
    if args.green_command == "power":
        rep = hadamard_power(load_matrix(args.input), args.beta)
        csv_text = dumps_matrix(rep.kernel)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(csv_text)
        _emit(_report("green power", {"input": args.input, "beta": args.beta},
                      rep.to_dict()), args,
              extra_stdout=None if args.out else csv_text)
        return _exit_code(rep.verdict)
    if args.green_command == "plus-c":
        rep = plus_constant_check(load_matrix(args.input), _parse_list(args.grid))
        _emit(_report("green plus-c", {"input": args.input, "grid": args.grid},
                      rep.to_dict()), args)
        return _exit_code(rep.verdict)
    if args.green_command == "restrict":
        keep = [int(v) for v in args.keep.split(",") if v.strip()]
        sub = restriction(load_matrix(args.input), keep)
        verdict = is_green(sub)
        csv_text = dumps_matrix(sub)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(csv_text)
        result = {"verdict": verdict.to_dict(), "kernel": sub.to_dict()}
        _emit(_report("green restrict", {"input": args.input, "keep": keep},
                      result), args, extra_stdout=None if args.out else csv_text)
        return _exit_code(verdict)
    raise InputFormatError(f"unknown green subcommand {args.green_command!r}")


def _cmd_sample(args) -> int:
    G = load_matrix(args.kernel)
    seed = _resolve_seed(args)
    n = int(args.n)
    if args.k < 1:
        raise InvalidIndexError("k must be a positive integer")
    spec = PermanentalSpec(G, 2.0 / args.k)
    batch = sample_permanental(spec, n, seed)
    save_batch(batch, args.out)
    result = {"n_draws": batch.n_draws, "dim": batch.dim, "seed": seed,
              "out": args.out, "ess": batch.ess}
    _emit(_report("sample", {"kernel": args.kernel, "k": args.k, "n": n,
                             "seed": seed}, result), args)
    return 0


def _cmd_check_assoc(args) -> int:
    G = load_matrix(args.kernel)
    seed = _resolve_seed(args)
    if args.k < 1:
        raise InvalidIndexError("k must be a positive integer")
    spec = PermanentalSpec(G, 2.0 / args.k)
    rep = association_mc_test(spec, n_draws=int(args.n), seed=seed)
    _emit(_report("check-assoc", {"kernel": args.kernel, "k": args.k,
                                  "n": int(args.n), "seed": seed},
                  rep.to_dict()), args)
    return _exit_code(rep.verdict)


def _cmd_scan_monotone(args) -> int:
    G = load_matrix(args.kernel)
    seed = _resolve_seed(args)
    alphas = _parse_grid(args.alphas)
    scalings = _parse_scalings(args.scalings, G.dim, seed)
    verdict = resolvent_monotonicity_scan(G, alphas=alphas, D_set=scalings)
    inputs = {"kernel": args.kernel, "alphas": alphas,
              "scalings": args.scalings, "seed": seed}
    _emit(_report("scan-monotone", inputs, {"verdict": verdict.to_dict()}), args)
    return _exit_code(verdict)


def _cmd_shifted_order(args) -> int:
    G = load_matrix(args.kernel)
    rep = shifted_strong_order_test(G, _parse_r_pairs(args.r_pairs))
    _emit(_report("shifted-order", {"kernel": args.kernel,
                                    "r_pairs": args.r_pairs}, rep.to_dict()), args)
    return _exit_code(rep.verdict)


def _cmd_check_fkg(args) -> int:
    G = load_matrix(args.kernel)
    density = squared_pair_density(G, args.shift)
    grid = pair_grid(G, args.shift)
    verdict = fkg_lattice_test(density, grid)
    _emit(_report("check-fkg", {"kernel": args.kernel, "shift": args.shift},
                  {"verdict": verdict.to_dict()}), args)
    return _exit_code(verdict)


def _cmd_check_shifted_pair(args) -> int:
    verdict = shifted_pair_id_test(args.vx, args.c, args.vy)
    _emit(_report("check-shifted-pair",
                  {"vx": args.vx, "c": args.c, "vy": args.vy},
                  {"verdict": verdict.to_dict()}), args)
    return _exit_code(verdict)


def _cmd_render(args) -> int:
    with open(args.input, "r", encoding="utf-8") as fh:
        try:
            report = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"bad report JSON: {exc}") from exc
    sys.stdout.write(report_render(report, args.format))
    return 0


_HANDLERS = {
    "check-id": _cmd_check_id,
    "perm": _cmd_perm,
    "scan": _cmd_scan,
    "green": _cmd_green,
    "sample": _cmd_sample,
    "check-assoc": _cmd_check_assoc,
    "scan-monotone": _cmd_scan_monotone,
    "shifted-order": _cmd_shifted_order,
    "check-fkg": _cmd_check_fkg,
    "check-shifted-pair": _cmd_check_shifted_pair,
    "render": _cmd_render,
}


def _error_object(exc: Exception) -> dict:
    obj = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("indices", "value", "cond_estimate", "min_eigenvalue",
                 "spectral_radius", "near_zero_entries"):
        if hasattr(exc, attr) and getattr(exc, attr) is not None:
            val = getattr(exc, attr)
            obj[attr] = list(val) if isinstance(val, tuple) else val
    return obj


def parse_and_dispatch(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
        if code not in (0, 2):
            code = 2
        if code == 2:
            sys.stderr.write(json.dumps(
                {"error": "UsageError", "message": "bad command line"},
                sort_keys=True) + "\n")
        return code
    try:
        return _HANDLERS[args.command](args)
    except _USAGE_ERRORS as exc:
        sys.stderr.write(json.dumps(_error_object(exc), sort_keys=True) + "\n")
        return 2
    except PermacheckError as exc:
        sys.stderr.write(json.dumps(_error_object(exc), sort_keys=True) + "\n")
        return 3
    except OSError as exc:
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "message": str(exc)},
            sort_keys=True) + "\n")
        return 2


def main() -> None:
    sys.exit(parse_and_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
