"""
triangular-lsd command line.

Every artifact embeds its RunConfig: JSON output is {"config": ..., "result": ...}
with sorted keys, CSV output starts with a '# config: {...}' line.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from triangular_lsd.acceptance import SCALES, format_table, run_acceptance
from triangular_lsd.config import RunConfig, configure_logging, default_seed, default_workers, load_config_file
from triangular_lsd.ensembles import Ensemble, InputDistribution, draw, parse_ensemble
from triangular_lsd.errors import ResourceLimitError
from triangular_lsd.joint import Wiring, freeness_report, joint_moment, sum_semicircle_check
from triangular_lsd.lsd import MomentMethod, contributing_words, density_curve, evaluate_word, moment_table
from triangular_lsd.patterns import parse_pattern
from triangular_lsd.spectra import DEFAULT_BINS, empirical_moments, histogram, replicate_values, spectral_edge, summarize
from triangular_lsd.words import WORD_CLASSES, Word, classify, enumerate_class

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

BOOLEAN_FLAGS = {"full", "freeness"}

# Parameters recorded in RunConfig.params, per subcommand.
PARAMS = {
    "gen": ("pattern", "n", "dist"),
    "esd": ("pattern", "n", "dist", "reps", "kmax", "bins", "range"),
    "words": ("k", "word_class"),
    "pu": ("pattern", "k", "word", "method", "n_list", "m", "full"),
    "moments": ("pattern", "kmax", "method", "n_list", "m"),
    "density": ("what", "points"),
    "joint": ("monomial", "patterns", "n", "dist", "reps", "wiring", "freeness"),
    "verify": ("scale", "only"),
}


def int_list(text: str) -> List[int]:
    return [int(tok) for tok in str(text).split(",") if tok.strip()]


def float_pair(text: str) -> Tuple[float, float]:
    parts = [float(tok) for tok in str(text).split(",") if tok.strip()]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"Expected 'lo,hi', got {text!r}")
    return parts[0], parts[1]


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=default_seed(),
                        help="Master seed (CLI > config file > env:TRILSD_SEED > 20120406)")
    common.add_argument("--workers", type=int, default=default_workers(),
                        help="Worker threads (CLI > config file > env:TRILSD_WORKERS > 1)")
    # SUPPRESS keeps a subcommand from overwriting values given before it.
    common.add_argument("--config", default=argparse.SUPPRESS, help="KEY=value file supplying any flag")
    common.add_argument("--log-level", default=argparse.SUPPRESS,
                        help="DEBUG, INFO, WARNING (env:TRILSD_LOG_LEVEL)")
    return common


def _output() -> argparse.ArgumentParser:
    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--out", default=None, help="Output file (default: stdout)")
    return output


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="triangular-lsd",
        description="Limiting spectral distributions of triangular patterned random matrices",
    )
    parser.add_argument("--config", default=None, help="KEY=value file supplying any flag")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING (env:TRILSD_LOG_LEVEL)")
    common = _common()
    output = _output()
    sub = parser.add_subparsers(dest="command", required=True)

    ensembles = [e.value for e in Ensemble] + ["reverse-circulant"]
    dists = [d.value for d in InputDistribution]

    p = sub.add_parser("gen", parents=[common, output], help="Write one matrix draw as CSV")
    p.add_argument("--pattern", default="wigner", help=f"One of {', '.join(ensembles)}")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--dist", choices=dists, default="gaussian")

    p = sub.add_parser("esd", parents=[common], help="Eigenvalues, histogram and moments of replicate draws")
    p.add_argument("--pattern", default="wigner")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--dist", choices=dists, default="gaussian")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--kmax", type=int, default=6)
    p.add_argument("--bins", type=int, default=DEFAULT_BINS)
    p.add_argument("--range", type=float_pair, default="-3,3", help="Histogram range 'lo,hi'")
    p.add_argument("--out-prefix", default="esd",
                   help="Writes <prefix>_eigs.csv, <prefix>_hist.csv and <prefix>_moments.json")

    p = sub.add_parser("words", parents=[common, output], help="Enumerate words of length 2k")
    p.add_argument("--k", type=int, required=False, default=2)
    p.add_argument("--class", dest="word_class", choices=WORD_CLASSES, default="all")

    p = sub.add_parser("pu", parents=[common, output], help="Word contributions p_u(w)")
    p.add_argument("--pattern", default="wigner")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--word", default=None, help="A single word such as abba or 1,2,2,1")
    p.add_argument("--method", choices=[m.value for m in MomentMethod], default="exact")
    p.add_argument("--n-list", type=int_list, default="40,80,160")
    p.add_argument("--grid", "--m", dest="m", type=int, default=160, help="Grid resolution (multiple of 4)")
    p.add_argument("--full", action="store_true", help="Drop the triangular constraint")

    p = sub.add_parser("moments", parents=[common, output], help="Limit moments beta_2k")
    p.add_argument("--pattern", default="wigner")
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--method", choices=[m.value for m in MomentMethod], default="exact")
    p.add_argument("--n-list", type=int_list, default="40,80,160")
    p.add_argument("--grid", "--m", dest="m", type=int, default=160, help="Grid resolution (multiple of 4)")

    p = sub.add_parser("density", parents=[common, output], help="psi or the triangular Wigner LSD density as CSV")
    p.add_argument("--what", choices=["psi", "wigner-lsd"], default="psi")
    p.add_argument("--points", type=int, default=2000)

    p = sub.add_parser("joint", parents=[common, output], help="Joint moments of independent triangular matrices")
    p.add_argument("--monomial", default="1,1,2,2")
    p.add_argument("--patterns", default="wigner,wigner")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--dist", choices=dists, default="gaussian")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--wiring", choices=[w.value for w in Wiring], default=None,
                   help="Also check W^u + W^l against the semicircle")
    p.add_argument("--freeness", action="store_true", help="Also run the freeness report and its control")

    p = sub.add_parser("verify", parents=[common, output], help="Run the acceptance criteria")
    p.add_argument("--scale", choices=sorted(SCALES), default="full")
    p.add_argument("--only", type=int_list, default="", help="Comma-separated criterion numbers")
    return parser


def _subparsers(parser: argparse.ArgumentParser) -> List[argparse.ArgumentParser]:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return list(action.choices.values())
    return []


def _config_keys(subparsers: Sequence[argparse.ArgumentParser]) -> Dict[str, str]:
    """Normalized option name -> dest, so GRID, M and CLASS reach the right flag."""
    keys = {}
    for subparser in subparsers:
        for action in subparser._actions:
            if action.dest == "help":
                continue
            for option in action.option_strings:
                keys[option.lstrip("-").lower().replace("-", "_")] = action.dest
    return keys


def _apply_config_file(parser: argparse.ArgumentParser, path: str) -> None:
    subparsers = _subparsers(parser)
    keys = _config_keys(subparsers)
    raw: Dict[str, Any] = load_config_file(path)
    unknown = sorted(set(raw) - set(keys))
    if unknown:
        raise ValueError(f"Unknown key(s) in config file {path}: {', '.join(unknown)}")
    values = {keys[key]: value for key, value in raw.items()}
    for key in BOOLEAN_FLAGS & values.keys():
        values[key] = str(values[key]).strip().lower() in ("1", "true", "yes", "on")
    for subparser in subparsers:
        subparser.set_defaults(**values)


def _to_plain(name: str, value: Any) -> Any:
    if name == "range" and value is not None:
        return ",".join(f"{v:g}" for v in value)
    if isinstance(value, tuple):
        return list(value)
    return value


def make_config(args: argparse.Namespace) -> RunConfig:
    params = {name: _to_plain(name, getattr(args, name)) for name in PARAMS[args.command] if hasattr(args, name)}
    out = getattr(args, "out", None) or getattr(args, "out_prefix", None)
    return RunConfig(subcommand=args.command, seed=args.seed, workers=args.workers, out=out, params=params)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)


def write_json(config: RunConfig, result: Any, out: Optional[str]) -> None:
    payload = {"config": config.model_dump(), "result": result}
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", out)


def _cell(value: Any) -> str:
    if isinstance(value, complex) or np.iscomplexobj(value):
        z = complex(value)
        return f"{z.real:.17g}{z.imag:+.17g}j"
    return f"{float(value):.17g}"


def write_csv(config: RunConfig, header: Sequence[str], rows, out: Optional[str]) -> None:
    lines = [f"# config: {config.header()}", ",".join(header)]
    lines.extend(",".join(_cell(v) for v in row) for row in rows)
    _emit("\n".join(lines) + "\n", out)


def cmd_gen(args: argparse.Namespace, config: RunConfig) -> int:
    matrix = draw(args.pattern, args.n, args.dist, args.seed)
    header = [f"c{j}" for j in range(1, args.n + 1)]
    write_csv(config, header, matrix.entries, args.out)
    return EXIT_OK


def cmd_esd(args: argparse.Namespace, config: RunConfig) -> int:
    ensemble = parse_ensemble(args.pattern)
    values = replicate_values(ensemble, args.n, args.dist, args.reps, args.seed, args.workers)
    prefix = args.out_prefix

    header = [f"rep{r}" for r in range(1, args.reps + 1)]
    write_csv(config, header, np.column_stack(values), f"{prefix}_eigs.csv")

    edges, density = histogram(np.concatenate(values), args.bins, tuple(args.range))
    write_csv(config, ["bin_lo", "bin_hi", "density"], zip(edges[:-1], edges[1:], density), f"{prefix}_hist.csv")

    mean, stderr = summarize(np.vstack([empirical_moments(v, args.kmax) for v in values]))
    result: Dict[str, Any] = {
        "kind": "singular" if ensemble.asymmetric else "eigenvalue",
        "moments": [{"k": k + 1, "mean": float(mean[k]), "stderr": float(stderr[k]), "reps": args.reps}
                    for k in range(args.kmax)],
    }
    if not ensemble.asymmetric:
        result["spectral_edge"] = spectral_edge(values).tolist()
    write_json(config, result, f"{prefix}_moments.json")
    return EXIT_OK


def cmd_words(args: argparse.Namespace, config: RunConfig) -> int:
    words = enumerate_class(args.word_class, args.k)
    rows = [{"word": str(w), "letters": list(w.letters), **classify(w).to_dict()} for w in words]
    result: Dict[str, Any] = {"k": args.k, "class": args.word_class, "count": len(rows), "words": rows}
    if args.word_class == "all":
        result["counts"] = {name: sum(row[name] for row in rows) for name in ("pair_matched", "catalan", "symmetric")}
    write_json(config, result, args.out)
    return EXIT_OK


def cmd_pu(args: argparse.Namespace, config: RunConfig) -> int:
    pattern = parse_pattern(args.pattern)
    method = MomentMethod(args.method)
    words = [Word.parse(args.word)] if args.word else contributing_words(pattern, args.k)
    rows = []
    for w in words:
        value = evaluate_word(pattern, w, method, args.n_list, args.m, not args.full, args.workers)
        rows.append({"word": str(w), **value.to_dict()})
    write_json(config, {"pattern": pattern.value, "method": method.value, "words": rows}, args.out)
    return EXIT_OK


def cmd_moments(args: argparse.Namespace, config: RunConfig) -> int:
    table = moment_table(args.pattern, args.kmax, args.method, args.n_list, args.m, args.workers)
    write_json(config, table.to_dict(), args.out)
    return EXIT_OK


def cmd_density(args: argparse.Namespace, config: RunConfig) -> int:
    x, density = density_curve(args.what, args.points)
    write_csv(config, ["x", "density"], zip(x, density), args.out)
    return EXIT_OK


def cmd_joint(args: argparse.Namespace, config: RunConfig) -> int:
    patterns = [p for p in args.patterns.split(",") if p.strip()]
    estimate = joint_moment(args.monomial, patterns, args.n, args.dist, args.reps, args.seed, args.workers)
    result: Dict[str, Any] = {"joint_moment": estimate.to_dict()}
    if args.freeness:
        result["freeness"] = freeness_report(args.n, args.reps, args.seed, False, args.dist, args.workers).to_dict()
        result["freeness_control"] = freeness_report(args.n, args.reps, args.seed, True, args.dist,
                                                     args.workers).to_dict()
    if args.wiring:
        result["semicircle"] = sum_semicircle_check(args.n, args.reps, args.seed, args.wiring, args.dist,
                                                    workers=args.workers).to_dict()
    write_json(config, result, args.out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: RunConfig) -> int:
    results = run_acceptance(args.scale, args.seed, args.workers, tuple(args.only))
    print(format_table(results))
    if args.out:
        write_json(config, [r.to_dict() for r in results], args.out)
    failed = [r.number for r in results if not r.passed]
    if failed:
        logger.error(f"Acceptance criteria failed: {failed}")
        return EXIT_FAILED
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "esd": cmd_esd,
    "words": cmd_words,
    "pu": cmd_pu,
    "moments": cmd_moments,
    "density": cmd_density,
    "joint": cmd_joint,
    "verify": cmd_verify,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    pre.add_argument("--log-level", default=None)
    known, _ = pre.parse_known_args(argv)
    configure_logging(known.log_level)

    parser = build_parser()
    try:
        if known.config:
            _apply_config_file(parser, known.config)
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        config = make_config(args)
        return COMMANDS[args.command](args, config)
    except ResourceLimitError as e:
        logger.error(f"Resource limit: {e}")
        print(f"resource limit: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as e:
        logger.error(f"Invalid input: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> int:
    return run()


if __name__ == "__main__":
    sys.exit(main())
