""" Command line front end

Exit status is 0 on success, 1 when a deterministic claim or an acceptance
check fails and 2 on usage errors.
"""

import argparse
import csv
import io
import json
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence

from .acceptance import results_to_json, run_all
from .bounds import BoundReport, pipeline_const_eps, pipeline_general
from .common import (
    Error, Format, LemmaViolation, ParameterError, atomic_write, format_float)
from .config import RunConfig
from .const import GAMMA_EPS_DIV
from .constructions import (
    appendix_lower_bounds, build_cluster_graph, cluster_lower_bound)
from .graphs import Graph, count_stars, sample_gnp
from .iidsum import IidSumModel, iid_bound_transfer, iid_exact_distribution
from .montecarlo import (
    Estimator, GridSpec, estimate_for, rows_to_csv, sweep)
from .oracles import exact_star_tail
from .peeling import PeelingParams, Variant, verify_sandwich

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# flags shared by all subcommands; values stay text until RunConfig converts
_FLAGS = (
    ("--n", "number of vertices"),
    ("--p", "edge probability, a float or a fraction a/b"),
    ("--r", "arm count of the star"),
    ("--eps", "relative deviation"),
    ("--t", "absolute deviation"),
    ("--threshold", "tail threshold"),
    ("--x", "target star count of the planted graph"),
    ("--D", "base degree cap of the peeling chain"),
    ("--seed", "64 bit base seed"),
    ("--reps", "Monte-Carlo replicates"),
    ("--gamma", "log tilt exponent"),
    ("--beta", "packing slack"),
    ("--xi", "distance of p from one"),
    ("--workers", "worker processes"),
    ("--estimator", "exact, mc or auto"),
    ("--out", "artifact path"),
    ("--graph", "edge list file to use instead of a sample"),
    ("--ns", "comma separated grid of n"),
    ("--ps", "comma separated grid of p"),
    ("--rs", "comma separated grid of r"),
    ("--epss", "comma separated grid of eps"),
    ("--c", "exponent constant"),
    ("--d", "lower bound multiplier"),
    ("--b", "disjoint approximation constant"),
    ("--n0", "size from which asymptotic claims are flagged in range"),
    ("--alpha", "deviation exponent floor"),
)

_FLAG_KEYS = tuple(flag[2:] for flag, _ in _FLAGS) + ("format", "exact")


def _shared_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    for flag, help_text in _FLAGS:
        parser.add_argument(flag, help=help_text)
    parser.add_argument(
        "--format", choices=[fmt.value for fmt in Format],
        help="artifact format")
    parser.add_argument(
        "--exact", action="store_const", const="true",
        help="use exact enumeration")
    return parser


def build_parser() -> argparse.ArgumentParser:
    """ Parser with one subcommand per module. """
    parser = argparse.ArgumentParser(
        prog="startail",
        description="Upper tails of star counts in G(n, p)")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0,
        help="log at INFO, or DEBUG when given twice")
    parser.add_argument("--config", help="key=value file of parameters")
    shared = _shared_parser()
    commands = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("sample", "sample G(n, p) and count stars"),
            ("tail", "tail probability Pr(X >= threshold)"),
            ("bounds", "upper tail bound pipeline"),
            ("peel", "peeling chain, event certificate and sandwich"),
            ("construct", "planted graph and lower bounds"),
            ("iidsum", "independent binomial model"),
            ("sweep", "CSV sweep over a parameter grid"),
            ("verify", "acceptance suite")):
        commands.add_parser(name, parents=[shared], help=help_text)
    return parser


def _emit(config: RunConfig, text: str, default_name: str) -> None:
    path = config.output_path(default_name)
    if path is None:
        sys.stdout.write(text)
    else:
        atomic_write(path, text)
        log.info("Wrote %s", path)


def _json(data: Any) -> str:
    return json.dumps(data, indent=2) + "\n"


def _report_text(report: BoundReport, fmt: Format) -> str:
    if fmt is Format.JSON:
        return report.to_json()
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["name", "value", "log_value", "formula"])
    writer.writerows(report.rows())
    return buffer.getvalue()


def _estimator(config: RunConfig) -> Estimator:
    if config.get("exact"):
        return Estimator.EXACT
    try:
        return Estimator(config.get("estimator"))
    except ValueError as ex:
        raise ParameterError(
            f"Unknown estimator {config.get('estimator')!r}") from ex


def _cmd_sample(config: RunConfig) -> int:
    n, r = config.require("n"), config.get("r")
    graph = sample_gnp(n, config.require("p"), config.get("seed"))
    if config.get("format", Format.JSON) is Format.TEXT:
        _emit(config, graph.to_text(), "graph.txt")
    else:
        _emit(config, _json({
            "n": n, "r": r, "seed": config.get("seed"),
            "edges": graph.num_edges, "stars": count_stars(graph, r),
            "graph": graph.to_text()}), "graph.json")
    return EXIT_OK


def _cmd_tail(config: RunConfig) -> int:
    n, p, r = config.require("n"), config.require("p"), config.get("r")
    threshold = config.require("threshold")
    estimator = _estimator(config)
    if estimator is Estimator.EXACT:
        value, estimate = float(exact_star_tail(n, p, r, threshold)), None
    else:
        value, estimate = estimate_for(
            n, p, r, threshold, config.get("reps"), config.get("seed"),
            config.get("workers"), estimator)
    if config.get("format", Format.TEXT) is Format.JSON:
        record: Dict[str, Any] = {
            "n": n, "p": float(p), "r": r, "threshold": threshold,
            "tail": value, "method": "exact" if estimate is None else "mc"}
        if estimate is not None:
            record["estimate"] = estimate.to_dict()
        _emit(config, _json(record), "tail.json")
    else:
        _emit(config, format_float(value) + "\n", "tail.txt")
    return EXIT_OK


def _default_gamma(config: RunConfig) -> float:
    if "gamma" in config:
        return float(config.get("gamma"))
    return 1 / (GAMMA_EPS_DIV * config.get("r"))


def _cmd_bounds(config: RunConfig) -> int:
    n, p, r = config.require("n"), config.require("p"), config.get("r")
    kwargs = {"beta": config.get("beta")} if "beta" in config else {}
    if "eps" in config:
        report = pipeline_const_eps(
            n, p, r, config.get("eps"), constants=config.constants, **kwargs)
    else:
        report = pipeline_general(
            n, p, r, config.require("t"), _default_gamma(config),
            constants=config.constants, xi=config.get("xi"), **kwargs)
    fmt = config.get("format", Format.JSON)
    name = "bounds.csv" if fmt is Format.CSV else "bounds.json"
    _emit(config, _report_text(report, fmt), name)
    return EXIT_OK


def _input_graph(config: RunConfig) -> Graph:
    if "graph" in config:
        try:
            text = config.get("graph").read_text(encoding="utf-8")
        except OSError as ex:
            raise ParameterError(f"Can not read graph file: {ex}") from ex
        return Graph.from_text(text)
    return sample_gnp(
        config.require("n"), config.require("p"), config.get("seed"))


def _cmd_peel(config: RunConfig) -> int:
    graph = _input_graph(config)
    variant = Variant.TPLUS if "gamma" in config else Variant.T
    beta = config.get("beta", variant.max_beta)
    params = PeelingParams(
        config.get("r"), graph.n, config.require("D"), config.require("t"),
        beta=beta, gamma=config.get("gamma"),
        p=config.require("p") if variant is Variant.TPLUS else None)
    report = verify_sandwich(graph, params, variant)
    _emit(config, _json(report.to_dict()), "peel.json")
    return EXIT_OK


def _cmd_construct(config: RunConfig) -> int:
    n, r, x = config.require("n"), config.get("r"), config.require("x")
    construction = build_cluster_graph(n, r, x)
    record: Dict[str, Any] = {"construction": construction.to_dict()}
    if "p" in config:
        bound = cluster_lower_bound(n, config.get("p"), r, x)
        record["lower_bound"] = bound.value
        record["log_lower_bound"] = bound.log_value
    if "t" in config:
        lower = appendix_lower_bounds(
            n, config.require("p"), r, config.get("t"), config.get("xi"),
            config.constants)
        record["lower_bounds"] = {
            **lower._asdict(), "log_best": lower.log_best, "best": lower.best}
    _emit(config, _json(record), "construct.json")
    return EXIT_OK


def _cmd_iidsum(config: RunConfig) -> int:
    model = IidSumModel(config.require("n"), config.require("p"),
                        config.get("r"))
    law = iid_exact_distribution(model)
    record: Dict[str, Any] = {
        "model": model.to_dict(),
        "mean": float(model.mean),
        "variance": float(model.variance),
        "distribution": law.to_dict(),
    }
    if "threshold" in config:
        record["tail"] = float(law.tail(config.get("threshold")))
    if "eps" in config or "t" in config:
        report = iid_bound_transfer(
            model, eps=config.get("eps"), t=config.get("t"),
            gamma=config.get("gamma"), constants=config.constants)
        record["bounds"] = report.to_dict()
    _emit(config, _json(record), "iidsum.json")
    return EXIT_OK


def _cmd_sweep(config: RunConfig) -> int:
    grid = GridSpec.create(
        config.require("ns"), config.require("ps"),
        config.get("rs", [config.get("r")]), config.require("epss"))
    rows = sweep(grid, _estimator(config), replicates=config.get("reps"),
                 seed=config.get("seed"), workers=config.get("workers"),
                 constants=config.constants, xi=config.get("xi"))
    _emit(config, rows_to_csv(rows), "sweep.csv")
    return EXIT_OK


def _cmd_verify(config: RunConfig) -> int:
    results = run_all()
    _emit(config, results_to_json(results), "verify.json")
    for result in results:
        if not result.passed:
            log.error("Check %s failed with %d violations",
                      result.name, result.violations)
    return EXIT_OK if all(result.passed for result in results) else EXIT_FAILURE


_COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "sample": _cmd_sample,
    "tail": _cmd_tail,
    "bounds": _cmd_bounds,
    "peel": _cmd_peel,
    "construct": _cmd_construct,
    "iidsum": _cmd_iidsum,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """ Runs one subcommand and returns the exit status. """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return int(ex.code or 0)
    logging.basicConfig(
        level=max(logging.DEBUG, logging.WARNING - 10 * args.verbose),
        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    flags = {key: getattr(args, key) for key in _FLAG_KEYS}
    try:
        config = RunConfig.load(flags, args.config)
        log.debug("Resolved configuration:\n%s", config.to_text())
        return _COMMANDS[args.command](config)
    except LemmaViolation as ex:
        log.error("%s", ex)
        print(f"startail: assertion failed: {ex}", file=sys.stderr)
        return EXIT_FAILURE
    except Error as ex:
        print(f"startail: error: {ex}", file=sys.stderr)
        return EXIT_USAGE


def main(argv: Optional[List[str]] = None) -> None:
    """ Console script entry point """
    sys.exit(run(argv))
