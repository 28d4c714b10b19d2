"""Command line entry point.

Two subcommands: ``run`` fits one method to a dataset (a delimited file
or a built-in synthetic example) and writes the full artifact set to an
output directory, ``synth`` writes a synthetic dataset as CSV.  Exit
codes: 0 success, 2 unreadable input, 3 invalid data or configuration,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time

from . import __version__, benchmarks, psa_o, psa_s, synthdata
from .benchmarks import TransformSpec
from .dataset import Dataset, default_precision, ingest_csv, write_dataset
from .errors import ParseError, SubsimplexError, ValidationError
from .psa_o import DEFAULT_GRID_POINTS
from .reporting import write_run_outputs

METHODS = ("psa-s", "psa-o", "pca", "power-pca", "logratio-pca")
LOGRATIO_KINDS = ("clr", "alr", "ilr")


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Everything a ``run`` invocation needs; the manifest echoes this."""

    method: str
    input: str | None = None
    meta: tuple[str, ...] = ()
    example: int | None = None
    seed: int = 0
    cluster_sizes: tuple[int, ...] | None = None
    sd: float = synthdata.DEFAULT_SD
    noise_sd: float = synthdata.DEFAULT_SD
    grid: int = DEFAULT_GRID_POINTS
    refine: bool = False
    exponent: float = benchmarks.DEFAULT_EXPONENT
    logratio: str = "clr"
    alr_ref: int = -1
    zero_factor: float = benchmarks.DEFAULT_ZERO_FACTOR
    replace_renormalize: bool = True
    plots: bool = True
    precision: int | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValidationError(f"unknown method {self.method!r}")
        if self.logratio not in LOGRATIO_KINDS:
            raise ValidationError(f"unknown log-ratio kind {self.logratio!r}")
        if self.input is None and self.example is None:
            raise ValidationError("either an input file or an example number "
                                  "is required")
        if self.example is not None and self.example not in (1, 2):
            raise ValidationError(f"example must be 1 or 2, got {self.example!r}")


def load_dataset(config: RunConfig) -> Dataset:
    if config.input is not None:
        try:
            return ingest_csv(config.input, config.meta)
        except OSError as exc:
            raise ParseError(f"cannot read {config.input}: {exc}") from exc
    sizes = config.cluster_sizes or synthdata.DEFAULT_CLUSTER_SIZES
    if config.example == 1:
        return synthdata.generate_example1(config.seed, sizes, config.sd)
    return synthdata.generate_example2(config.seed, sizes, config.sd,
                                       config.noise_sd)


def fit_method(config: RunConfig, dataset: Dataset):
    if config.method == "psa-s":
        return psa_s.fit(dataset)
    if config.method == "psa-o":
        return psa_o.fit(dataset, grid_points=config.grid, refine=config.refine)
    if config.method == "pca":
        transform = TransformSpec("identity")
    elif config.method == "power-pca":
        transform = TransformSpec("power", exponent=config.exponent)
    else:
        transform = TransformSpec(config.logratio,
                                  zero_factor=config.zero_factor,
                                  renormalize=config.replace_renormalize,
                                  alr_ref=config.alr_ref)
    return benchmarks.pca(dataset.values, transform)


def execute_run(config: RunConfig, outdir: str) -> dict:
    started = time.perf_counter()
    dataset = load_dataset(config)
    result = fit_method(config, dataset)
    precision = config.precision or default_precision()
    return write_run_outputs(
        result, dataset, outdir, config_dict(config), precision=precision,
        plots=config.plots, elapsed_seconds=time.perf_counter() - started)


def config_dict(config: RunConfig) -> dict:
    raw = dataclasses.asdict(config)
    raw["meta"] = list(config.meta)
    raw["cluster_sizes"] = (list(config.cluster_sizes)
                            if config.cluster_sizes is not None else None)
    return raw


def config_from_manifest(path: str, overrides: dict) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as handle:
            manifest = json.load(handle)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    stored = manifest.get("config")
    if not isinstance(stored, dict):
        raise ParseError(f"{path} has no config block")
    known = {f.name for f in dataclasses.fields(RunConfig)}
    merged = {k: v for k, v in stored.items() if k in known}
    merged.update(overrides)
    for name in ("meta", "cluster_sizes"):
        if merged.get(name) is not None:
            merged[name] = tuple(merged[name])
    try:
        return RunConfig(**merged)
    except TypeError as exc:
        raise ParseError(f"{path} config block is malformed: {exc}") from exc


def _run_overrides(args: argparse.Namespace) -> dict:
    """Only flags the user actually passed override a loaded manifest."""
    overrides = {}
    for name in ("method", "input", "example", "seed", "sd", "noise_sd",
                 "grid", "exponent", "logratio", "alr_ref", "zero_factor",
                 "precision"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    if args.meta:
        overrides["meta"] = tuple(args.meta)
    if args.cluster_sizes is not None:
        overrides["cluster_sizes"] = args.cluster_sizes
    if args.refine:
        overrides["refine"] = True
    if args.no_replace_renormalize:
        overrides["replace_renormalize"] = False
    if args.no_plots:
        overrides["plots"] = False
    return overrides


def _parse_cluster_sizes(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma separated integers, got {text!r}")
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError("cluster sizes must be positive")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subsimplex",
        description="Principal subsimplex analysis and benchmark PCA for "
                    "compositional data.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser(
        "run", help="fit one method and write scores, loadings, "
                    "approximations, figures and a manifest")
    run.add_argument("--method", choices=METHODS,
                     help="decomposition to fit (required unless "
                          "--from-manifest supplies it)")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--from-manifest", metavar="PATH",
                     help="load the configuration of a previous run; other "
                          "flags override individual fields")
    source = run.add_argument_group("input")
    source.add_argument("--input", metavar="CSV",
                        help="delimited dataset, one composition per row")
    source.add_argument("--meta", action="append", default=[], metavar="NAME",
                        help="treat this input column as text metadata "
                             "(repeatable)")
    source.add_argument("--example", type=int, choices=(1, 2),
                        help="use a built-in synthetic dataset instead of "
                             "--input")
    source.add_argument("--seed", type=int, help="seed for --example")
    source.add_argument("--cluster-sizes", type=_parse_cluster_sizes,
                        metavar="N,N,...", help="cluster sizes for --example")
    source.add_argument("--sd", type=float,
                        help="cluster spread for --example")
    source.add_argument("--noise-sd", type=float,
                        help="noise column spread for --example 2")
    tuning = run.add_argument_group("method options")
    tuning.add_argument("--grid", type=int, metavar="N",
                        help="points in the psa-o merge weight grid "
                             f"(default {DEFAULT_GRID_POINTS})")
    tuning.add_argument("--refine", action="store_true",
                        help="polish psa-o merge weights past grid resolution")
    tuning.add_argument("--exponent", type=float,
                        help="power-pca exponent "
                             f"(default {benchmarks.DEFAULT_EXPONENT})")
    tuning.add_argument("--logratio", choices=LOGRATIO_KINDS,
                        help="logratio-pca transform (default clr)")
    tuning.add_argument("--alr-ref", type=int, metavar="COL",
                        help="reference column for --logratio alr "
                             "(default last)")
    tuning.add_argument("--zero-factor", type=float,
                        help="zero replacement as a fraction of the smallest "
                             f"positive entry (default "
                             f"{benchmarks.DEFAULT_ZERO_FACTOR})")
    tuning.add_argument("--no-replace-renormalize", action="store_true",
                        help="keep rows unnormalized after zero replacement")
    output = run.add_argument_group("output")
    output.add_argument("--no-plots", action="store_true",
                        help="skip figure rendering")
    output.add_argument("--precision", type=int, metavar="DIGITS",
                        help="significant digits in delimited output "
                             "(default 17, or SUBSIMPLEX_PRECISION)")

    synth = commands.add_parser(
        "synth", help="write a synthetic example dataset as CSV")
    synth.add_argument("--example", type=int, choices=(1, 2), required=True)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--out", required=True, metavar="CSV")
    synth.add_argument("--cluster-sizes", type=_parse_cluster_sizes,
                       metavar="N,N,...")
    synth.add_argument("--sd", type=float)
    synth.add_argument("--noise-sd", type=float)
    synth.add_argument("--precision", type=int, metavar="DIGITS")
    return parser


def _command_run(args: argparse.Namespace) -> int:
    overrides = _run_overrides(args)
    if args.from_manifest is not None:
        config = config_from_manifest(args.from_manifest, overrides)
    else:
        if args.method is None:
            raise ValidationError("--method is required without --from-manifest")
        defaults = {f.name: f.default for f in dataclasses.fields(RunConfig)
                    if f.default is not dataclasses.MISSING}
        defaults.update(overrides)
        config = RunConfig(**defaults)
    manifest = execute_run(config, args.out)
    summary = manifest["results"]
    print(f"{config.method}: {summary['n_samples']} samples, "
          f"{summary['n_parts']} parts -> {args.out}")
    for name in summary["files"]:
        print(f"  {name}")
    return 0


def _command_synth(args: argparse.Namespace) -> int:
    sizes = args.cluster_sizes or synthdata.DEFAULT_CLUSTER_SIZES
    sd = args.sd if args.sd is not None else synthdata.DEFAULT_SD
    if args.example == 1:
        dataset = synthdata.generate_example1(args.seed, sizes, sd)
    else:
        noise_sd = (args.noise_sd if args.noise_sd is not None
                    else synthdata.DEFAULT_SD)
        dataset = synthdata.generate_example2(args.seed, sizes, sd, noise_sd)
    precision = args.precision or default_precision()
    write_dataset(dataset, args.out, precision)
    print(f"example {args.example}: {dataset.n_samples} samples, "
          f"{dataset.n_parts} parts -> {args.out}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _command_run(args)
        return _command_synth(args)
    except SubsimplexError as exc:
        print(f"subsimplex: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
