import argparse
import logging
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from jinja2 import Template
from pydantic import ConfigDict, Field

from diffeo_certifier import __version__
from diffeo_certifier.certify import CertifyOptions, Certifier, DiffeoReport, DiffeoVerdict
from diffeo_certifier.common import FrozenModel, Rational, logger, parse_rational, settings
from diffeo_certifier.exceptions import InputError, InternalError, SweepRangeError, UsageError
from diffeo_certifier.mapfile import MapFile
from diffeo_certifier.polynomial_parser import PARAMETER_NAME
from diffeo_certifier.weighting import get_weighting

SCHEMA_VERSION = 1
LOG_FORMAT = "%(asctime)s %(levelname)s %(filename)s %(lineno)d - %(message)s"

_SWEEP_RANGE = re.compile(r"^([A-Za-z][A-Za-z0-9_]*)=(.+)\.\.(.+)$")


class InputEcho(FrozenModel):
    source: Optional[str] = None
    name: Optional[str] = None
    dimension: int
    components: Tuple[str, ...]
    resolved: Tuple[str, ...]


class ReportDocument(FrozenModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(default=SCHEMA_VERSION, alias="schema")
    tool_version: str = __version__
    input: InputEcho
    parameters: Dict[str, Rational] = {}
    options: CertifyOptions
    seed: int
    report: DiffeoReport
    elapsed_seconds: Optional[float] = None

    @property
    def exit_code(self) -> int:
        return self.report.verdict.exit_code

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2) + "\n"


class SweepEntry(FrozenModel):
    value: Rational
    verdict: DiffeoVerdict


class SweepDocument(FrozenModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(default=SCHEMA_VERSION, alias="schema")
    tool_version: str = __version__
    parameter: str
    reports: Tuple[ReportDocument, ...] = ()
    summary: Tuple[SweepEntry, ...] = ()

    @property
    def exit_code(self) -> int:
        return max((r.exit_code for r in self.reports), default=0)

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2) + "\n"


class SweepRange(FrozenModel):
    name: str
    start: Rational
    stop: Rational
    step: Rational

    @classmethod
    def parse(cls, tokens: Sequence[str]) -> "SweepRange":
        """From ``["t=-2..2", "step", "1/2"]``."""
        if len(tokens) != 3 or tokens[1] != "step":
            raise SweepRangeError("expected --sweep NAME=A..B step S")
        match = _SWEEP_RANGE.match(tokens[0])
        if not match:
            raise SweepRangeError(f"cannot read sweep range {tokens[0]!r}")
        try:
            start, stop, step = (parse_rational(v) for v in (match.group(2), match.group(3), tokens[2]))
        except (TypeError, ValueError) as e:
            raise SweepRangeError(str(e)) from e
        if step <= 0:
            raise SweepRangeError(f"sweep step must be positive, got {tokens[2]}")
        return cls(name=match.group(1), start=start, stop=stop, step=step)

    def values(self) -> List[Fraction]:
        out = []
        value = self.start
        while value <= self.stop:
            out.append(value)
            value += self.step
        return out


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits with 2, which is the Unknown verdict code
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="diffeo-certify",
        description="Certify or refute that a polynomial map F: R^n -> R^n is a global "
        "C^1-diffeomorphism. Exit codes: 0 Diffeomorphism, 1 NotDiffeomorphism, 2 Unknown.",
    )
    parser.add_argument("mapfile", help="map file (line format or .yaml)")
    parser.add_argument(
        "--set", dest="bindings", action="append", default=[], metavar="NAME=RATIONAL",
        help="bind a parameter; repeatable",
    )
    parser.add_argument(
        "--sweep", nargs=3, metavar=("NAME=A..B", "step", "S"),
        help="certify once per value A, A+S, ... <= B",
    )
    parser.add_argument("--transforms", action="store_true", help="search linear transforms when coercivity is undecided")
    parser.add_argument("--transform-bound", type=int, default=None, metavar="K", help="entries of A^-1 in -K..K")
    parser.add_argument("--weights", default=None, help="weight strategy: default or proportional")
    parser.add_argument("--assert-nonvanishing", action="store_true", help="take det JF != 0 for granted when undecided")
    parser.add_argument("--samples", type=int, default=None, metavar="N", help="uniform sample points for det JF")
    parser.add_argument("--seed", type=int, default=None, help="sampling seed")
    parser.add_argument("--out", default=None, metavar="PATH", help="write the report here instead of stdout")
    parser.add_argument("--format", choices=("json", "text"), default="json")
    parser.add_argument("--jobs", type=int, default=1, metavar="N", help="parallel sweep workers")
    parser.add_argument("--timing", action="store_true", help="record elapsed seconds in the report")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def parse_bindings(items: Sequence[str]) -> Dict[str, Fraction]:
    bindings: Dict[str, Fraction] = {}
    for item in items:
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or not PARAMETER_NAME.match(name):
            raise UsageError(f"--set expects NAME=RATIONAL, got {item!r}")
        try:
            bindings[name] = parse_rational(value)
        except (TypeError, ValueError) as e:
            raise UsageError(f"--set {name}: {e}") from e
    return bindings


def options_from_args(args: argparse.Namespace) -> CertifyOptions:
    for flag, value, least in (
        ("--samples", args.samples, 0),
        ("--transform-bound", args.transform_bound, 1),
        ("--jobs", args.jobs, 1),
    ):
        if value is not None and value < least:
            raise UsageError(f"{flag} must be at least {least}, got {value}")
    sampling = settings.sampling
    overrides = {}
    if args.samples is not None:
        overrides["uniform_points"] = args.samples
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        sampling = sampling.model_copy(update=overrides)
    fields = dict(
        transforms=args.transforms,
        assert_nonvanishing=args.assert_nonvanishing,
        sampling=sampling,
    )
    if args.transform_bound is not None:
        fields["transform_bound"] = args.transform_bound
    if args.weights is not None:
        get_weighting(args.weights)
        fields["weights"] = args.weights
    return CertifyOptions(**fields)


def run(
    mapfile: MapFile,
    bindings: Dict[str, Fraction],
    options: CertifyOptions,
    timing: bool = False,
) -> ReportDocument:
    """Certify one fully bound map file."""
    started = time.perf_counter()
    F = mapfile.resolve(bindings)
    report = Certifier(options)(F)
    return ReportDocument(
        input=InputEcho(
            source=mapfile.source,
            name=mapfile.name,
            dimension=mapfile.dimension,
            components=mapfile.components,
            resolved=mapfile.resolved_components(bindings),
        ),
        parameters=mapfile.bindings(bindings),
        options=options,
        seed=options.sampling.seed,
        report=report,
        elapsed_seconds=round(time.perf_counter() - started, 6) if timing else None,
    )


def _run_packed(packed) -> ReportDocument:
    return run(*packed)


def sweep(
    mapfile: MapFile,
    sweep_range: SweepRange,
    bindings: Dict[str, Fraction],
    options: CertifyOptions,
    timing: bool = False,
    jobs: int = 1,
) -> SweepDocument:
    values = sweep_range.values()
    work = [
        (mapfile, {**bindings, sweep_range.name: value}, options, timing) for value in values
    ]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            reports = list(executor.map(_run_packed, work))
    else:
        reports = [_run_packed(packed) for packed in work]
    for value, report in zip(values, reports):
        logger.info(f"{sweep_range.name} = {value}: {report.report.verdict.value}")
    return SweepDocument(
        parameter=sweep_range.name,
        reports=tuple(reports),
        summary=tuple(
            SweepEntry(value=value, verdict=report.report.verdict)
            for value, report in zip(values, reports)
        ),
    )


def render_text(document) -> str:
    if isinstance(document, SweepDocument):
        path = settings.template_paths.sweep
    else:
        path = settings.template_paths.report
    template = Template(Path(path).read_text(encoding="utf-8"), keep_trailing_newline=True)
    return template.render(doc=document)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(
            level=max(logging.WARNING - 10 * args.verbose, logging.DEBUG),
            format=LOG_FORMAT,
            stream=sys.stderr,
        )
        mapfile = MapFile.load(args.mapfile)
        bindings = parse_bindings(args.bindings)
        options = options_from_args(args)
        if args.sweep:
            document = sweep(
                mapfile,
                SweepRange.parse(args.sweep),
                bindings,
                options,
                timing=args.timing,
                jobs=args.jobs,
            )
        else:
            document = run(mapfile, bindings, options, timing=args.timing)
        text = document.to_json() if args.format == "json" else render_text(document)
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return document.exit_code
    except (InputError, InternalError) as e:
        print(f"diffeo-certify: {e}", file=sys.stderr)
        return e.exit_code
