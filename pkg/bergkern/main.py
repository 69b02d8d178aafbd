from bergkern.config.config import config
from bergkern.config.logging import setup_logging
from bergkern.exceptions import BergkernError
from bergkern.models.run_config import RunConfig
from bergkern.runner import EXIT_CONFIG, ExperimentRunner
from pydantic import ValidationError
from typing import Annotated, Any, Dict, List, Optional
import json
import logging
import typer

logger = logging.getLogger("bergkern.main")

app = typer.Typer(
    name="bergkern",
    help="Weighted Bergman kernels on Reinhardt domains: moments, kernel values and verification suites.",
    add_completion=False,
    no_args_is_help=True,
)

FamilyOpt = Annotated[Optional[str], typer.Option("--family", help="cn, fock, dnm, veta, ball or disc.")]
ParamsOpt = Annotated[Optional[List[str]], typer.Option("--params", help="Family parameter as key=value; repeatable.")]
WeightFileOpt = Annotated[Optional[str], typer.Option("--weight-file", help="JSON custom weight descriptor.")]
DegreeOpt = Annotated[Optional[int], typer.Option("--degree", help="Largest total degree |alpha|.")]
TolOpt = Annotated[Optional[float], typer.Option("--tol", help="Tolerance; its meaning depends on the command.")]
SeedOpt = Annotated[Optional[int], typer.Option("--seed", help="Seed for every random stream of the run.")]
PointsOpt = Annotated[Optional[str], typer.Option("--points", help="File with one point pair per line.")]
PairOpt = Annotated[Optional[List[str]], typer.Option("--pair", help="Inline point pair, 're,im' tokens; repeatable.")]
MaxDegreeOpt = Annotated[Optional[int], typer.Option("--max-degree", help="Series degree budget.")]
MomentsOpt = Annotated[Optional[str], typer.Option("--moments", help="closed_form or quadrature moments for the series.")]
OutOpt = Annotated[Optional[str], typer.Option("--out", help="Output path; stdout when omitted.")]
FormatOpt = Annotated[Optional[str], typer.Option("--format", help="json or csv.")]
ConfigOpt = Annotated[Optional[str], typer.Option("--config", help="JSON run config; wins over flags.")]


def parse_params(items: Optional[List[str]]) -> Dict[str, str]:
    params: Dict[str, str] = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise typer.BadParameter(f"expected key=value, got {item!r}", param_hint="--params")
        params[key.strip()] = value.strip()
    return params


def build_run_config(command: str, config_file: Optional[str], **flags: Any) -> RunConfig:
    """Merge flags with an optional JSON file; the file wins and each conflict is logged."""
    data: Dict[str, Any] = {k: v for k, v in flags.items() if v is not None and v != [] and v != {}}
    if config_file:
        with open(config_file, encoding="utf-8") as handle:
            file_data = json.load(handle)
        if not isinstance(file_data, dict):
            raise ValueError(f"{config_file}: expected a JSON object")
        for key, value in file_data.items():
            if key in data and data[key] != value:
                logger.warning("config file %s overrides %s: %r -> %r", config_file, key, data[key], value)
        data.update(file_data)
    data["command"] = command
    return RunConfig(**data)


def execute(command: str, config_file: Optional[str], **flags: Any) -> None:
    try:
        cfg = build_run_config(command, config_file, **flags)
        code = ExperimentRunner(cfg).run()
    except (ValidationError, BergkernError, OSError, ValueError) as exc:
        typer.echo(f"bergkern {command}: {exc}", err=True)
        raise typer.Exit(code=EXIT_CONFIG)
    raise typer.Exit(code=code)


@app.callback()
def main(
    log_level: Annotated[Optional[str], typer.Option("--log-level", help="Logging level.")] = None,
):
    setup_logging(log_level or config.LOG_LEVEL)


@app.command()
def moments(
    family: FamilyOpt = None,
    params: ParamsOpt = None,
    weight_file: WeightFileOpt = None,
    degree: DegreeOpt = None,
    tol: TolOpt = None,
    out: OutOpt = None,
    format: FormatOpt = None,
    config_file: ConfigOpt = None,
):
    """Moment table for every |alpha| <= degree, closed form and quadrature side by side."""
    execute(
        "moments", config_file, family=family, params=parse_params(params), weight_file=weight_file,
        degree=degree, tol=tol, out=out, format=format,
    )


@app.command("eval")
def evaluate(
    family: FamilyOpt = None,
    params: ParamsOpt = None,
    weight_file: WeightFileOpt = None,
    pair: PairOpt = None,
    points: PointsOpt = None,
    tol: TolOpt = None,
    max_degree: MaxDegreeOpt = None,
    moments: MomentsOpt = None,
    out: OutOpt = None,
    format: FormatOpt = None,
    config_file: ConfigOpt = None,
):
    """Kernel values per point pair: closed form, moment series and their discrepancy."""
    execute(
        "eval", config_file, family=family, params=parse_params(params), weight_file=weight_file,
        pairs=pair, points_file=points, tol=tol, max_degree=max_degree, moments=moments, out=out, format=format,
    )


@app.command()
def verify(
    family: FamilyOpt = None,
    params: ParamsOpt = None,
    weight_file: WeightFileOpt = None,
    suite: Annotated[Optional[str], typer.Option("--suite", help="Verification suite to run.")] = None,
    scheme: Annotated[Optional[str], typer.Option("--scheme", help="quadrature or mc.")] = None,
    samples: Annotated[Optional[int], typer.Option("--samples", help="Monte-Carlo sample count.")] = None,
    num_points: Annotated[Optional[int], typer.Option("--num-points", help="Random point pairs per family.")] = None,
    seed: SeedOpt = None,
    tol: TolOpt = None,
    degree: DegreeOpt = None,
    max_degree: MaxDegreeOpt = None,
    pair: PairOpt = None,
    points: PointsOpt = None,
    out: OutOpt = None,
    format: FormatOpt = None,
    config_file: ConfigOpt = None,
):
    """Run a verification suite. Exit 0 all passed, 1 any failed, 3 inconclusive."""
    execute(
        "verify", config_file, family=family, params=parse_params(params), weight_file=weight_file,
        suite=suite, scheme=scheme, samples=samples, num_points=num_points, seed=seed, tol=tol,
        degree=degree, max_degree=max_degree, pairs=pair, points_file=points, out=out, format=format,
    )


@app.command()
def compare(
    family: FamilyOpt = None,
    params: ParamsOpt = None,
    degree: DegreeOpt = None,
    tol: TolOpt = None,
    out: OutOpt = None,
    format: FormatOpt = None,
    config_file: ConfigOpt = None,
):
    """Closed-form moments against quadrature, one report per multi-index."""
    execute(
        "compare", config_file, family=family, params=parse_params(params), degree=degree, tol=tol,
        out=out, format=format,
    )


if __name__ == "__main__":
    app()
