"""Command-line interface: verification batteries, pointwise brackets, and
toric dossiers.

Three subcommands share a common configuration (seed, sample count, tolerance
overrides, output format):

``verify MODEL... | all``
    Runs each model's expected-fact battery plus the symplectization checks
    (cone closure, nondegeneracy, homogeneity, scale covariance, lifts and
    induced Hamiltonians of every closed-form pair, commuting lifts) and
    reports one line per check, sorted by label.  Exit 0 iff everything
    passes.

``bracket CHART ETA F G POINT``
    Evaluates the bracket {f, g} induced by the 1-form ETA at POINT, along
    with the defining-system residuals of the two Hamiltonian fields.  The
    chart is a comma-separated coordinate list, the 1-form uses
    ``coeff*dx + coeff*dy + ...`` syntax, and POINT is a comma-separated
    number list.

``ypq P Q`` / ``ypq --enumerate P_MAX``
    Prints the full dossier (plus sampled level-set checks) of one toric
    member, or the equivalence-class table of every member with p <= P_MAX.

Exit codes: 0 success, 1 check failure, 2 usage or parse error, 3 geometric
precondition failure, 4 invalid toric parameters.  All output is
deterministic for a fixed command line: the same flags give byte-identical
output.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .charts import Chart, DifferentialForm, one_form
from .contact import (
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    TOLERANCES,
    CheckResult,
    ContactSystem,
    GeometricError,
    hamiltonian_field,
    jacobi_bracket,
)
from .cone import (
    build_cone,
    closure_check,
    commuting_lift_check,
    cone_hamiltonian,
    homogeneity_check,
    lift,
    lift_checks,
    nondegeneracy_check,
    scale_covariance_check,
)
from .expressions import ExprError, ScalarExpr
from .models import ModelDescriptor, build_model, default_model_keys
from .ypq import (
    InvalidToricParameterError,
    YpqParams,
    circle_pairing_check,
    enumerate_structures,
    format_class_table,
    format_dossier,
    homogeneous_coordinate_check,
    is_free,
    reeb_positivity,
    ypq_report,
)

__all__ = [
    "RunConfig",
    "UsageError",
    "EXIT_OK",
    "EXIT_CHECK_FAILURE",
    "EXIT_USAGE",
    "EXIT_GEOMETRY",
    "EXIT_TORIC",
    "model_battery",
    "parse_one_form",
    "main",
]

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_USAGE = 2
EXIT_GEOMETRY = 3
EXIT_TORIC = 4

_SCALE_FACTOR = 2.0


class UsageError(Exception):
    """A malformed command line, config file, or expression."""


@dataclass(frozen=True)
class RunConfig:
    """Shared run parameters resolved from defaults, config file, and flags."""

    seed: int = DEFAULT_SEED
    samples: int = DEFAULT_SAMPLES
    tolerances: dict[str, float] = field(default_factory=dict)
    output: str = "text"

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError(f"samples must be at least 1, got {self.samples}")
        if self.output not in ("text", "records"):
            raise ValueError(f"output must be 'text' or 'records', got {self.output!r}")
        for name, value in self.tolerances.items():
            if name not in TOLERANCES:
                known = ", ".join(sorted(TOLERANCES))
                raise ValueError(f"unknown tolerance {name!r}; known names: {known}")
            if not value > 0.0:
                raise ValueError(f"tolerance {name} must be positive, got {value}")

    @property
    def overrides(self) -> Mapping[str, float] | None:
        return self.tolerances or None


# -- configuration resolution ----------------------------------------------


def _parse_tolerance_item(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    name = name.strip()
    if not sep or not name:
        raise UsageError(f"tolerance override must be NAME=VALUE, got {text!r}")
    try:
        return name, float(value)
    except ValueError:
        raise UsageError(f"tolerance value for {name!r} is not a number: {value!r}") from None


def parse_config_file(path: str) -> dict:
    """Flat ``key = value`` lines mirroring the command-line flags.

    Recognized keys: ``seed``, ``samples``, ``format``, and ``tol.NAME``.
    Blank lines and ``#`` comments are skipped.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    values: dict = {"tolerances": {}}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        try:
            if key == "seed":
                values["seed"] = int(value)
            elif key == "samples":
                values["samples"] = int(value)
            elif key == "format":
                if value not in ("text", "records"):
                    raise UsageError(f"{path}:{lineno}: format must be text or records")
                values["format"] = value
            elif key.startswith("tol."):
                values["tolerances"][key[4:]] = float(value)
            else:
                raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
    return values


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, overridden by the config file, overridden by flags."""
    file_values = parse_config_file(args.config) if args.config else {"tolerances": {}}
    tolerances = dict(file_values["tolerances"])
    for item in args.tol or ():
        name, value = _parse_tolerance_item(item)
        tolerances[name] = value
    seed = args.seed if args.seed is not None else file_values.get("seed", DEFAULT_SEED)
    samples = (
        args.samples if args.samples is not None else file_values.get("samples", DEFAULT_SAMPLES)
    )
    output = args.format if args.format is not None else file_values.get("format", "text")
    try:
        return RunConfig(seed=seed, samples=samples, tolerances=tolerances, output=output)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- expression and 1-form parsing -----------------------------------------


def _normalize(text: str) -> str:
    """ASCII-normalize user input (the unicode minus sign in particular)."""
    return text.replace("−", "-").strip()


def _split_terms(source: str) -> list[tuple[int, str]]:
    """Split an additive expression at top-level signs: [(sign, term), ...]."""
    terms: list[tuple[int, str]] = []
    sign, start, depth = 1, 0, 0
    for i, ch in enumerate(source):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > start:
            terms.append((sign, source[start:i].strip()))
            sign, start = (1 if ch == "+" else -1), i + 1
        elif ch in "+-" and depth == 0 and i == start:
            # leading sign of this term
            if ch == "-":
                sign = -sign
            start = i + 1
    terms.append((sign, source[start:].strip()))
    return terms


def parse_one_form(chart: Chart, source: str) -> DifferentialForm:
    """Parse ``coeff*dx + coeff*dy + ...`` into a 1-form on ``chart``.

    Each additive term must end in a differential ``d<coord>``, optionally
    preceded by ``coefficient *``; a bare ``d<coord>`` has coefficient 1.
    """
    text = "".join(_normalize(source).split())
    if not text:
        raise UsageError("empty 1-form")
    coefficients: dict[str, ScalarExpr] = {}
    for sign, term in _split_terms(text):
        if not term:
            raise UsageError(f"empty term in 1-form {source!r}")
        name = None
        coeff_source = None
        for coord in chart.coords:
            token = "d" + coord
            if term == token:
                name, coeff_source = coord, "1"
                break
            if term.endswith("*" + token):
                name, coeff_source = coord, term[: -len(token) - 1]
                break
        if name is None:
            raise UsageError(
                f"term {term!r} does not end in a differential of {chart.coords}"
            )
        signed = f"-({coeff_source})" if sign < 0 else coeff_source
        try:
            expr = chart.parse(signed)
        except ExprError as exc:
            raise UsageError(f"bad coefficient in term {term!r}: {exc}") from None
        if name in coefficients:
            coefficients[name] = coefficients[name] + expr
        else:
            coefficients[name] = expr
    return one_form(chart, coefficients)


def _parse_chart(argument: str) -> Chart:
    names = tuple(part.strip() for part in _normalize(argument).split(","))
    if any(not name for name in names):
        raise UsageError(f"bad chart argument {argument!r}: expected comma-separated names")
    for name in names:
        if name.startswith("d"):
            raise UsageError(
                f"coordinate {name!r} starts with 'd', which is reserved for differentials"
            )
    try:
        return Chart("cli", names)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad chart argument {argument!r}: {exc}") from None


def _parse_point(argument: str, dim: int) -> tuple[float, ...]:
    parts = _normalize(argument).split(",")
    try:
        values = tuple(float(part) for part in parts)
    except ValueError:
        raise UsageError(f"bad point argument {argument!r}: expected comma-separated numbers") from None
    if len(values) != dim:
        raise UsageError(f"point {argument!r} has {len(values)} coordinates, chart has {dim}")
    return values


def _parse_scalar(chart: Chart, source: str, what: str) -> ScalarExpr:
    try:
        return chart.parse(_normalize(source))
    except ExprError as exc:
        raise UsageError(f"bad {what} expression {source!r}: {exc}") from None


# -- report rendering ------------------------------------------------------


def _check_line(label: str, result: CheckResult) -> str:
    status = "PASS" if result.passed else "FAIL"
    line = (
        f"  {status}  {label:<44}  residual {result.max_residual:.6e}"
        f"  tol {result.tolerance:.6e}  samples {result.samples}"
    )
    if not result.passed and result.witness is not None:
        witness = ", ".join(f"{v:.6g}" for v in result.witness)
        line += f"\n        witness ({witness})"
    return line


def _emit_record(stream, record: dict) -> None:
    stream.write(json.dumps(record, sort_keys=True) + "\n")


# -- verify ----------------------------------------------------------------


def model_battery(model: ModelDescriptor, config: RunConfig) -> list[tuple[str, CheckResult]]:
    """Every check of one model, labelled and sorted.

    The battery is the model's expected facts plus the symplectization
    contracts: cone closure/nondegeneracy/homogeneity, scale covariance at a
    fixed factor, and -- for every closed-form (field, Hamiltonian) pair --
    the lift invariances and the induced-Hamiltonian contraction, with the
    commuting family checked jointly.  Checks from per-pair constructions are
    disambiguated as ``name[hamiltonian]``.
    """
    overrides = config.overrides
    samples, seed = config.samples, config.seed
    entries = [(fact.name, fact.run(samples, seed)) for fact in model.expected]
    cone = build_cone(model.system, verify=False)
    entries.append(("cone_closure", closure_check(cone, samples, seed, overrides)))
    entries.append(("cone_nondegeneracy", nondegeneracy_check(cone, samples, seed, overrides)))
    entries.append(("cone_homogeneity", homogeneity_check(cone, samples, seed, overrides)))
    entries.append(
        (
            "scale_covariance",
            scale_covariance_check(model.system, _SCALE_FACTOR, samples, seed, overrides),
        )
    )
    for vector, hamiltonian in model.hamiltonian_pairs:
        suffix = str(hamiltonian)
        lifted = lift(
            cone, vector, hamiltonian, samples=samples, seed=seed, tolerances=overrides,
            verify=False,
        )
        for result in lift_checks(cone, lifted, samples, seed, overrides):
            entries.append((f"{result.name}[{suffix}]", result))
        _, contraction = cone_hamiltonian(cone, vector, hamiltonian, samples, seed, overrides)
        entries.append((f"{contraction.name}[{suffix}]", contraction))
    if model.commuting_pairs:
        entries.append(
            (
                "commuting_lifts",
                commuting_lift_check(cone, model.commuting_pairs, samples, seed, overrides),
            )
        )
    entries.sort(key=lambda entry: entry[0])
    return entries


def cmd_verify(model_keys: Sequence[str], config: RunConfig, stream) -> int:
    requested: list[str] = []
    for key in model_keys:
        expanded = default_model_keys() if key == "all" else (key,)
        for item in expanded:
            if item not in requested:
                requested.append(item)
    try:
        selected = [build_model(key) for key in requested]
    except ValueError as exc:
        stream.write(f"error: {exc}\n")
        return EXIT_USAGE
    total = failed = 0
    for model in selected:
        entries = model_battery(model, config)
        total += len(entries)
        failed += sum(1 for _, result in entries if not result.passed)
        if config.output == "text":
            stream.write(f"model {model.key}\n")
            for label, result in entries:
                stream.write(_check_line(label, result) + "\n")
            if model.report_lines is not None:
                for line in model.report_lines():
                    stream.write(line + "\n")
        else:
            for label, result in entries:
                _emit_record(
                    stream,
                    {"kind": "check", "model": model.key, "label": label, **result.to_record()},
                )
            if model.report_lines is not None:
                for line in model.report_lines():
                    _emit_record(stream, {"kind": "note", "model": model.key, "text": line})
    if config.output == "text":
        stream.write(f"summary: {total} checks, {total - failed} passed, {failed} failed\n")
    else:
        _emit_record(
            stream,
            {"kind": "summary", "checks": total, "passed": total - failed, "failed": failed},
        )
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILURE


# -- bracket ---------------------------------------------------------------


def cmd_bracket(args: argparse.Namespace, config: RunConfig, stream) -> int:
    chart = _parse_chart(args.chart)
    eta = parse_one_form(chart, args.eta)
    f = _parse_scalar(chart, args.f, "f")
    g = _parse_scalar(chart, args.g, "g")
    point = _parse_point(args.point, chart.dim)
    system = ContactSystem(chart, eta, verify=False)
    try:
        value = jacobi_bracket(system, f, g).at(point)
        residuals = {
            "f": hamiltonian_field(system, f).residuals([point]),
            "g": hamiltonian_field(system, g).residuals([point]),
        }
    except GeometricError as exc:
        stream.write(f"error: contact condition fails: {exc}\n")
        return EXIT_GEOMETRY
    point_text = ", ".join(f"{v:g}" for v in point)
    if config.output == "text":
        stream.write(f"{{f, g}}({point_text}) = {value:.12g}\n")
        for tag in sorted(residuals):
            parts = "  ".join(
                f"{name} {residuals[tag][name]:.6e}" for name in sorted(residuals[tag])
            )
            stream.write(f"defining_residuals[{tag}]  {parts}\n")
    else:
        _emit_record(
            stream,
            {
                "kind": "bracket",
                "f": str(f),
                "g": str(g),
                "point": list(point),
                "value": value,
            },
        )
        for tag in sorted(residuals):
            _emit_record(
                stream,
                {"kind": "residuals", "function": tag, **residuals[tag]},
            )
    return EXIT_OK


# -- ypq -------------------------------------------------------------------


def cmd_ypq(args: argparse.Namespace, config: RunConfig, stream) -> int:
    if args.enumerate_max is not None:
        if args.params:
            raise UsageError("give either P Q or --enumerate P_MAX, not both")
        classes = enumerate_structures(args.enumerate_max)
        if config.output == "text":
            stream.write(format_class_table(classes) + "\n")
        else:
            for p in sorted(classes):
                members = classes[p]
                _emit_record(
                    stream,
                    {
                        "kind": "ypq_class",
                        "p": p,
                        "class_size": len(members),
                        "members": [[r.params.p, r.params.q] for r in members],
                    },
                )
        return EXIT_OK
    if len(args.params) != 2:
        raise UsageError("expected two parameters P Q (or --enumerate P_MAX)")
    params = YpqParams(*args.params)
    free, explanation = is_free(params)
    if not free:
        if config.output == "text":
            stream.write(explanation + "\n")
        else:
            _emit_record(stream, {"kind": "error", "message": explanation})
        return EXIT_TORIC
    report = ypq_report(params)
    checks = [
        circle_pairing_check(params, config.samples, config.seed, config.overrides),
        reeb_positivity(params, config.samples, config.seed),
    ]
    if params.p % 2 == 1:
        checks.append(homogeneous_coordinate_check(params))
    checks.sort(key=lambda result: result.name)
    failed = sum(1 for result in checks if not result.passed)
    if config.output == "text":
        stream.write(format_dossier(report) + "\n")
        for result in checks:
            stream.write(_check_line(result.name, result) + "\n")
    else:
        _emit_record(stream, {"kind": "ypq_report", **report.to_record()})
        for result in checks:
            _emit_record(stream, {"kind": "check", "label": result.name, **result.to_record()})
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILURE


# -- entry point -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="base RNG seed")
    common.add_argument("--samples", type=int, default=None, help="sample count per check")
    common.add_argument(
        "--tol",
        action="append",
        metavar="NAME=VALUE",
        default=None,
        help="tolerance override (repeatable)",
    )
    common.add_argument(
        "--format", choices=("text", "records"), default=None, help="output format"
    )
    common.add_argument("--config", default=None, help="flat key = value config file")
    parser = argparse.ArgumentParser(
        prog="contactkit",
        description="Verification batteries, pointwise brackets, and toric dossiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    verify = sub.add_parser("verify", parents=[common], help="run model check batteries")
    verify.add_argument("models", nargs="+", help="model keys, or 'all'")
    bracket = sub.add_parser(
        "bracket", parents=[common], help="evaluate a bracket at a point"
    )
    bracket.add_argument("chart", help="comma-separated coordinate names, e.g. x,y,z")
    bracket.add_argument("eta", help="1-form, e.g. 'dz - y*dx'")
    bracket.add_argument("f", help="first function")
    bracket.add_argument("g", help="second function")
    bracket.add_argument("point", help="comma-separated coordinates, e.g. 1,2,3")
    ypq = sub.add_parser("ypq", parents=[common], help="toric dossiers")
    ypq.add_argument("params", nargs="*", type=int, help="the two parameters P Q")
    ypq.add_argument(
        "--enumerate",
        dest="enumerate_max",
        type=int,
        default=None,
        metavar="P_MAX",
        help="list equivalence classes up to P_MAX",
    )
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    stream = sys.stdout
    try:
        config = resolve_config(args)
        if args.command == "verify":
            return cmd_verify(args.models, config, stream)
        if args.command == "bracket":
            return cmd_bracket(args, config, stream)
        return cmd_ypq(args, config, stream)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidToricParameterError as exc:
        stream.write(f"error: {exc}\n")
        return EXIT_TORIC
    except GeometricError as exc:
        stream.write(f"error: {exc}\n")
        return EXIT_GEOMETRY


if __name__ == "__main__":
    raise SystemExit(main())
