"""Command-line front end.

    discnorm norm     --config cfg.json [--out DIR] [--tol X]
    discnorm essnorm  --config cfg.json [--out DIR] [--tol X] [--seed N] [--preset NAME]
    discnorm verify   [--config cfg.json] [--out DIR] [--tol X]
    discnorm apply    --config cfg.json [--out DIR] [--preset NAME]

Exit codes: 0 ok, 1 a verify check failed, 2 config or domain error, 3 numeric failure
(divergence, unbounded, tolerance not reached), 4 inconclusive verdict, 130 interrupted.

Files written under --out (default ./results):

    norm.json, profile.csv (r, mean) for mixed and bergman,
        surface.csv (r, theta, value) for zygmund and bloch
    essnorm.json, ladder.csv (delta, sup_a, sup_b)
    verify.json, rungs.csv (kind, label, modulus, value, extra)
    apply.json, apply.csv (re_z, im_z, re_value, im_value, re_first, im_first,
        re_second, im_second)

Reports carry no timestamps, so identical configs give byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import math
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    ComputationCancelled,
    ConfigError,
    DivergenceError,
    DomainError,
    InconclusiveError,
    ToleranceNotReachedError,
    UnboundedError,
)
from .essnorm import TARGETS, ProxyContext, limsup_ladder
from .extremals import (
    ExtremalParams,
    pointwise_sweep,
    rung_family,
    verify_identities,
    verify_uniform_bound,
)
from .fnspec import derivative
from .grid_engine import cancel_event
from .integop import (
    PRESETS,
    OperatorSpec,
    apply_operator,
    image_first_derivative,
    image_second_derivative,
    preset,
)
from .interrupt import InterruptController
from .models import (
    INCONCLUSIVE,
    LadderConfig,
    MixedNormParams,
    QuadratureConfig,
    SamplerConfig,
    encode_complex,
)
from .norms import (
    bergman_norm_result,
    bloch_norm_result,
    mean_profile,
    mixed_norm_result,
    supremum_surface,
    zygmund_norm_result,
)
from .specs import (
    SCHEMA_VERSION,
    config_fingerprint,
    decode_complex,
    decode_function,
    decode_normal_weight,
    decode_operator,
    decode_self_map,
    decode_weight,
    dumps,
    load_document,
)
from .weights import check_normal, power

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_INCONCLUSIVE = 4
EXIT_INTERRUPTED = 130

SPACES = ("mixed", "zygmund", "bloch", "bergman")
CHECKS = ("identities", "uniform_bound", "normality", "pointwise_bound")
DEFAULT_OUT = "results"


# --- config helpers -------------------------------------------------------------------


def _read_config(path: str | None, required: bool = True) -> dict:
    if path is None:
        if required:
            raise ConfigError("This command needs --config.")
        return {"version": SCHEMA_VERSION}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"Cannot read config {path!r}: {exc}") from exc
    return load_document(text)


def _require(document: dict, key: str):
    if key not in document:
        raise ConfigError(f"The config is missing {key!r}.")
    return document[key]


def _number(document: dict, key: str, default=None) -> float:
    value = document.get(key, default)
    if value is None:
        raise ConfigError(f"The config is missing {key!r}.")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key!r} must be a number, got {value!r}.")
    return float(value)


def _dataclass_from(cls, data, **overrides):
    data = dict(data or {})
    data.update({k: v for k, v in overrides.items() if v is not None})
    names = {field.name for field in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"Unknown {cls.__name__} field(s): {', '.join(unknown)}.")
    if "deltas" in data:
        data["deltas"] = tuple(data["deltas"])
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{cls.__name__}: {exc}") from exc


def _operator(document: dict, preset_name: str | None) -> OperatorSpec:
    name = preset_name or document.get("preset")
    if name is None:
        return decode_operator(_require(document, "operator"))
    if name not in PRESETS:
        raise ConfigError(f"Unknown preset {name!r}; expected one of {', '.join(PRESETS)}.")
    phi = decode_self_map(document["phi"]) if "phi" in document else None
    g = decode_function(document["g"]) if "g" in document else None
    try:
        return preset(name, phi, g)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _write_report(out: Path, name: str, document: dict, report: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    payload = {
        "version": SCHEMA_VERSION,
        "discnorm": __version__,
        "config_fingerprint": config_fingerprint(document),
        "report": report,
    }
    (out / name).write_text(dumps(payload), encoding="utf-8")


def _write_csv(out: Path, name: str, header: Sequence[str], rows) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with (out / name).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row]
            )


def _status(failed: bool) -> str:
    return "FAIL" if failed else "pass"


# --- commands -------------------------------------------------------------------------


def cmd_norm(args: argparse.Namespace) -> int:
    document = _read_config(args.config)
    space = _require(document, "space")
    if space not in SPACES:
        raise ConfigError(f"Unknown space {space!r}; expected one of {', '.join(SPACES)}.")
    f = decode_function(_require(document, "f"))
    cfg = _dataclass_from(QuadratureConfig, document.get("quadrature"), tol=args.tol)
    out = Path(args.out)
    profile_radii = 1.0 - 2.0 ** -np.arange(cfg.radial_levels + 1, dtype=float)

    if space == "mixed":
        p, q = _number(document, "p"), _number(document, "q")
        w = decode_normal_weight(_require(document, "weight"))
        result = mixed_norm_result(f, MixedNormParams(p, q, w), cfg)
        means = mean_profile(f, q, profile_radii, cfg)
        _write_csv(out, "profile.csv", ("r", "mean"), zip(profile_radii, means))
    elif space == "bergman":
        p, alpha = _number(document, "p"), _number(document, "alpha")
        result = bergman_norm_result(f, p, alpha, cfg)
        means = mean_profile(f, p, profile_radii, cfg)
        _write_csv(out, "profile.csv", ("r", "mean"), zip(profile_radii, means))
    else:
        mu = decode_weight(_require(document, "mu"))
        order = 2 if space == "zygmund" else 1
        norm_fn = zygmund_norm_result if space == "zygmund" else bloch_norm_result
        result = norm_fn(f, mu, cfg)
        radii, angles, surface = supremum_surface(derivative(f, order)._values, mu, cfg)
        _write_csv(
            out,
            "surface.csv",
            ("r", "theta", "value"),
            (
                (r, theta, surface[i, j])
                for i, r in enumerate(radii)
                for j, theta in enumerate(angles)
            ),
        )

    print(f"{space} norm = {result.value:.12g}")
    print(f"  error estimate {result.error_estimate:.3g}, {result.evaluations} evaluations")
    _write_report(out, "norm.json", document, result.to_dict())
    return EXIT_OK


def cmd_essnorm(args: argparse.Namespace) -> int:
    document = _read_config(args.config)
    spec = _operator(document, args.preset)
    target = document.get("target", "zygmund")
    if target not in TARGETS:
        raise ConfigError(f"Unknown target {target!r}; expected one of {', '.join(TARGETS)}.")
    ctx_kwargs = {
        "mu": decode_weight(_require(document, "mu")),
        "w": decode_normal_weight(_require(document, "weight")),
        "q": _number(document, "q"),
    }
    try:
        ctx = ProxyContext(spec=spec, **ctx_kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    normality = check_normal(ctx.w)
    if not normality.passed:
        raise ConfigError("The source weight fails the normality check.")
    ladder = _dataclass_from(LadderConfig, document.get("ladder"), tol=args.tol)
    sampler = _dataclass_from(SamplerConfig, document.get("sampler"), seed=args.seed)

    report = limsup_ladder(ctx, sampler=sampler, target=target, ladder=ladder)

    second = "S_B" if target == "zygmund" else ""
    print(f"{'delta':>10}  {'S_A' if target == 'zygmund' else 'S_bloch':>14}  {second:>14}")
    for index, delta in enumerate(report.deltas):
        b_value = f"{report.sup_b[index]:14.6g}" if report.sup_b else ""
        print(f"{delta:>10g}  {report.sup_a[index]:14.6g}  {b_value:>14}")
    print(f"limsup A = {report.limsup_a:.6g}, limsup B = {report.limsup_b:.6g}")
    print(f"estimate = {report.estimate:.6g} (equivalence-class representative)")
    print(f"verdict: {report.verdict}")

    out = Path(args.out)
    _write_report(out, "essnorm.json", document, report.to_dict())
    _write_csv(
        out,
        "ladder.csv",
        ("delta", "sup_a", "sup_b"),
        (
            (delta, report.sup_a[i], report.sup_b[i] if report.sup_b else 0.0)
            for i, delta in enumerate(report.deltas)
        ),
    )
    return EXIT_INCONCLUSIVE if report.verdict == INCONCLUSIVE else EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    document = _read_config(args.config, required=False)
    checks = document.get("checks", list(CHECKS))
    unknown = sorted(set(checks) - set(CHECKS))
    if unknown:
        raise ConfigError(f"Unknown check(s): {', '.join(unknown)}.")
    if not checks:
        print("no checks selected")
        return EXIT_OK

    if "weight" in document:
        w = decode_normal_weight(document["weight"])
    else:
        w = power(0.5).as_normal(0.1, 1.0)
    p, q = _number(document, "p", 2.0), _number(document, "q", 2.0)
    tol = args.tol if args.tol is not None else _number(document, "tol", 1e-8)
    shift = _number(document, "alpha_shift", 0.0)
    n_values = [int(n) for n in document.get("n_values", [0, 1, 2, 3])]
    moduli = [float(m) for m in document.get("moduli", [0.5, 0.9, 0.99, 0.999])]
    arguments = [float(a) for a in document.get("arguments", [0.0, math.pi / 2, math.pi / 4])]
    depth = int(document.get("depth", 10))
    cfg = _dataclass_from(QuadratureConfig, document.get("quadrature"))

    results: dict = {}
    failures = 0
    csv_rows = []

    if "normality" in checks:
        report = check_normal(w)
        results["normality"] = report.to_dict()
        failures += not report.passed
        print(f"normality of {w.kind} with a={w.a:g}, b={w.b:g}: {_status(not report.passed)}")

    if "identities" in checks:
        identity_reports = []
        for n in n_values:
            for modulus in moduli:
                for argument in arguments:
                    peak = modulus * complex(math.cos(argument), math.sin(argument))
                    prm = ExtremalParams(w=peak, q=q, b=w.b, n=n, alpha_shift=shift)
                    report = verify_identities(prm, w, tol)
                    identity_reports.append(report.to_dict())
                    failures += report.violated
                    for check in report.checks:
                        print(
                            f"n={n} |w|={modulus:g} arg={argument:.4g} {check.name}: "
                            f"{_status(not check.residual <= tol)} ({check.residual:.2e})"
                        )
        results["identities"] = identity_reports

    if "uniform_bound" in checks:
        bound_reports = []
        for n in [n for n in n_values if n <= 2]:
            report = verify_uniform_bound(rung_family(q, w.b, n, depth=depth), w, p, cfg)
            bound_reports.append(report.to_dict())
            failures += report.failed
            csv_rows += [
                ("uniform_bound", f"{row.label} n={n}", row.modulus, row.value, row.extra)
                for row in report.rows
            ]
            print(
                f"uniform bound n={n}: ratio {report.ratio:.4g} "
                f"(limit {report.limit:g}): {_status(report.failed)}"
            )
        results["uniform_bound"] = bound_reports

    if "pointwise_bound" in checks:
        sweep = pointwise_sweep(p, q, w, max(1, min(n_values, default=1)), cfg)
        results["pointwise_bound"] = sweep.to_dict()
        failures += sweep.failed
        csv_rows += [
            ("pointwise_bound", row.label, row.modulus, row.value, row.extra) for row in sweep.rows
        ]
        print(
            f"pointwise bound spread {sweep.ratio:.4g} "
            f"(limit {sweep.limit:g}): {_status(sweep.failed)}"
        )

    out = Path(args.out)
    summary = {"checks": list(checks), "failures": failures, **results}
    _write_report(out, "verify.json", document, summary)
    _write_csv(out, "rungs.csv", ("kind", "label", "modulus", "value", "extra"), csv_rows)
    print("all checks passed" if failures == 0 else f"{failures} check(s) failed")
    return EXIT_OK if failures == 0 else EXIT_CHECK_FAILED


def cmd_apply(args: argparse.Namespace) -> int:
    document = _read_config(args.config)
    spec = _operator(document, args.preset)
    f = decode_function(_require(document, "f"))
    points = [decode_complex(z) for z in _require(document, "points")]
    path_points = int(document.get("path_points", 32))
    for z in points:
        if not abs(z) < 1.0:
            raise DomainError(f"Sample point {z!r} lies outside the disk.")

    rows = []
    print("  ".join(f"{title:>28}" for title in ("z", "(Cf)(z)", "(Cf)'(z)", "(Cf)''(z)")))
    for z in points:
        value = apply_operator(spec, f, z, path_points)
        first = image_first_derivative(spec, f, z)
        second = image_second_derivative(spec, f, z)
        rows.append((z, value, first, second))
        print(f"{z!s:>28}  {value!s:>28}  {first!s:>28}  {second!s:>28}")

    out = Path(args.out)
    _write_csv(
        out,
        "apply.csv",
        ("re_z", "im_z", "re_value", "im_value", "re_first", "im_first", "re_second", "im_second"),
        ([part for c in row for part in (c.real, c.imag)] for row in rows),
    )
    report = [
        {
            "z": encode_complex(z),
            "value": encode_complex(value),
            "first": encode_complex(first),
            "second": encode_complex(second),
        }
        for z, value, first, second in rows
    ]
    _write_report(out, "apply.json", document, {"points": report})
    return EXIT_OK


# --- entry point ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discnorm", description="Norms and essential-norm diagnostics on the unit disk."
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler: Callable[[argparse.Namespace], int], help_text: str):
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("--config", help="JSON config document")
        sub.add_argument("--out", default=DEFAULT_OUT, help="directory for JSON and CSV output")
        sub.set_defaults(handler=handler)
        return sub

    add("norm", cmd_norm, "compute a mixed, Zygmund, Bloch or Bergman norm").add_argument(
        "--tol", type=float, help="relative quadrature tolerance"
    )
    essnorm = add("essnorm", cmd_essnorm, "run the delta ladder and give a compactness verdict")
    essnorm.add_argument(
        "--tol", type=float, help="compactness tolerance relative to the first rung"
    )
    essnorm.add_argument("--seed", type=int, help="seed for angular sample jitter")
    essnorm.add_argument("--preset", choices=PRESETS, help="build the operator from phi and g")
    add("verify", cmd_verify, "check the extremal identities and bounds").add_argument(
        "--tol", type=float, help="identity residual tolerance"
    )
    add("apply", cmd_apply, "evaluate the operator image at sample points").add_argument(
        "--preset", choices=PRESETS, help="build the operator from phi and g"
    )
    return parser


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("tol", "seed", "preset"):
        if not hasattr(args, name):
            setattr(args, name, None)
    _configure_logging(args.verbose)

    stop = cancel_event()
    stop.clear()
    try:
        with InterruptController(on_interrupt=stop.set):
            return args.handler(args)
    except (ConfigError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DivergenceError, UnboundedError, ToleranceNotReachedError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InconclusiveError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (ComputationCancelled, KeyboardInterrupt):
        print("interrupted", file=sys.stderr)
        return EXIT_INTERRUPTED
    finally:
        stop.clear()


if __name__ == "__main__":
    raise SystemExit(main())
