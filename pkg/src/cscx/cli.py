"""Command-line front end.

Every subcommand is a thin adapter over the core modules: it parses flags
into a ``RunConfig``, calls ``run_suite`` and serializes the result.  No
mathematical logic lives here.  Exit codes: 0 when every exact check
passes, 1 when a check fails (the first counterexample is serialized into
the report), 2 for invalid configuration or input.

Reports are JSON with sorted keys; the timestamp is isolated in a single
``meta.timestamp`` field so reruns diff cleanly.  ``CSCX_THREADS`` caps
block parallelism in the core modules.
"""

from __future__ import annotations

import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass
import click

from .cohomology import (
    les_check,
    mode_truncation,
    rs_cohomology,
    sample_modes,
    short_exact_splice,
    weight_truncation,
)
from .contact import contactify, standard_contact_chart
from .descent import descend_complex, rs_complex, ss_fallback, standard_pair
from .errors import ConfigError, CscxError
from .forms import form_from_json, affine_cs_chart, torus_cs_chart
from .grading import Truncation, mode_shells
from .lefschetz import standard_cs_chart, summand_dimension_table
from .rumin import contact_two_step, operator_order, rumin_complex

MODELS = ("contact-affine", "cs-affine", "torus")


@dataclass
class RunConfig:
    """Validated configuration of one pipeline run."""

    pipeline: str
    model: str = "cs-affine"
    n: int = 2
    ring: str = "poly"
    max_weight: int | None = None
    mode_norms: tuple[int, ...] = ()
    sample_count: int = 0
    out: str | None = None
    verbosity: int = 0
    modular: bool = False
    seed: int = 0

    def validate(self) -> None:
        if self.n < 2:
            raise ConfigError("n must be at least 2")
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}")
        if self.model == "torus" and self.ring != "trig":
            raise ConfigError("the torus model requires the trig ring")
        if self.model != "torus" and self.ring != "poly":
            raise ConfigError("affine models require the poly ring")
        if self.model == "torus":
            if self.max_weight is not None:
                raise ConfigError("the torus model is truncated by modes, not weight")
        else:
            if self.max_weight is None or self.max_weight < 0:
                raise ConfigError("affine truncation needs --max-weight >= 0")
        if self.sample_count < 0:
            raise ConfigError("sample count must be nonnegative")

    def truncation(self) -> Truncation:
        if self.model == "torus":
            modes = list(mode_shells(2 * self.n, set(self.mode_norms) or {0}))
            modes += sample_modes(2 * self.n, self.sample_count, seed=self.seed)
            return mode_truncation(modes)
        return weight_truncation(self.max_weight)

    def describe(self) -> dict:
        return {
            "pipeline": self.pipeline,
            "model": self.model,
            "n": self.n,
            "ring": self.ring,
            "max_weight": self.max_weight,
            "mode_norms": list(self.mode_norms),
            "sample_modes": self.sample_count,
            "modular": self.modular,
            "seed": self.seed,
        }


def run_suite(config: RunConfig) -> tuple[int, dict]:
    """Execute the configured pipeline; return (exit_code, report)."""
    config.validate()
    start = time.monotonic()
    body, passed = _PIPELINES[config.pipeline](config)
    report = {
        "config": config.describe(),
        "passed": passed,
        "result": body,
        "meta": {
            "elapsed_seconds": round(time.monotonic() - start, 3),
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        },
    }
    return (0 if passed else 1), report


def _cs_chart(config: RunConfig):
    if config.model == "torus":
        return standard_cs_chart(config.n, "torus")
    return standard_cs_chart(config.n, "affine")


def _pipeline_rumin_verify(config: RunConfig):
    cc = standard_contact_chart(config.n)
    truncation = weight_truncation(config.max_weight)
    mats = rumin_complex(cc, truncation)
    composites_zero = True
    first_failure = None
    for k in range(len(mats) - 1):
        comp = mats[k + 1].compose(mats[k])
        if not comp.is_zero():
            composites_zero = False
            entry = sorted(comp.entries.items())[0]
            first_failure = {"degree": k, "entry": [entry[0][0], entry[0][1], str(entry[1])]}
            break
    struct = contact_two_step(cc)
    orders = [operator_order(struct, k) for k in range(2 * config.n + 1)]
    expected = [2 if k == config.n else 1 for k in range(2 * config.n + 1)]
    body = {
        "ranks": [m.rank(method="modular" if config.modular else "exact") for m in mats],
        "shapes": [list(m.shape) for m in mats],
        "composites_zero": composites_zero,
        "orders": orders,
        "orders_expected": expected,
        "first_failure": first_failure,
        "block_diagonal": all(not m.off_block_entries() for m in mats),
    }
    passed = composites_zero and orders == expected and body["block_diagonal"]
    return body, passed


def _pipeline_rs_build(config: RunConfig):
    cs = _cs_chart(config)
    truncation = config.truncation()
    mats = rs_complex(cs, truncation)
    body = {
        "truncation": truncation.describe(),
        "operators": [
            {"degree": i, "matrix": m.to_json()} for i, m in enumerate(mats)
        ],
    }
    return body, True


def _pipeline_rs_crosscheck(config: RunConfig):
    pair = standard_pair(config.n)
    truncation = weight_truncation(config.max_weight)
    descended = descend_complex(pair, truncation)
    intrinsic = rs_complex(pair.cs, truncation)
    fallback = ss_fallback(pair.cs, truncation)
    agree_di = [a.entries == b.entries for a, b in zip(descended, intrinsic)]
    agree_if = [a.entries == b.entries for a, b in zip(intrinsic, fallback)]
    first_failure = None
    for k, ok in enumerate(agree_di):
        if not ok:
            first_failure = {"pair": "descended-vs-intrinsic", "degree": k}
            break
    if first_failure is None:
        for k, ok in enumerate(agree_if):
            if not ok:
                first_failure = {"pair": "intrinsic-vs-fallback", "degree": k}
                break
    body = {
        "descended_equals_intrinsic": agree_di,
        "intrinsic_equals_fallback": agree_if,
        "first_failure": first_failure,
    }
    return body, all(agree_di) and all(agree_if)


def _pipeline_cohomology(config: RunConfig):
    cs = _cs_chart(config)
    report = rs_cohomology(
        cs, config.truncation(), rank_method="modular" if config.modular else "exact"
    )
    body = report.to_json()
    # volatile fields live only under meta so reruns diff cleanly
    body.pop("timing_seconds", None)
    passed = bool(report.les["exact"]) and bool(report.les["snake_equals_wedge"])
    if config.model == "torus":
        passed = passed and report.checks.get("sampled_modes_vanish", True)
    if "weight_stable" in report.checks:
        passed = passed and report.checks["weight_stable"]
    return body, passed


def _pipeline_les(config: RunConfig):
    cs = _cs_chart(config)
    les = les_check(cs, config.truncation())
    splice = short_exact_splice(cs, config.truncation())
    body = {"les": les.to_json(), "splice": splice.to_json()}
    return body, les.exact and les.snake_equals_wedge and splice.ok


def _pipeline_lefschetz_table(config: RunConfig):
    return summand_dimension_table(config.n), True


_PIPELINES = {
    "rumin-verify": _pipeline_rumin_verify,
    "rs-build": _pipeline_rs_build,
    "rs-crosscheck": _pipeline_rs_crosscheck,
    "cohomology": _pipeline_cohomology,
    "les": _pipeline_les,
    "lefschetz-table": _pipeline_lefschetz_table,
}


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if out:
        _atomic_write(out, text + "\n")
    click.echo(text)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _finish(config: RunConfig) -> None:
    try:
        code, report = run_suite(config)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except CscxError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    _emit(report, config.out)
    sys.exit(code)


def _parse_norms(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part != "")
    except ValueError as exc:
        raise ConfigError(f"cannot parse mode list {text!r}") from exc


@click.group()
def main() -> None:
    """Exact exterior calculus on contact and conformally symplectic charts."""


@main.group()
def chart() -> None:
    """Chart configuration utilities."""


@chart.command("validate")
@click.argument("config_file", type=click.Path(exists=True, dir_okay=False))
def chart_validate(config_file: str) -> None:
    """Validate a chart configuration file."""
    try:
        with open(config_file) as handle:
            payload = json.load(handle)
        summary = validate_chart_config(payload)
    except CscxError as exc:
        click.echo(f"invalid chart: {exc}", err=True)
        sys.exit(2)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        click.echo(f"invalid chart file: {exc}", err=True)
        sys.exit(2)
    click.echo(json.dumps(summary, indent=2, sort_keys=True))
    sys.exit(0)


def validate_chart_config(payload: dict) -> dict:
    """Build and check the chart described by a configuration payload."""
    model = payload.get("model")
    n = int(payload.get("n", 0))
    ring = payload.get("ring", "poly")
    if model == "contact":
        base = affine_cs_chart(n) if ring == "poly" else torus_cs_chart(n)
        beta_payload = payload["beta"]
        if isinstance(beta_payload, list):
            beta_payload = {"degree": 1, "terms": beta_payload}
        beta = form_from_json(beta_payload, base)
        cc = contactify(n, beta, symbolic=bool(payload.get("symbolic", False)))
        from .coefficients import coefficient_to_json
        from .contact import volume_coefficient

        return {
            "model": "contact",
            "n": n,
            "ring": ring,
            "coords": list(cc.chart.coords),
            "volume_coefficient": coefficient_to_json(volume_coefficient(cc)),
            "valid": True,
        }
    if model in ("cs", "cs-affine", "torus"):
        kind = "torus" if model == "torus" else "affine"
        cs = standard_cs_chart(n, kind)
        return {
            "model": model,
            "n": n,
            "ring": cs.chart.ring.kind,
            "coords": list(cs.chart.coords),
            "valid": True,
        }
    raise ConfigError(f"unknown chart model {model!r}")


@main.group()
def lefschetz() -> None:
    """Fiberwise decomposition tables."""


@lefschetz.command("table")
@click.option("--n", "n", type=int, default=2, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def lefschetz_table(n: int, fmt: str, out: str | None) -> None:
    """Dimension table of all primitive summands for every exterior power."""
    config = RunConfig(pipeline="lefschetz-table", model="cs-affine", n=n, max_weight=0)
    try:
        code, report = run_suite(config)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    if fmt == "csv":
        lines = ["k,total_dim,primitive_dim,summands"]
        for row in report["result"]["table"]:
            summands = ";".join(
                f"{s['primitive_degree']}:{s['twist_step']}:{s['dim']}"
                for s in row["summands"]
            )
            lines.append(
                f"{row['k']},{row['total_dim']},{row['primitive_dim']},{summands}"
            )
        text = "\n".join(lines)
        if out:
            _atomic_write(out, text + "\n")
        click.echo(text)
        sys.exit(code)
    _emit(report, out)
    sys.exit(code)


@main.group()
def rumin() -> None:
    """The complex on the contact chart."""


@rumin.command("verify")
@click.option("--n", "n", type=int, default=2, show_default=True)
@click.option("--max-weight", type=int, default=6, show_default=True)
@click.option("--modular", is_flag=True, default=False)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def rumin_verify(n: int, max_weight: int, modular: bool, out: str | None) -> None:
    """Verify the complex property, grading and operator orders."""
    _finish(
        RunConfig(
            pipeline="rumin-verify",
            model="contact-affine",
            n=n,
            max_weight=max_weight,
            modular=modular,
            out=out,
        )
    )


@main.group()
def rs() -> None:
    """The intrinsic complex on the quotient chart."""


@rs.command("build")
@click.option("--model", type=click.Choice(["affine", "torus"]), default="torus")
@click.option("--n", "n", type=int, default=2, show_default=True)
@click.option("--max-weight", type=int, default=None)
@click.option("--modes", default="0", show_default=True, help="Comma-separated sup-norm shells.")
@click.option("--sample-modes", type=int, default=0)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def rs_build(model, n, max_weight, modes, sample_modes, out) -> None:
    """Serialize the operator matrices of the intrinsic complex."""
    torus = model == "torus"
    _finish(
        RunConfig(
            pipeline="rs-build",
            model="torus" if torus else "cs-affine",
            ring="trig" if torus else "poly",
            n=n,
            max_weight=max_weight if not torus else None,
            mode_norms=_parse_norms(modes) if torus else (),
            sample_count=sample_modes,
            out=out,
        )
    )


@rs.command("crosscheck")
@click.option("--n", "n", type=int, default=2, show_default=True)
@click.option("--max-weight", type=int, default=5, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def rs_crosscheck(n: int, max_weight: int, out: str | None) -> None:
    """Verify the three-way operator equality on the affine model."""
    _finish(
        RunConfig(
            pipeline="rs-crosscheck",
            model="cs-affine",
            n=n,
            max_weight=max_weight,
            out=out,
        )
    )


@main.command("cohomology")
@click.option("--model", type=click.Choice(["affine", "torus"]), required=True)
@click.option("--n", "n", type=int, default=2, show_default=True)
@click.option("--max-weight", type=int, default=None)
@click.option("--modes", default="0", show_default=True, help="Comma-separated sup-norm shells.")
@click.option("--sample-modes", type=int, default=3, show_default=True)
@click.option("--modular", is_flag=True, default=False)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
              help="Also write the dimension table as CSV.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cohomology_cmd(model, n, max_weight, modes, sample_modes, modular, seed, csv_path, out) -> None:
    """Cohomology report with the long-exact-sequence verification."""
    torus = model == "torus"
    config = RunConfig(
        pipeline="cohomology",
        model="torus" if torus else "cs-affine",
        ring="trig" if torus else "poly",
        n=n,
        max_weight=max_weight if not torus else None,
        mode_norms=_parse_norms(modes) if torus else (),
        sample_count=sample_modes if torus else 0,
        modular=modular,
        seed=seed,
        out=out,
    )
    try:
        code, report = run_suite(config)
    except (ConfigError, CscxError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    if csv_path:
        dims = report["result"]["dims"]
        lines = ["degree," + ",".join(sorted(dims))]
        length = max(len(v) for v in dims.values())
        for k in range(length):
            row = [str(k)]
            for key in sorted(dims):
                row.append(str(dims[key][k]) if k < len(dims[key]) else "")
            lines.append(",".join(row))
        _atomic_write(csv_path, "\n".join(lines) + "\n")
    _emit(report, config.out)
    sys.exit(code)


@main.command("les")
@click.option("--model", type=click.Choice(["affine", "torus"]), required=True)
@click.option("--n", "n", type=int, default=2, show_default=True)
@click.option("--max-weight", type=int, default=None)
@click.option("--modes", default="0", show_default=True)
@click.option("--sample-modes", type=int, default=0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def les_cmd(model, n, max_weight, modes, sample_modes, seed, out) -> None:
    """Verify the long exact sequence and the degreewise splice."""
    torus = model == "torus"
    _finish(
        RunConfig(
            pipeline="les",
            model="torus" if torus else "cs-affine",
            ring="trig" if torus else "poly",
            n=n,
            max_weight=max_weight if not torus else None,
            mode_norms=_parse_norms(modes) if torus else (),
            sample_count=sample_modes if torus else 0,
            seed=seed,
            out=out,
        )
    )


if __name__ == "__main__":
    main()
