"""Reproduction runs for the built-in examples.

Each run measures the per-channel gains and the certification thresholds
of one example and compares them against the reference values shipped in
``reference_values.json``.  The CLI's ``repro`` subcommand prints these
rows; the acceptance tests assert on them, so both always agree.
"""

import json
from dataclasses import dataclass, field
from importlib import resources

from .models import get_system
from .sdp import SolverOptions
from .smallgain import certify, certify_n3, certify_thm2
from .sweep import bisect_threshold

_EXAMPLE_ALIASES = {
    "1": "multistable4",
    "example1": "multistable4",
    "multistable4": "multistable4",
    "thomas4": "thomas4",
    "thomas3": "thomas3",
}


def reference_values() -> dict:
    """The bundled reference thresholds/gains fixture."""
    text = resources.files("sg2c").joinpath("reference_values.json").read_text()
    return json.loads(text)


@dataclass
class ReproRow:
    label: str
    measured: float | str
    target: float | str
    tolerance: float | None
    ok: bool


@dataclass
class ReproReport:
    example: str
    rows: list = field(default_factory=list)
    # every (CertificationReport, PolytopicModel) pair produced on the way,
    # for downstream certificate re-verification
    reports: list = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        return all(r.ok for r in self.rows)


def canonical_example_name(name: str) -> str:
    key = name.strip().lower()
    if key not in _EXAMPLE_ALIASES:
        raise ValueError(f"unknown example {name!r}; "
                         f"use 1, multistable4, thomas4 or thomas3")
    return _EXAMPLE_ALIASES[key]


def _expected_gain(entry: dict, param: float) -> float:
    form, coeff = entry["form"], entry["coeff"]
    if form == "constant":
        return coeff
    if form == "linear":
        return coeff * param
    if form == "inverse":
        return coeff / param
    raise ValueError(f"unknown gain form {form!r}")


def _gain_rows(out: ReproReport, sys, ref: dict) -> None:
    checks = ref.get("gain_checks")
    if not checks:
        return
    symbol = ref["parameter_symbol"]
    tol = checks["tolerance"]
    for param in checks["params"]:
        model = sys.hull(param)
        if sys.name == "thomas3":
            report = certify_n3(model)
        else:
            report = certify_thm2(model)
        out.reports.append((report, model))
        for channel in ("gamma1", "gamma2"):
            if channel not in checks or channel not in report.gains:
                continue
            measured = report.gains[channel].value
            target = _expected_gain(checks[channel], param)
            out.rows.append(ReproRow(
                label=f"{channel}({symbol}={param:g})",
                measured=measured, target=target, tolerance=tol,
                ok=abs(measured - target) <= tol))


def _threshold_rows(out: ReproReport, sys, ref: dict,
                    options: SolverOptions | None) -> None:
    symbol = ref["parameter_symbol"]
    for method, entry in ref.get("thresholds", {}).items():
        result = bisect_threshold(sys, method, entry["range"],
                                  options=options)
        out.reports.extend(
            (rep, sys.hull(p, route="direct" if method == "direct"
                           else "modular"))
            for p, rep in zip(result.parameter_grid, result.reports))
        measured = result.threshold
        out.rows.append(ReproRow(
            label=f"{method} threshold {symbol}*",
            measured=measured, target=entry["target"],
            tolerance=entry["tolerance"],
            ok=abs(measured - entry["target"]) <= entry["tolerance"]))


def _direct_grid_rows(out: ReproReport, sys, ref: dict,
                      options: SolverOptions | None) -> None:
    grid = ref.get("direct_grid")
    if not grid:
        return
    symbol = ref["parameter_symbol"]
    verdicts = []
    for param in grid["params"]:
        model = sys.hull(param, route="direct")
        report = certify(model, "direct", options=options)
        out.reports.append((report, model))
        verdicts.append(report.verdict)
    want = grid["expected_verdict"]
    n_ok = sum(v == want for v in verdicts)
    out.rows.append(ReproRow(
        label=f"direct verdict grid {symbol} in "
              f"[{grid['params'][0]:g}, {grid['params'][-1]:g}]",
        measured=f"{n_ok}/{len(verdicts)} {want}",
        target=f"{len(verdicts)}/{len(verdicts)} {want}",
        tolerance=None, ok=n_ok == len(verdicts)))


def repro_example(name: str,
                  options: SolverOptions | None = None) -> ReproReport:
    """Run the full measurement pipeline for one example."""
    example = canonical_example_name(name)
    ref = reference_values()["examples"][example]
    sys = get_system(example)
    out = ReproReport(example=example)
    _gain_rows(out, sys, ref)
    _threshold_rows(out, sys, ref, options)
    _direct_grid_rows(out, sys, ref, options)
    return out


def format_table(report: ReproReport) -> str:
    """Fixed-width comparison table for terminal output."""
    lines = [f"example: {report.example}",
             f"{'check':38s} {'measured':>14s} {'target':>14s} "
             f"{'tol':>8s} {'ok':>4s}"]
    for r in report.rows:
        measured = (f"{r.measured:.6f}" if isinstance(r.measured, float)
                    else str(r.measured))
        target = (f"{r.target:.6f}" if isinstance(r.target, float)
                  else str(r.target))
        tol = "-" if r.tolerance is None else f"{r.tolerance:g}"
        lines.append(f"{r.label:38s} {measured:>14s} {target:>14s} "
                     f"{tol:>8s} {'yes' if r.ok else 'NO':>4s}")
    agree = sum(r.ok for r in report.rows)
    lines.append(f"{agree}/{len(report.rows)} checks within tolerance")
    return "\n".join(lines)
