"""CSV and manifest emission for simulation results.

Every numeric field is written with 6 significant digits and rows follow
the canonical (scenario, run, period) order, so identical inputs give
byte-identical files. Summary statistics are computed from the actions as
written to ``panel.csv``; re-reading the panel and applying the metrics
with the manifest's ``a_star`` reproduces ``summary.csv`` exactly.
"""

from __future__ import annotations

import csv
import json
import math
import shutil
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .benchmark import build_fixture
from .engine import RunRecord, ScenarioConfig, format_memory
from .metrics import ScenarioSummary, summarize

EMIT_CHOICES = ("panel", "summary", "series", "fixtures")
DEFAULT_EMIT = ("panel", "summary", "series")

PANEL_COLUMNS = ("scenario_id", "delta", "m", "lambda_frac", "sigma_frac", "r", "t", "phi",
                 "target_action", "accepted", "action", "theta", "outcome", "estimate", "mode",
                 "u_p", "u_a")
SUMMARY_COLUMNS = ("scenario_id", "delta", "m", "lambda_frac", "sigma_frac", "runs", "T", "a_star",
                   "mean_normalized_action_T", "ci99_halfwidth", "excess_probability",
                   "average_excess")
SERIES_COLUMNS = ("scenario_id", "t", "d_t")


class IncompleteResultsError(RuntimeError):
    """Results do not cover every scenario and run named in the manifest."""


def fmt(value: float) -> str:
    if value is None:
        return ""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.6g}"


def rounded(value: float) -> float:
    """The value a reader of the CSV files sees."""
    return float(fmt(value))


@dataclass
class RunManifest:
    config_path: str | None
    scenarios: list[ScenarioConfig]
    master_seed: int
    output_dir: Path
    emit: tuple[str, ...] = DEFAULT_EMIT
    partial: bool = False
    complete: bool = True
    missing: list[str] = field(default_factory=list)

    def __post_init__(self):
        unknown = set(self.emit) - set(EMIT_CHOICES)
        if unknown:
            raise ValueError(f"unknown emit target(s) {sorted(unknown)}; choose from {EMIT_CHOICES}")

    def to_json(self) -> dict:
        first = self.scenarios[0] if self.scenarios else ScenarioConfig()
        bench = first.benchmark
        return {
            "version": __version__,
            "config_path": self.config_path,
            "output_dir": str(self.output_dir),
            "master_seed": self.master_seed,
            "emit": list(self.emit),
            "runs": first.R,
            "T": first.T,
            "actor": {"rho": first.actor.rho, "eta": first.actor.eta,
                      "reservation_utility": first.actor.reservation_utility},
            "mu": first.mu,
            "literal_threshold": first.literal_threshold,
            "candidate_premium": first.candidate_premium,
            "benchmark": {"a_star": bench.a_star, "phi_star": bench.phi_star,
                          "x_star": bench.x_star},
            "scenarios": [c.scenario_id for c in self.scenarios],
            "complete": self.complete,
            "missing": self.missing,
        }


def _axis_fields(cfg: ScenarioConfig) -> list[str]:
    return [cfg.scenario_id, fmt(cfg.delta), format_memory(cfg.m), fmt(cfg.local_fraction),
            fmt(cfg.sigma_fraction)]


def panel_rows(cfg: ScenarioConfig, panel: list[RunRecord]):
    head = _axis_fields(cfg)
    for run in panel:
        for p in run.periods:
            yield head + [str(run.r), str(p.t), fmt(p.premium), fmt(p.target_action),
                          str(int(p.accepted)), fmt(p.action), fmt(p.theta), fmt(p.outcome),
                          fmt(p.estimate), str(p.mode), fmt(p.u_p), fmt(p.u_a)]


def emitted_actions(panel: list[RunRecord]) -> np.ndarray:
    return np.array([[rounded(p.action) for p in run.periods] for run in panel])


def summary_row(cfg: ScenarioConfig, s: ScenarioSummary) -> list[str]:
    return _axis_fields(cfg) + [str(s.runs), str(s.periods), fmt(cfg.benchmark.a_star),
                                fmt(s.mean_normalized_action_T), fmt(s.ci99_halfwidth),
                                fmt(s.excess_probability), fmt(s.average_excess)]


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def emit_outputs(manifest: RunManifest, results) -> list[Path]:
    """Write the requested files for ``results``, an iterable of ``(config, panel)``.

    Files are staged and only moved into the output directory once every
    scenario of the manifest has been seen with its full set of runs. With
    ``manifest.partial`` whatever finished is written and the manifest lists
    the missing scenarios; a failure while producing results is re-raised
    after emission.
    """
    out = Path(manifest.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    stage = Path(tempfile.mkdtemp(prefix=".staging-", dir=out))
    emit = set(manifest.emit)
    expected = {c.scenario_id: c for c in manifest.scenarios}
    done: list[str] = []
    failure: BaseException | None = None
    try:
        with open(stage / "panel.csv", "w", newline="") as fp, \
                open(stage / "summary.csv", "w", newline="") as fs, \
                open(stage / "distance_series.csv", "w", newline="") as fd:
            wp, ws, wd = _writer(fp), _writer(fs), _writer(fd)
            wp.writerow(PANEL_COLUMNS)
            ws.writerow(SUMMARY_COLUMNS)
            wd.writerow(SERIES_COLUMNS)
            try:
                for cfg, panel in results:
                    sid = cfg.scenario_id
                    if sid not in expected or sid in done:
                        raise IncompleteResultsError(f"unexpected scenario {sid}")
                    if len(panel) != cfg.R or any(len(run.periods) != cfg.T for run in panel):
                        raise IncompleteResultsError(f"scenario {sid} has incomplete runs")
                    if "panel" in emit:
                        wp.writerows(panel_rows(cfg, panel))
                    summary = summarize(emitted_actions(panel), cfg.benchmark.a_star, sid)
                    ws.writerow(summary_row(cfg, summary))
                    wd.writerows([sid, str(t), fmt(d)]
                                 for t, d in enumerate(summary.distance_series, start=1))
                    done.append(sid)
            except Exception as exc:  # noqa: BLE001 - decided below
                if not manifest.partial:
                    raise
                failure = exc

        manifest.missing = [sid for sid in expected if sid not in done]
        manifest.complete = not manifest.missing
        if not manifest.complete and not manifest.partial:
            raise IncompleteResultsError(
                f"{len(manifest.missing)} scenario(s) missing; pass --partial to emit anyway")

        names = {"panel": "panel.csv", "summary": "summary.csv", "series": "distance_series.csv"}
        written = []
        for key, name in names.items():
            if key in emit:
                shutil.move(str(stage / name), out / name)
                written.append(out / name)
        if "fixtures" in emit:
            params = manifest.scenarios[0].actor if manifest.scenarios else ScenarioConfig().actor
            path = out / "benchmark_fixture.json"
            path.write_text(json.dumps(build_fixture(params), indent=2, sort_keys=True) + "\n")
            written.append(path)
        path = out / "manifest.json"
        path.write_text(json.dumps(manifest.to_json(), indent=2) + "\n")
        written.append(path)
    finally:
        shutil.rmtree(stage, ignore_errors=True)
    if failure is not None:
        raise failure
    return written


def read_panel_actions(path: str | Path) -> dict[str, np.ndarray]:
    """Action matrices (runs x periods) per scenario, parsed back from ``panel.csv``."""
    rows: dict[str, dict[int, dict[int, float]]] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            runs = rows.setdefault(row["scenario_id"], {})
            runs.setdefault(int(row["r"]), {})[int(row["t"])] = float(row["action"])
    return {sid: np.array([[periods[t] for t in sorted(periods)] for _, periods in sorted(runs.items())])
            for sid, runs in rows.items()}
