"""CSV reports and the movement cost sweep.

Reports are plain CSV with fixed column orders (see `const`). Floats are
written in shortest round-trip form, so rerunning an experiment with the
same seeds reproduces the metric files byte for byte. Wall-clock times go
to their own file for that reason.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Final

import numpy as np
import pandas as pd

from .const import (
    CDF_COLUMNS,
    EPISODE_COLUMNS,
    STEP_COLUMNS,
    SWEEP_COLUMNS,
    SWEEP_EPISODES,
    TIMING_COLUMNS,
)
from .engine import EvaluationReport, empirical_cdf, evaluate
from .models.config import ExperimentConfig
from .models.metrics import EpisodeReport
from .policies import Policy

_LOGGER: Final = logging.getLogger(__name__)

STEPS_FILE: Final[str] = "steps.csv"
EPISODES_FILE: Final[str] = "episodes.csv"
CDF_FILE: Final[str] = "cdf.csv"
TIMING_FILE: Final[str] = "timing.csv"
CURVES_FILE: Final[str] = "curves.csv"
SWEEP_FILE: Final[str] = "sweep.csv"
SWEEP_SUMMARY_FILE: Final[str] = "sweep_summary.csv"


def step_frame(reports: Iterable[EpisodeReport]) -> pd.DataFrame:
    """One row per (episode, step, server type)."""
    rows = [
        (
            report.episode,
            step.step,
            metrics.type_id,
            metrics.o1,
            metrics.o2_total,
            metrics.o3_total,
            metrics.o4_total,
            metrics.utility,
            metrics.g2_violations,
            metrics.g3_violations,
            metrics.redundancy_slack_total,
        )
        for report in reports
        for step in report.steps
        for metrics in step.per_type
    ]
    return pd.DataFrame(rows, columns=list(STEP_COLUMNS))


def episode_frame(reports: Iterable[EpisodeReport]) -> pd.DataFrame:
    """One row per episode with its totals."""
    rows = [
        (report.episode, report.seed, report.total_utility)
        + tuple(report.total(name) for name in EPISODE_COLUMNS[3:])
        for report in reports
    ]
    return pd.DataFrame(rows, columns=list(EPISODE_COLUMNS))


def timing_frame(reports: Iterable[EpisodeReport]) -> pd.DataFrame:
    rows = [(report.episode, report.seed, report.wall_clock_s) for report in reports]
    return pd.DataFrame(rows, columns=list(TIMING_COLUMNS))


def _write(frame: pd.DataFrame, path: Path) -> Path:
    frame.to_csv(path, index=False, lineterminator="\n")
    _LOGGER.debug("Wrote %d rows to %s", len(frame), path)
    return path


def emit_metrics(
    report: EvaluationReport | Sequence[EpisodeReport], out_dir: str | Path
) -> dict[str, Path]:
    """Write the per-step, per-episode, CDF and timing files.

    Args:
        report: Evaluation result or episode reports.
        out_dir: Directory to write to; created if missing.

    Returns:
        Path of every written file, by file name.

    Raises:
        ValueError: If there are no episodes.
        OSError: If the directory cannot be written.
    """
    episodes = list(
        report.episodes if isinstance(report, EvaluationReport) else report
    )
    if not episodes:
        raise ValueError("Cannot emit metrics of an empty report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    totals = [episode.total_utility for episode in episodes]
    written = {
        STEPS_FILE: _write(step_frame(episodes), out / STEPS_FILE),
        EPISODES_FILE: _write(episode_frame(episodes), out / EPISODES_FILE),
        CDF_FILE: _write(empirical_cdf(totals)[list(CDF_COLUMNS)], out / CDF_FILE),
        TIMING_FILE: _write(timing_frame(episodes), out / TIMING_FILE),
    }
    _LOGGER.info("Wrote metrics of %d episodes to %s", len(episodes), out)
    return written


def write_curves(curves: pd.DataFrame, out_dir: str | Path) -> Path:
    """Write training curves to curves.csv in out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return _write(curves, out / CURVES_FILE)


@dataclass
class SweepReport:
    """Per-episode results of a movement cost sweep.

    Attributes:
        frame: One row per (movement cost, episode), SWEEP_COLUMNS order.
    """

    frame: pd.DataFrame

    def summary(self) -> pd.DataFrame:
        """Median of every metric per movement cost."""
        return (
            self.frame.drop(columns=["episode", "seed"])
            .groupby("movement_cost", sort=False)
            .median()
            .reset_index()
        )

    def movements_non_increasing(self) -> bool:
        """Whether median servers moved never grows with the movement cost."""
        summary = self.summary().sort_values("movement_cost")
        return bool(np.all(np.diff(summary["servers_moved"].to_numpy()) <= 0))

    def write(self, out_dir: str | Path) -> dict[str, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        return {
            SWEEP_FILE: _write(self.frame, out / SWEEP_FILE),
            SWEEP_SUMMARY_FILE: _write(self.summary(), out / SWEEP_SUMMARY_FILE),
        }


def sweep_movement_cost(
    values: Sequence[int],
    policy: Policy,
    config: ExperimentConfig,
    episodes: int = SWEEP_EPISODES,
    seeds: Sequence[int] | None = None,
) -> SweepReport:
    """Evaluate a policy under several server movement costs.

    Every value reuses the same seeds, so the runs differ only by the
    movement cost.

    Args:
        values: Movement costs to try.
        policy: Policy to evaluate.
        config: Base configuration; only the movement cost changes.
        episodes: Episodes per value.
        seeds: Episode seeds; defaults to the configured seed + i.

    Raises:
        ValueError: If values is empty.
    """
    if not values:
        raise ValueError("The sweep needs at least one movement cost")
    rows = []
    for cost in values:
        variant = replace(config, region=replace(config.region, movement_cost=cost))
        result = evaluate(policy, variant, episodes, seeds)
        for report in result.episodes:
            rows.append(
                (cost, report.episode, report.seed, report.total_utility)
                + tuple(report.total(name) for name in SWEEP_COLUMNS[4:])
            )
    sweep = SweepReport(pd.DataFrame(rows, columns=list(SWEEP_COLUMNS)))
    if not sweep.movements_non_increasing():
        _LOGGER.warning(
            "Median servers moved by %s does not decrease with the movement cost",
            policy.name,
        )
    return sweep
