"""Build publication-style figures from simulation CSV files.

Four figure kinds, one per CSV schema the scheduler CLI emits:

- training_curves: training_log.csv (epoch, avg_step_reward,
  validation_reward, ...). Several logs overlay, labeled by file stem.
- utilization: utilization.csv (t, dc, used_gpus, r_max, utilization),
  one panel per data center.
- comparison_bars: comparison.csv or several summary.csv files
  (scenario plus the pooled metrics), always exactly four panels.
- dc_status: events.csv (t, step, dc, event_kind, job_id, ...),
  cumulative event counts per data center.

Rendering is deterministic for fixed inputs and never mutates them.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

plt.rcParams["svg.hashsalt"] = "geosched-plots"

KINDS = ("training_curves", "utilization", "comparison_bars", "dc_status")

# scenario display order; the trained ones are optional in the inputs
SCENARIO_ORDER = ("local", "price_greedy", "carbon_greedy", "madqn", "masac")
OPTIONAL_SCENARIOS = ("madqn", "masac")

COMPARISON_PANELS = (
    ("utility_usd", "Cumulative reward (USD)"),
    ("gpu_hours", "GPU hours"),
    ("cost_efficiency_usd_per_gpu_hour", "Cost efficiency (USD per GPU hour)"),
    ("carbon_efficiency_g_per_gpu_hour", "Carbon efficiency (gCO2 per GPU hour)"),
)

STATUS_EVENT_KINDS = ("start", "finish", "fail", "migrate", "retrieve", "deliver")


class PlotDataError(ValueError):
    """Input CSV is unusable: missing, empty, or lacking a column."""


def load_table(path) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise PlotDataError(f"no such file: {path}")
    try:
        frame = pd.read_csv(path)
    except pd.errors.EmptyDataError:
        raise PlotDataError(f"{path} is empty") from None
    if frame.empty:
        raise PlotDataError(f"{path} has a header but no data rows")
    return frame


def require_columns(frame: pd.DataFrame, columns, path) -> None:
    for column in columns:
        if column not in frame.columns:
            raise PlotDataError(f"missing column {column!r} in {path}")


def _single_input(paths, kind: str):
    if len(paths) != 1:
        raise PlotDataError(f"{kind} takes exactly one CSV, got {len(paths)}")
    return paths[0]


def _training_curves(paths):
    fig, (ax_step, ax_val) = plt.subplots(1, 2, figsize=(10, 4))
    for path in paths:
        frame = load_table(path)
        require_columns(
            frame, ("epoch", "avg_step_reward", "validation_reward"), path)
        label = Path(path).stem
        ax_step.plot(frame["epoch"], frame["avg_step_reward"], label=label)
        ax_val.plot(frame["epoch"], frame["validation_reward"], label=label)
    ax_step.set_title("Average step reward")
    ax_val.set_title("Validation episode reward")
    for ax in (ax_step, ax_val):
        ax.set_xlabel("epoch")
        ax.set_ylabel("reward (USD)")
        ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
    fig.tight_layout()
    return fig, []


def _utilization(paths):
    path = _single_input(paths, "utilization")
    frame = load_table(path)
    require_columns(frame, ("t", "dc", "utilization"), path)
    dcs = sorted(frame["dc"].unique())
    fig, axes = plt.subplots(
        len(dcs), 1, figsize=(9, 1.8 * len(dcs)), sharex=True, squeeze=False)
    for ax, dc in zip(axes[:, 0], dcs):
        part = frame[frame["dc"] == dc]
        ax.step(part["t"] / 60.0, part["utilization"], where="post", lw=0.9)
        ax.set_ylim(-0.05, 1.05)
        ax.set_ylabel(f"DC {dc}")
        ax.grid(alpha=0.3)
    axes[-1, 0].set_xlabel("hours")
    fig.suptitle("GPU utilization per data center")
    fig.tight_layout()
    return fig, []


def _comparison_bars(paths):
    frames = []
    for path in paths:
        frame = load_table(path)
        require_columns(
            frame, ("scenario",) + tuple(col for col, _ in COMPARISON_PANELS),
            path)
        frames.append(frame)
    table = pd.concat(frames, ignore_index=True)
    table = table.drop_duplicates(subset="scenario", keep="first")
    present = list(table["scenario"])
    ordered = [s for s in SCENARIO_ORDER if s in present]
    ordered += [s for s in present if s not in SCENARIO_ORDER]
    notes = [
        f"scenario {name!r} absent from inputs; skipped"
        for name in OPTIONAL_SCENARIOS if name not in present
    ]
    table = table.set_index("scenario").loc[ordered]
    fig, axes = plt.subplots(2, 2, figsize=(10, 7))
    for ax, (column, title) in zip(axes.ravel(), COMPARISON_PANELS):
        ax.bar(range(len(ordered)), table[column], color="tab:blue", width=0.6)
        ax.set_xticks(range(len(ordered)))
        ax.set_xticklabels(ordered, rotation=30, ha="right", fontsize=8)
        ax.set_title(title)
        ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    return fig, notes


def _dc_status(paths):
    path = _single_input(paths, "dc_status")
    frame = load_table(path)
    require_columns(frame, ("t", "dc", "event_kind"), path)
    events = frame[frame["event_kind"].isin(STATUS_EVENT_KINDS)]
    dcs = sorted(frame["dc"].unique())
    t_end = float(frame["t"].max())
    fig, axes = plt.subplots(
        len(dcs), 1, figsize=(9, 2.2 * len(dcs)), sharex=True, squeeze=False)
    for ax, dc in zip(axes[:, 0], dcs):
        part = events[events["dc"] == dc]
        for kind in STATUS_EVENT_KINDS:
            times = part[part["event_kind"] == kind]["t"].sort_values()
            if times.empty:
                continue
            ax.step(
                [0.0, *times, t_end],
                [0, *range(1, len(times) + 1), len(times)],
                where="post", label=kind, lw=1.0,
            )
        ax.set_ylabel(f"DC {dc}")
        ax.legend(fontsize=7, ncol=3)
        ax.grid(alpha=0.3)
    axes[-1, 0].set_xlabel("minute")
    fig.suptitle("Cumulative scheduling events per data center")
    fig.tight_layout()
    return fig, []


_BUILDERS = {
    "training_curves": _training_curves,
    "utilization": _utilization,
    "comparison_bars": _comparison_bars,
    "dc_status": _dc_status,
}


def build_figure(kind: str, paths):
    """Figure plus a list of informational notes (skipped scenarios)."""
    if kind not in _BUILDERS:
        raise PlotDataError(f"unknown figure kind {kind!r}; choose from {KINDS}")
    return _BUILDERS[kind](list(paths))


def render(kind: str, paths, out) -> list:
    """Build and write one figure; overwrites out if it exists."""
    fig, notes = build_figure(kind, paths)
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        fig.savefig(out, dpi=120)
    finally:
        plt.close(fig)
    return notes
