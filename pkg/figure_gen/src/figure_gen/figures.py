"""Rendering: one figure per metric, one mean line and one sd band per series."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")  # headless, deterministic raster backend

import matplotlib.pyplot as plt  # noqa: E402 - backend must be set first
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from ._version import __version__  # noqa: E402
from .summary import METRICS, SchemaError, list_series, load_summary, series_label  # noqa: E402

# Fixed output geometry and metadata keep repeated renders byte-identical.
_FIGSIZE = (7.0, 4.5)
_DPI = 150
_PNG_METADATA = {"Software": f"figure-gen {__version__}"}


@dataclass(frozen=True)
class FigureSpec:
    """One figure to render.

    ``series_filter`` entries match a policy name or an explicit
    ``policy:alpha`` pair; an empty filter keeps every series.
    """

    input_path: str
    metric: str
    output_path: str
    series_filter: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(
                f"metric must be one of {sorted(METRICS)}, got {self.metric!r}"
            )


@dataclass(frozen=True)
class RenderReport:
    """What a render produced: the drawn series and any omitted ones."""

    output_path: str
    metric: str
    series: Tuple[Tuple[str, str], ...]
    omitted: Tuple[Tuple[str, str], ...] = ()
    note: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "output_path": self.output_path,
            "metric": self.metric,
            "series": [list(s) for s in self.series],
            "omitted": [list(s) for s in self.omitted],
            "note": self.note,
        }


def _matches(policy: str, alpha: str, series_filter: Tuple[str, ...]) -> bool:
    if not series_filter:
        return True
    return any(f == policy or f == f"{policy}:{alpha}" for f in series_filter)


def render(spec: FigureSpec) -> RenderReport:
    """Render one metric figure; read-only over the input file.

    Series whose metric column holds no values (policies without that
    estimator) are left off the figure, with a note stating so.
    """
    frame = load_summary(spec.input_path)
    mean_col, sd_col, axis_label = METRICS[spec.metric]

    drawn = []
    omitted = []
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    try:
        for policy, alpha in list_series(frame):
            if not _matches(policy, alpha, spec.series_filter):
                continue
            rows = frame[(frame["policy"] == policy) & (frame["alpha"] == alpha)]
            rows = rows.sort_values("t")
            mean = rows[mean_col].to_numpy(dtype=float)
            if np.isnan(mean).all():
                omitted.append((policy, alpha))
                continue
            sd = rows[sd_col].to_numpy(dtype=float)
            sd = np.where(np.isnan(sd), 0.0, sd)
            t = rows["t"].to_numpy()
            label = series_label(policy, alpha)
            (line,) = ax.plot(t, mean, label=label, linewidth=1.4)
            ax.fill_between(t, mean - sd, mean + sd, color=line.get_color(), alpha=0.2, linewidth=0)
            drawn.append((policy, alpha))

        if not drawn:
            raise SchemaError(
                f"no series with {spec.metric!r} values match the filter {spec.series_filter!r}"
            )

        note = None
        if omitted:
            names = ", ".join(series_label(p, a) for p, a in omitted)
            note = f"omitted (no {spec.metric} values): {names}"
            fig.text(0.01, 0.01, note, fontsize=7, color="dimgray")

        ax.set_xlabel("t")
        ax.set_ylabel(axis_label)
        ax.legend(fontsize=8)
        fig.tight_layout()
        out = Path(spec.output_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out, dpi=_DPI, metadata=_PNG_METADATA)
    finally:
        plt.close(fig)
    return RenderReport(
        output_path=str(spec.output_path),
        metric=spec.metric,
        series=tuple(drawn),
        omitted=tuple(omitted),
        note=note,
    )


def render_all(
    input_dir,
    output_dir,
    metrics: Optional[Sequence[str]] = None,
    series_filter: Sequence[str] = (),
) -> Dict[str, RenderReport]:
    """Render every requested metric from ``input_dir/summary.csv``.

    Writes ``figures_manifest.json`` beside the images, pinning the tool
    versions the byte-level determinism guarantee is conditioned on.
    """
    wanted = list(METRICS) if metrics is None else list(metrics)
    summary_path = Path(input_dir) / "summary.csv"
    out_dir = Path(output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    reports: Dict[str, RenderReport] = {}
    for metric in wanted:
        spec = FigureSpec(
            input_path=str(summary_path),
            metric=metric,
            output_path=str(out_dir / f"{metric}.png"),
            series_filter=tuple(series_filter),
        )
        reports[metric] = render(spec)
    manifest = {
        "input": str(summary_path),
        "tool_versions": {
            "figure-gen": __version__,
            "matplotlib": matplotlib.__version__,
            "pandas": pd.__version__,
            "numpy": np.__version__,
        },
        "figures": {metric: report.to_dict() for metric, report in reports.items()},
    }
    (out_dir / "figures_manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return reports
