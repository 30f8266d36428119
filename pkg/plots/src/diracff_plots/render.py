"""Render the four-panel component-ratio figure from a runner CSV.

The input contract is the `ratio_profile.csv` written by the diracff runner:
a header row with exactly the columns in EXPECTED_COLUMNS, one row per grid
point.  Panels: (a) real and (b) imaginary parts of the first-component
ratios, (c) real and (d) imaginary parts of the second-component ratios,
each overlaying the unperturbed (solid) and transported (dashed) curves
against x.  Successful transport shows up as horizontal dashed lines.

Rendering is deterministic: Agg backend, fixed figure geometry, fixed
metadata, no timestamps; the same CSV yields byte-identical PNG payloads.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

EXPECTED_COLUMNS = [
    "x",
    "ratio_unperturbed_1_re",
    "ratio_unperturbed_1_im",
    "ratio_ff_1_re",
    "ratio_ff_1_im",
    "ratio_unperturbed_2_re",
    "ratio_unperturbed_2_im",
    "ratio_ff_2_re",
    "ratio_ff_2_im",
]

_PANELS = (
    ("(a)", 1, "re"),
    ("(b)", 1, "im"),
    ("(c)", 2, "re"),
    ("(d)", 2, "im"),
)


class SchemaError(ValueError):
    """The CSV does not conform to the runner's column contract."""


@dataclass(frozen=True)
class PanelSpec:
    """One panel of the 2x2 layout; all four read from a single run CSV."""

    csv_path: Path
    component: int
    part: str  # "re" | "im"

    def __post_init__(self) -> None:
        if self.component not in (1, 2):
            raise SchemaError(f"component must be 1 or 2, got {self.component}")
        if self.part not in ("re", "im"):
            raise SchemaError(f"part must be 're' or 'im', got {self.part}")

    @property
    def unperturbed_column(self) -> str:
        return f"ratio_unperturbed_{self.component}_{self.part}"

    @property
    def ff_column(self) -> str:
        return f"ratio_ff_{self.component}_{self.part}"


def load_ratio_profile(csv_path: str | Path) -> dict[str, np.ndarray]:
    """Read and validate a runner ratio CSV into named float arrays."""
    path = Path(csv_path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(
                f"{path} is empty; expected header {','.join(EXPECTED_COLUMNS)}"
            ) from None
        if header != EXPECTED_COLUMNS:
            raise SchemaError(
                f"{path} has columns {','.join(header)}; "
                f"expected {','.join(EXPECTED_COLUMNS)}"
            )
        rows = [row for row in reader if row]
    if not rows:
        raise SchemaError(f"{path} has a header but no data rows")
    try:
        table = np.array(rows, dtype=float)
    except ValueError as exc:
        raise SchemaError(f"{path} has a non-numeric cell: {exc}") from None
    if table.shape[1] != len(EXPECTED_COLUMNS):
        raise SchemaError(
            f"{path} rows have {table.shape[1]} cells, "
            f"expected {len(EXPECTED_COLUMNS)}"
        )
    return {name: table[:, i] for i, name in enumerate(EXPECTED_COLUMNS)}


def read_window_from_summary(summary_path: str | Path) -> tuple[float, float] | None:
    import json

    payload = json.loads(Path(summary_path).read_text(encoding="utf-8"))
    window = payload.get("window")
    if window is None:
        return None
    return float(window[0]), float(window[1])


def render_figure(
    csv_path: str | Path,
    out_path: str | Path,
    window: tuple[float, float] | None = None,
) -> Path:
    """Write the 2x2 panel figure for one run; returns the output path."""
    data = load_ratio_profile(csv_path)
    x = data["x"]
    if window is not None:
        lo, hi = window
        mask = (x >= lo) & (x <= hi)
        if not np.any(mask):
            raise SchemaError(f"window [{lo}, {hi}] contains no samples")
        data = {name: col[mask] for name, col in data.items()}
        x = data["x"]

    fig, axes = plt.subplots(2, 2, figsize=(9.0, 6.0), dpi=150, sharex=True)
    for ax, (label, component, part) in zip(axes.ravel(), _PANELS):
        spec = PanelSpec(Path(csv_path), component, part)
        ax.plot(
            x,
            data[spec.unperturbed_column],
            linestyle="-",
            color="C0",
            linewidth=1.2,
            label="unperturbed",
        )
        ax.plot(
            x,
            data[spec.ff_column],
            linestyle="--",
            color="C1",
            linewidth=1.4,
            label="fast-forwarded",
        )
        part_name = "Re" if part == "re" else "Im"
        ax.set_title(f"{label} {part_name} component-{component} ratio", fontsize=10)
        ax.tick_params(labelsize=8)
        if label == "(a)":
            ax.legend(fontsize=8, loc="upper right")
    for ax in axes[1]:
        ax.set_xlabel("x")
    fig.tight_layout()

    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format="png", metadata={"Software": "diracff-plots"})
    plt.close(fig)
    return out
