from __future__ import annotations

import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple

from ..core.phase_space import PhaseGrid
from ..core.transition import ShiftReport

logger = logging.getLogger(__name__)

SHIFT_HEADER = ["gamma", "theta", "delta_x", "delta_p", "postselect_prob", "tail_mass"]
RATIO_COLUMN = "delta_x_over_g"


def format_number(value: float) -> str:
    """17 유효숫자 고정 (NaN → 'nan')"""
    if value is None or math.isnan(value):
        return "nan"
    return format(float(value), ".17g")


def shift_rows(reports: Iterable[ShiftReport], *, with_ratio: bool = False) -> List[List[str]]:
    rows = []
    for report in reports:
        values = [
            report.gamma,
            math.nan if report.theta is None else report.theta,
            report.delta_x,
            report.delta_p,
            report.postselect_prob,
            report.tail_mass,
        ]
        if with_ratio:
            values.append(report.delta_x_over_g)
        rows.append([format_number(v) for v in values])
    return rows


def write_shift_csv(reports: Sequence[ShiftReport], path: Path, *, with_ratio: bool = False) -> Path:
    header = SHIFT_HEADER + ([RATIO_COLUMN] if with_ratio else [])
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(shift_rows(reports, with_ratio=with_ratio))
    logger.info("💾 CSV 저장 완료 | path=%s rows=%d", path, len(reports))
    return path


def grid_payload(grid: PhaseGrid) -> Dict[str, Any]:
    return {
        "re_range": list(grid.re_range),
        "im_range": list(grid.im_range),
        "values": [[float(v) for v in row] for row in grid.values],
        "metadata": grid.metadata,
    }


def write_phase_grid(grid: PhaseGrid, stem: Path) -> Tuple[Path, Path]:
    """<stem>.csv (alpha_r, alpha_i, q) + <stem>.json (범위 + row-major 값 + 메타데이터)"""
    stem.parent.mkdir(parents=True, exist_ok=True)
    csv_path = stem.with_name(stem.name + ".csv")
    json_path = stem.with_name(stem.name + ".json")
    with csv_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["alpha_r", "alpha_i", "q"])
        for im, row in zip(grid.im_axis, grid.values):
            for re, value in zip(grid.re_axis, row):
                writer.writerow([format_number(re), format_number(im), format_number(value)])
    json_path.write_text(json.dumps(grid_payload(grid), indent=2) + "\n", encoding="utf-8")
    logger.info("💾 Q 격자 저장 완료 | csv=%s json=%s", csv_path, json_path)
    return csv_path, json_path


def gnuplot_hint(kind: str, path: Path) -> str:
    if kind == "shift-scan":
        return (
            f"set datafile separator ','; set key autotitle columnhead; "
            f"plot '{path}' using 2:($3/$1) with lines  # δx/g vs θ (σ=1, g=Γ)"
        )
    return (
        f"set datafile separator ','; set view map; set contour base; "
        f"splot '{path}' using 1:2:3 with pm3d  # Q(α), 1/(eπ) 등고선"
    )
