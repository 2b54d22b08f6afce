# src/utils/reporting.py
import json
import math
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
import pandas as pd
from jinja2 import Environment, FileSystemLoader

from ..config import get_settings
from ..constants import MAX_POLYLINE_POINTS
from ..models import Trajectory

TEMPLATE_DIR = Path(__file__).resolve().parent.parent / "templates"

_env = Environment(loader=FileSystemLoader(TEMPLATE_DIR), autoescape=True, keep_trailing_newline=True)

def write_frame_csv(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=get_settings().CSV_FLOAT_FORMAT, lineterminator="\n")
    return path

def write_trajectory_csv(trajectory: Trajectory, path: Path) -> Path:
    """One row per sample, header t,q1,q2,u1,u2,v,alpha."""
    return write_frame_csv(trajectory.to_frame(), path)

def termination_payload(trajectory: Trajectory) -> Dict[str, Any]:
    term = trajectory.termination
    return {"kind": term.kind.value, "t": term.t, "q1": term.q1, "samples": len(trajectory)}

def write_json_report(path: Path, **sections: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(sections, indent=2) + "\n", encoding="utf-8")
    return path

def _ticks(lo: float, hi: float, count: int = 5) -> List[float]:
    return np.linspace(lo, hi, count).tolist()

def render_trajectory_svg(trajectory: Trajectory, path: Path, title: str, q1_max: float,
                          width: int = 720, height: int = 400) -> Path:
    """Static line chart of q1(t) and q2(t)."""
    margin = {"left": 60, "right": 20, "top": 40, "bottom": 50}
    plot_w = width - margin["left"] - margin["right"]
    plot_h = height - margin["top"] - margin["bottom"]

    times, q1, q2 = trajectory.times, trajectory.q1, trajectory.q2
    stride = max(1, math.ceil(len(times) / (MAX_POLYLINE_POINTS - 1)))
    keep = np.unique(np.r_[np.arange(0, len(times), stride), len(times) - 1])
    t_hi = max(float(times[-1]), 1e-9)
    q_hi = max(float(q1.max()), float(q2.max()), q1_max) * 1.05

    def x(t):
        return margin["left"] + plot_w * np.asarray(t) / t_hi

    def y(q):
        return margin["top"] + plot_h * (1.0 - np.asarray(q) / q_hi)

    def points(values: np.ndarray) -> str:
        return " ".join(f"{px:.2f},{py:.2f}" for px, py in zip(x(times[keep]), y(values[keep])))

    svg = _env.get_template("trajectory.svg.j2").render(
        title=title,
        width=width,
        height=height,
        left=margin["left"],
        top=margin["top"],
        right=width - margin["right"],
        bottom=height - margin["bottom"],
        x_ticks=[{"pos": float(x(t)), "label": f"{t:.3g}"} for t in _ticks(0.0, t_hi)],
        y_ticks=[{"pos": float(y(q)), "label": f"{q:.3g}"} for q in _ticks(0.0, q_hi)],
        capacity_y=float(y(q1_max)),
        series=[
            {"name": "q1 (queue)", "color": "#1f77b4", "points": points(q1)},
            {"name": "q2 (attack)", "color": "#d62728", "points": points(q2)},
        ],
        termination=trajectory.termination.kind.value,
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(svg, encoding="utf-8")
    return path
