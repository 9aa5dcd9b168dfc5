"""Trace rendering: initial/final configurations, motion segments, lights.

Output is deterministic for a given trace: fixed hash salt, no embedded
creation date, fixed figure geometry.
"""

from __future__ import annotations

from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .engine import Trace, configuration_at  # noqa: E402
from .model import OFF  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "opaque-swarm"

_PALETTE = ("tab:orange", "tab:green", "tab:red", "tab:purple", "tab:brown",
            "tab:pink", "tab:olive", "tab:cyan", "gold", "navy")


def _color_map(trace: Trace) -> dict[str, str]:
    names = {c for _, c in trace.initial.robots}
    names |= {ev.payload["color"] for ev in trace.events if ev.kind == "light"}
    names.discard(OFF)
    mapping = {OFF: "0.55"}
    for i, name in enumerate(sorted(names)):
        mapping[name] = _PALETTE[i % len(_PALETTE)]
    return mapping


def render_trace(trace: Trace, out_path: str, at: Optional[float] = None) -> None:
    colors = _color_map(trace)
    fig, ax = plt.subplots(figsize=(7.0, 7.0))
    ax.set_aspect("equal")
    ax.set_title(f"{trace.model.label()}  seed={trace.seed}  n={trace.n}")

    if at is not None:
        cfg = configuration_at(trace, at)
        for i, (p, light) in enumerate(cfg.robots):
            ax.plot(p.x, p.y, "o", ms=9, color=colors.get(light, "black"))
            ax.annotate(str(i), (p.x, p.y), textcoords="offset points",
                        xytext=(6, 6), fontsize=8)
        ax.set_xlabel(f"t = {at:g}")
    else:
        for mv_i, mv in enumerate(trace.moves()):
            ax.annotate("", xy=(mv.to.x, mv.to.y), xytext=(mv.frm.x, mv.frm.y),
                        arrowprops=dict(arrowstyle="->", color="0.4", lw=0.9))
            mid_x = (mv.frm.x + mv.to.x) / 2
            mid_y = (mv.frm.y + mv.to.y) / 2
            ax.annotate(f"[{mv.t_start:g},{mv.t_end:g}]", (mid_x, mid_y),
                        fontsize=6, color="0.35")
        for i, (p, _light) in enumerate(trace.initial.robots):
            ax.plot(p.x, p.y, "o", mfc="none", mec="black", ms=9)
            ax.annotate(str(i), (p.x, p.y), textcoords="offset points",
                        xytext=(6, 6), fontsize=8)
        for i, (p, light) in enumerate(trace.final.robots):
            ax.plot(p.x, p.y, "o", ms=7, color=colors.get(light, "black"))
        ax.set_xlabel("open: initial, filled: final, arrows: moves")

    handles = [plt.Line2D([], [], marker="o", ls="", color=c, label=name)
               for name, c in sorted(colors.items())]
    if handles:
        ax.legend(handles=handles, loc="upper right", fontsize=7, title="lights")
    ax.grid(True, lw=0.3, alpha=0.5)
    fig.savefig(out_path, metadata={"Date": None} if out_path.endswith(".svg") else None)
    plt.close(fig)
