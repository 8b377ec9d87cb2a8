"""Figures from NDJSON query records."""

from __future__ import annotations

import json
import os
from typing import IO, Dict, List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read_records(source: IO[str]) -> List[Dict]:
    return [json.loads(line) for line in source if line.strip()]


def render(records: List[Dict], out_dir: str, title: str = "") -> List[str]:
    """Write radius/ratio and ladder-size plots; returns the file paths."""
    os.makedirs(out_dir, exist_ok=True)
    t = [r["at_time"] for r in records]
    written = []

    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.plot(t, [r["radius"] for r in records], lw=1, label="radius")
    if any(r.get("oracle_radius") is not None for r in records):
        ax.plot(t, [r.get("oracle_radius") for r in records], lw=1, label="optimal radius")
    ax.set_xlabel("arrival")
    ax.set_ylabel("radius")
    ax.legend(loc="best")
    ax.set_title(title or "radius over time")
    fig.tight_layout()
    path = os.path.join(out_dir, "radius.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    ratios = [(r["at_time"], r["ratio"]) for r in records if r.get("ratio") is not None]
    if ratios:
        fig, ax = plt.subplots(figsize=(7, 3.5))
        ax.plot([a for a, _ in ratios], [b for _, b in ratios], lw=1)
        ax.axhline(1.0, color="gray", lw=0.5)
        ax.set_xlabel("arrival")
        ax.set_ylabel("radius / optimal")
        ax.set_title(title or "approximation ratio")
        fig.tight_layout()
        path = os.path.join(out_dir, "ratio.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.step(t, [r["ladder_size"] for r in records], where="post", lw=1, label="ladder")
    if any(r.get("coreset_size") is not None for r in records):
        ax.step(t, [r.get("coreset_size") for r in records], where="post", lw=1, label="coreset")
    ax.set_xlabel("arrival")
    ax.set_ylabel("stored states")
    ax.legend(loc="best")
    ax.set_title(title or "space")
    fig.tight_layout()
    path = os.path.join(out_dir, "space.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written
