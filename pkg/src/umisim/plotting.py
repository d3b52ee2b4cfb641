"""Campaign figures, rendered headless to image files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

RATIO_COLUMNS = {
    "ratio_d1": "rounds / (D+1)",
    "ratio_log": "rounds / (log n + log(l+2) + D)",
    "ratio_naming": "rounds / ((n+l) log(n+2))",
}


def campaign_figure(rows, path, title=""):
    """Convergence-round histogram next to the bound ratios, one point per seed."""
    fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
    rounds = [r["rounds"] for r in rows if r["rounds"] is not None]
    if rounds:
        left.hist(rounds, bins=min(30, max(1, len(set(rounds)))), color="tab:blue")
    left.set_xlabel("convergence round")
    left.set_ylabel("trials")
    timeouts = sum(1 for r in rows if not r["converged"])
    left.set_title(f"{len(rounds)} converged, {timeouts} timed out")

    for pos, (key, label) in enumerate(RATIO_COLUMNS.items()):
        vals = [r[key] for r in rows if r[key] is not None]
        right.scatter([pos] * len(vals), vals, s=12, alpha=0.6, label=label)
    right.set_xticks(range(len(RATIO_COLUMNS)))
    right.set_xticklabels(["D+1", "log", "naming"])
    right.set_ylabel("rounds / bound")
    right.axhline(1.0, color="grey", lw=0.8, ls="--")
    if rows:
        right.legend(fontsize=7)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path
