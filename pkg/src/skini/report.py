"""Figure rendering for performance logs.

Produces a two-panel overview next to the CSV output: a per-instrument
timeline of played patterns (bars colored by group) over an admission-rate
strip.  Pure function of the event list; written straight to file.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Patch

from .scheduler import END, START


def render_timeline(events, score, path, admissions=None, title=None):
    """Write a timeline figure for ``events`` to ``path`` (format by suffix)."""
    doc = score.doc
    instruments = list(doc.instruments)
    lane = {name: i for i, name in enumerate(instruments)}
    groups = [g.name for g in doc.groups]
    cmap = plt.get_cmap("tab20")
    color_of = {g: cmap(i % 20) for i, g in enumerate(groups)}

    spans = []
    open_starts = {}
    for e in events:
        key = (e.instrument, e.pattern_id, e.participant_id)
        if e.kind == START:
            open_starts[key] = e.time
        elif e.kind == END and key in open_starts:
            spans.append((e.instrument, e.pattern_id, open_starts.pop(key), e.time))

    fig, (ax, ax2) = plt.subplots(
        2, 1, figsize=(11, 0.45 * max(len(instruments), 4) + 3),
        sharex=True, gridspec_kw={"height_ratios": [4, 1]},
    )
    for instrument, pattern_id, t0, t1 in spans:
        group = score.group_of_pattern.get(pattern_id)
        ax.barh(
            lane[instrument], t1 - t0, left=t0, height=0.7,
            color=color_of.get(group, "#888888"), edgecolor="white",
            linewidth=0.4,
        )
    ax.set_yticks(range(len(instruments)))
    ax.set_yticklabels(instruments)
    ax.invert_yaxis()
    ax.set_ylabel("instrument")
    ax.set_title(title or f"{doc.title} — played patterns")
    used = {score.group_of_pattern.get(p) for _, p, _, _ in spans} - {None}
    if used:
        ax.legend(
            handles=[Patch(color=color_of[g], label=g) for g in groups
                     if g in used],
            loc="upper right", fontsize=7, ncol=2,
        )

    if admissions is None:
        admissions = [t0 for _, _, t0, _ in spans]
    if admissions:
        end = max(max(admissions), spans[-1][3] if spans else 0.0) + 1.0
        nbins = max(int(end), 1)
        ax2.hist(admissions, bins=nbins, range=(0.0, float(nbins)),
                 color="#4477aa")
    ax2.set_ylabel("starts/s" if admissions is None else "admissions/s")
    ax2.set_xlabel("seconds")

    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
