"""Report rendering: delimited summaries and matplotlib figures.

The figure path is optional; matplotlib is imported lazily and driven with
the Agg backend so report generation works headless.
"""

import csv
import os

CSV_FIELDS = ["index", "source", "command", "target", "verdict", "value", "K", "elapsed_ms"]


def write_csv(reports, path):
    """One row per report: the delimited companion to the JSON stream."""
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for i, rep in enumerate(reports):
            certs = rep.get("certificates", {})
            writer.writerow(
                {
                    "index": i,
                    "source": rep.get("source", ""),
                    "command": rep.get("command", ""),
                    "target": rep.get("inputs", {}).get("target", ""),
                    "verdict": rep.get("verdict", ""),
                    "value": certs.get("value", ""),
                    "K": certs.get("K", ""),
                    "elapsed_ms": rep.get("elapsed_ms", ""),
                }
            )
    return path


def _matplotlib():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _slug(rep, i):
    target = rep.get("inputs", {}).get("target", "")
    base = rep.get("command", "report").replace(" ", "_")
    if target:
        base += f"_{target}"
    return f"{i:03d}_{base}"


def render_verdict_summary(reports, path):
    plt = _matplotlib()
    counts = {}
    for rep in reports:
        counts[rep.get("verdict", "?")] = counts.get(rep.get("verdict", "?"), 0) + 1
    order = ["holds", "fails", "hypothesis-not-met", "computed", "error"]
    labels = [v for v in order if v in counts] + [v for v in counts if v not in order]
    values = [counts[v] for v in labels]
    colors = {
        "holds": "#2a9d4e",
        "computed": "#4878b0",
        "hypothesis-not-met": "#e0a500",
        "fails": "#c0392b",
        "error": "#6d6d6d",
    }
    fig, ax = plt.subplots(figsize=(6, 3.2))
    ax.bar(range(len(labels)), values, color=[colors.get(v, "#999") for v in labels])
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=20, ha="right")
    ax.set_ylabel("reports")
    ax.set_title("verdict summary")
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)
    return path


def render_staircase(rep, path):
    """Monomial staircase with the Newton boundary for a closure report."""
    certs = rep.get("certificates", {})
    closure = [tuple(e) for e in certs.get("exponents", [])]
    inputs = [tuple(e) for e in certs.get("input_exponents", [])]
    if not closure:
        return None
    plt = _matplotlib()
    fig, ax = plt.subplots(figsize=(4.2, 4.2))
    max_a = max(e[0] for e in closure + inputs) + 1
    max_b = max(e[1] for e in closure + inputs) + 1
    added = [e for e in closure if e not in inputs]
    if inputs:
        ax.plot(*zip(*inputs), "s", color="#4878b0", ms=9, label="generators")
    if added:
        ax.plot(*zip(*added), "o", color="#c0392b", ms=7, label="added by closure")
    hull = sorted(set(inputs) | set(closure))
    ax.plot(*zip(*hull), "--", color="#888", lw=1)
    ax.set_xlim(-0.5, max_a)
    ax.set_ylim(-0.5, max_b)
    ax.set_xticks(range(max_a + 1))
    ax.set_yticks(range(max_b + 1))
    ax.grid(True, lw=0.3, alpha=0.5)
    ax.set_xlabel("x exponent")
    ax.set_ylabel("y exponent")
    ax.set_title("integral closure (Newton region)")
    ax.legend(loc="upper right", fontsize=8)
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)
    return path


def render_betti(rep, path):
    certs = rep.get("certificates", {})
    ranks = certs.get("value") or certs.get("betti")
    if not isinstance(ranks, (list, tuple)) or not ranks:
        return None
    plt = _matplotlib()
    fig, ax = plt.subplots(figsize=(4.6, 3.0))
    ax.bar(range(len(ranks)), ranks, color="#4878b0")
    ax.set_xticks(range(len(ranks)))
    ax.set_xticklabels([f"F{i}" for i in range(len(ranks))])
    ax.set_ylabel("rank")
    ax.set_title("free resolution ranks")
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    for i, r in enumerate(ranks):
        ax.text(i, r + 0.05, str(r), ha="center", fontsize=9)
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)
    return path


def render_report_files(reports, outdir):
    """Write the CSV summary plus figures into outdir; returns written paths."""
    os.makedirs(outdir, exist_ok=True)
    written = [write_csv(reports, os.path.join(outdir, "reports.csv"))]
    summary = render_verdict_summary(reports, os.path.join(outdir, "summary.png"))
    if summary:
        written.append(summary)
    for i, rep in enumerate(reports):
        cmd = rep.get("command", "")
        if cmd == "compute closure":
            path = render_staircase(rep, os.path.join(outdir, _slug(rep, i) + ".png"))
            if path:
                written.append(path)
        elif cmd in ("compute resolve", "compute dual-image"):
            path = render_betti(rep, os.path.join(outdir, _slug(rep, i) + ".png"))
            if path:
                written.append(path)
    return written
