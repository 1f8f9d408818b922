"""Run reporting: topic maps, deterministic SVG charts, manifested bundles.

Every byte written here is a pure function of the artifacts passed in:
floats go through fixed-width formats, JSON keys are sorted, and files are
hashed into a manifest so reruns can be compared byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError
from .topics import DocTopics, LdaModel
from .trends import AlignmentRow, TrendMatrix, alignment_markdown, save_trend_counts_csv, save_trend_csv


def js_divergence(p, q) -> float:
    """Jensen-Shannon divergence with natural log; bounded by ln 2.

    Inputs must be same-length distributions summing to 1 within 1e-6;
    0 * ln 0 terms contribute zero.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1:
        raise DataError("js_divergence expects two equal-length 1-d distributions")
    for name, v in (("p", p), ("q", q)):
        if np.any(v < 0.0):
            raise DataError(f"{name} has negative entries")
        if abs(float(v.sum()) - 1.0) > 1e-6:
            raise DataError(f"{name} does not sum to 1 (got {float(v.sum())!r})")
    m = 0.5 * (p + q)

    def kl(a: np.ndarray) -> float:
        mask = a > 0.0
        return float(np.sum(a[mask] * np.log(a[mask] / m[mask])))

    return 0.5 * kl(p) + 0.5 * kl(q)


@dataclass(eq=False)
class TopicMap:
    """2-d embedding of the topics with prevalence sizes."""

    coords: np.ndarray
    sizes: np.ndarray
    labels: list
    distances: np.ndarray


def intertopic_map(
    model: LdaModel,
    doc_topics: list[DocTopics],
    labels: list[str] | None = None,
) -> TopicMap:
    """Classical MDS of pairwise JS divergences between topic-word rows.

    B = -1/2 * J D2 J is eigendecomposed; the two largest eigenvalues give
    the axes, each scaled by sqrt(eigenvalue) and signed so its largest-
    magnitude coordinate is positive. sizes[k] is the mean of theta[:, k].
    """
    k = model.k
    if k < 2:
        raise ConfigError(f"intertopic map needs k >= 2, got {k}")
    if not doc_topics:
        raise DataError("intertopic map needs document-topic mixtures")
    if labels is not None and len(labels) != k:
        raise ConfigError(f"labels has {len(labels)} entries for k={k} topics")
    dist = np.zeros((k, k), dtype=np.float64)
    for i in range(k):
        for j in range(i + 1, k):
            d = js_divergence(model.phi[i], model.phi[j])
            dist[i, j] = d
            dist[j, i] = d
    sq = dist ** 2
    centering = np.eye(k) - np.full((k, k), 1.0 / k)
    b = -0.5 * centering @ sq @ centering
    eigvals, eigvecs = np.linalg.eigh(b)
    order = np.argsort(eigvals)[::-1][:2]
    coords = np.zeros((k, 2), dtype=np.float64)
    for axis, idx in enumerate(order):
        lam = max(float(eigvals[idx]), 0.0)
        vec = eigvecs[:, idx] * math.sqrt(lam)
        if vec[np.argmax(np.abs(vec))] < 0:
            vec = -vec
        coords[:, axis] = vec
    theta = np.array([dt.theta for dt in doc_topics], dtype=np.float64)
    if theta.shape[1] != k:
        raise DataError(f"theta width {theta.shape[1]} does not match k={k}")
    sizes = theta.mean(axis=0)
    names = list(labels) if labels is not None else [f"Topic {i + 1}" for i in range(k)]
    return TopicMap(coords=coords, sizes=sizes, labels=names, distances=dist)


def _esc(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;").replace("'", "&apos;"))


def _f(v: float) -> str:
    return f"{v:.2f}"


_PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
)


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def render_line_chart(
    x_labels: list[str],
    series: list[tuple[str, list[float | None]]],
    title: str,
    y_label: str = "",
    width: int = 800,
    height: int = 500,
) -> str:
    """Build a deterministic multi-series SVG line chart.

    None values break the polyline, leaving a visible gap. Coordinates are
    always formatted with two decimals so identical inputs render to
    identical bytes.
    """
    if not series or not x_labels:
        raise DataError("line chart needs at least one series and one x position")
    for name, values in series:
        if len(values) != len(x_labels):
            raise DataError(f"series {name!r} length does not match x labels")
    finite = [v for _, values in series for v in values if v is not None]
    if not finite:
        raise DataError("line chart needs at least one finite value")
    lo, hi = min(finite), max(finite)
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    left, right, top, bottom = 70, 160, 50, 60
    plot_w = width - left - right
    plot_h = height - top - bottom
    n = len(x_labels)

    def px(i: int) -> float:
        return left + (plot_w * i / (n - 1) if n > 1 else plot_w / 2)

    def py(v: float) -> float:
        return top + plot_h * (1.0 - (v - lo) / (hi - lo))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{_f(width / 2)}" y="28" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16" fill="#222222">{_esc(title)}</text>',
    ]
    for tick in _ticks(lo, hi):
        y = py(tick)
        out.append(f'<line x1="{left}" y1="{_f(y)}" x2="{width - right}" y2="{_f(y)}" '
                   f'stroke="#dddddd" stroke-width="1"/>')
        out.append(f'<text x="{left - 8}" y="{_f(y + 4)}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11" fill="#444444">{tick:.4g}</text>')
    step = max(1, (n + 7) // 8)
    for i in range(0, n, step):
        x = px(i)
        out.append(f'<line x1="{_f(x)}" y1="{top + plot_h}" x2="{_f(x)}" '
                   f'y2="{top + plot_h + 5}" stroke="#444444" stroke-width="1"/>')
        out.append(f'<text x="{_f(x)}" y="{top + plot_h + 20}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="10" fill="#444444">{_esc(x_labels[i])}</text>')
    out.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" '
               f'stroke="#444444" stroke-width="1"/>')
    out.append(f'<line x1="{left}" y1="{top + plot_h}" x2="{width - right}" '
               f'y2="{top + plot_h}" stroke="#444444" stroke-width="1"/>')
    if y_label:
        out.append(f'<text x="18" y="{_f(top + plot_h / 2)}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12" fill="#444444" '
                   f'transform="rotate(-90 18 {_f(top + plot_h / 2)})">{_esc(y_label)}</text>')
    for si, (name, values) in enumerate(series):
        color = _PALETTE[si % len(_PALETTE)]
        segment: list[str] = []
        segments: list[list[str]] = []
        for i, v in enumerate(values):
            if v is None:
                if segment:
                    segments.append(segment)
                    segment = []
                continue
            segment.append(f"{_f(px(i))},{_f(py(v))}")
        if segment:
            segments.append(segment)
        for seg in segments:
            if len(seg) == 1:
                x, y = seg[0].split(",")
                out.append(f'<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>')
            else:
                out.append(f'<polyline points="{" ".join(seg)}" fill="none" '
                           f'stroke="{color}" stroke-width="2"/>')
        ly = top + 16 * si
        lx = width - right + 12
        out.append(f'<rect x="{lx}" y="{ly}" width="10" height="10" fill="{color}"/>')
        out.append(f'<text x="{lx + 14}" y="{ly + 9}" font-family="sans-serif" '
                   f'font-size="11" fill="#222222">{_esc(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_topic_map(tmap: TopicMap, title: str, width: int = 640, height: int = 560) -> str:
    """Render the intertopic map: one circle per topic, area tracking share."""
    k = tmap.coords.shape[0]
    left = right = 60
    top, bottom = 70, 40
    plot_w = width - left - right
    plot_h = height - top - bottom
    xs = tmap.coords[:, 0]
    ys = tmap.coords[:, 1]
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    max_size = float(tmap.sizes.max()) if k else 1.0

    def px(v: float) -> float:
        return left + plot_w * (v - x_lo) / (x_hi - x_lo)

    def py(v: float) -> float:
        return top + plot_h * (1.0 - (v - y_lo) / (y_hi - y_lo))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{_f(width / 2)}" y="30" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16" fill="#222222">{_esc(title)}</text>',
    ]
    for i in range(k):
        r = 10.0 + 32.0 * math.sqrt(float(tmap.sizes[i]) / max_size) if max_size > 0 else 10.0
        color = _PALETTE[i % len(_PALETTE)]
        out.append(f'<circle cx="{_f(px(float(xs[i])))}" cy="{_f(py(float(ys[i])))}" '
                   f'r="{_f(r)}" fill="{color}" fill-opacity="0.55" stroke="{color}"/>')
    for i in range(k):
        x, y = px(float(xs[i])), py(float(ys[i]))
        share = 100.0 * float(tmap.sizes[i])
        out.append(f'<text x="{_f(x)}" y="{_f(y - 2)}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12" fill="#111111">{_esc(str(tmap.labels[i]))}</text>')
        out.append(f'<text x="{_f(x)}" y="{_f(y + 12)}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="10" fill="#333333">{share:.1f}%</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_labels_csv(rows: list, path: str | Path) -> None:
    """Write id,label,score rows; scores fixed at 6 decimals."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "label", "score"])
        for doc_id, label, score in rows:
            writer.writerow([doc_id, label, f"{score:.6f}"])


def write_json(payload, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def write_coherence_csv(curve: list, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["K", "mean_coherence"])
        for k, score in curve:
            writer.writerow([str(int(k)), f"{score:.6f}"])


@dataclass
class RunArtifacts:
    """Everything the report stage may bundle; absent stages stay None."""

    labels_rows: list | None = None
    label_summary: dict | None = None
    metrics: dict | None = None
    topics: list | None = None
    coherence_curve: list | None = None
    selected_k: int | None = None
    trend: TrendMatrix | None = None
    alignment_rows: list | None = None
    topic_map: TopicMap | None = None
    theme_names: list | None = None


_STAGES = ("labels", "metrics", "topics", "coherence", "trend", "alignment", "topic_map")


def emit_run_report(artifacts: RunArtifacts, out_dir: str | Path) -> dict:
    """Write the report bundle and its manifest; returns the manifest dict.

    Only artifacts that are present produce files; the manifest lists every
    file's sha256 and size plus the names of missing stages.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    missing = []

    if artifacts.labels_rows is not None:
        write_labels_csv(artifacts.labels_rows, out / "labels.csv")
        if artifacts.label_summary is not None:
            write_json(artifacts.label_summary, out / "label_summary.json")
    else:
        missing.append("labels")

    if artifacts.metrics is not None:
        write_json(artifacts.metrics, out / "metrics.json")
    else:
        missing.append("metrics")

    if artifacts.topics is not None:
        write_json(artifacts.topics, out / "topics.json")
    else:
        missing.append("topics")

    if artifacts.coherence_curve is not None:
        write_coherence_csv(artifacts.coherence_curve, out / "coherence.csv")
        labels = [str(int(k)) for k, _ in artifacts.coherence_curve]
        values = [float(s) for _, s in artifacts.coherence_curve]
        title = "Topic coherence by K"
        if artifacts.selected_k is not None:
            title += f" (selected K={artifacts.selected_k})"
        svg = render_line_chart(labels, [("coherence", values)], title, y_label="mean coherence")
        (out / "coherence.svg").write_text(svg, encoding="utf-8")
    else:
        missing.append("coherence")

    if artifacts.trend is not None:
        trend = artifacts.trend
        save_trend_csv(trend, out / "trend.csv")
        save_trend_counts_csv(trend, out / "trend_counts.csv")
        names = artifacts.theme_names or [f"Topic {t + 1}" for t in range(trend.k)]
        series = []
        for t in range(trend.k):
            vals = [None if math.isnan(trend.percentages[w, t]) else float(trend.percentages[w, t])
                    for w in range(trend.n_weeks)]
            series.append((names[t], vals))
        week_labels = [d.strftime("%m-%d") for d in trend.week_starts]
        svg = render_line_chart(week_labels, series, "Weekly topic share", y_label="% of documents")
        (out / "trend.svg").write_text(svg, encoding="utf-8")
    else:
        missing.append("trend")

    if artifacts.alignment_rows is not None:
        (out / "alignment.md").write_text(alignment_markdown(artifacts.alignment_rows), encoding="utf-8")
    else:
        missing.append("alignment")

    if artifacts.topic_map is not None:
        svg = render_topic_map(artifacts.topic_map, "Intertopic distance map")
        (out / "topic_map.svg").write_text(svg, encoding="utf-8")
    else:
        missing.append("topic_map")

    files = []
    for path in sorted(out.iterdir()):
        if path.name == "manifest.json" or not path.is_file():
            continue
        blob = path.read_bytes()
        files.append({
            "path": path.name,
            "sha256": hashlib.sha256(blob).hexdigest(),
            "bytes": len(blob),
        })
    manifest = {"files": files, "missing": missing}
    write_json(manifest, out / "manifest.json")
    return manifest
