"""Weekly topic trends and event-timeline alignment.

Documents map to 7-day buckets counted from a fixed origin date (week w
covers origin + 7w .. origin + 7w + 6). Weekly rows report the percentage
of that week's documents per dominant topic; empty weeks stay in the table
as gaps rather than zeros.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError
from .corpus import CleanDocument
from .topics import DocTopics


@dataclass(frozen=True)
class TimelineEvent:
    start: date
    end: date
    description: str


def load_timeline(path: str | Path) -> list[TimelineEvent]:
    """Load a JSON array of {start, end, description}, sorted by start date."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"timeline file not found: {path}")
    with path.open("r", encoding="utf-8") as fh:
        try:
            entries = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(entries, list):
        raise DataError(f"{path}: timeline must be a JSON array")
    events = []
    for pos, obj in enumerate(entries):
        where = f"{path}[{pos}]"
        if not isinstance(obj, dict):
            raise DataError(f"{where}: entry is not an object")
        try:
            start = date.fromisoformat(obj["start"])
            end = date.fromisoformat(obj["end"])
            description = obj["description"]
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{where}: malformed entry: {exc}") from exc
        if not isinstance(description, str) or not description:
            raise DataError(f"{where}: missing description")
        if end < start:
            raise DataError(f"{where}: end {end} precedes start {start}")
        events.append(TimelineEvent(start=start, end=end, description=description))
    return sorted(events, key=lambda e: (e.start, e.end))


def assign_weeks(docs: list[CleanDocument], origin: date) -> list[int]:
    """Set week_index = floor((doc date - origin) / 7 days) on every doc.

    Timestamps before the origin raise DataError naming the document.
    """
    out = []
    for doc in docs:
        days = (doc.timestamp.date() - origin).days
        if days < 0:
            raise DataError(
                f"document {doc.id!r} dated {doc.timestamp.date()} precedes week origin {origin}"
            )
        week = days // 7
        doc.week_index = week
        out.append(week)
    return out


@dataclass(eq=False)
class TrendMatrix:
    """Weekly percentage/count table; row w is week w from the origin."""

    origin: date
    week_starts: list
    percentages: np.ndarray
    counts: np.ndarray
    empty_weeks: list = field(default_factory=list)

    @property
    def n_weeks(self) -> int:
        return len(self.week_starts)

    @property
    def k(self) -> int:
        return self.counts.shape[1]


def topic_trend(
    doc_topics: list[DocTopics],
    week_indices: list[int],
    k: int,
    origin: date,
) -> TrendMatrix:
    """Tally dominant topics into weekly percentage rows.

    Rows run from week 0 through the latest observed week. Non-empty rows
    sum to 100 (up to rounding in the float sense, not the printed one);
    empty weeks carry NaN percentages and are listed in empty_weeks.
    Documents flagged all_oov are left out of the tallies.
    """
    if len(doc_topics) != len(week_indices):
        raise DataError("doc_topics and week_indices must align")
    if not doc_topics:
        raise DataError("cannot compute trends for an empty corpus")
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    max_week = max(week_indices)
    counts = np.zeros((max_week + 1, k), dtype=np.int64)
    for dt, week in zip(doc_topics, week_indices):
        if dt.all_oov:
            continue
        if not (0 <= dt.dominant < k):
            raise DataError(f"dominant topic {dt.dominant} out of range for k={k}")
        counts[week, dt.dominant] += 1
    row_totals = counts.sum(axis=1)
    percentages = np.full(counts.shape, np.nan, dtype=np.float64)
    nonzero = row_totals > 0
    percentages[nonzero] = 100.0 * counts[nonzero] / row_totals[nonzero, None]
    empty = [int(w) for w in np.flatnonzero(~nonzero)]
    week_starts = [origin + timedelta(days=7 * w) for w in range(max_week + 1)]
    return TrendMatrix(
        origin=origin,
        week_starts=week_starts,
        percentages=percentages,
        counts=counts,
        empty_weeks=empty,
    )


def dominant_per_week(trend: TrendMatrix, top_m: int = 3) -> list[list[int]]:
    """Top-m topic indices per week (percentage desc, index asc); [] for empty weeks."""
    if top_m < 1:
        raise ConfigError(f"top_m must be >= 1, got {top_m}")
    out: list[list[int]] = []
    for w in range(trend.n_weeks):
        total = int(trend.counts[w].sum())
        if total == 0:
            out.append([])
            continue
        ranked = sorted(range(trend.k), key=lambda t: (-trend.counts[w, t], t))
        out.append([t for t in ranked[:top_m] if trend.counts[w, t] > 0])
    return out


@dataclass
class AlignmentRow:
    start: date
    end: date
    description: str
    topics: list
    themes: list
    outside_range: bool = False


def align_events(
    trend: TrendMatrix,
    timeline: list[TimelineEvent],
    theme_names: list[str] | None = None,
    top_m: int = 3,
) -> list[AlignmentRow]:
    """Attach each timeline event to its overlapping weeks' top topics.

    A week overlaps an event when week_start <= event.end and
    week_start + 6 days >= event.start. Document counts are summed over
    the overlapping weeks and ranked (count desc, index asc). Events
    touching no non-empty week get an empty topic list and a flag.
    """
    if top_m < 1:
        raise ConfigError(f"top_m must be >= 1, got {top_m}")
    if theme_names is not None and len(theme_names) != trend.k:
        raise ConfigError(
            f"theme_names has {len(theme_names)} entries for k={trend.k} topics"
        )
    rows: list[AlignmentRow] = []
    for event in timeline:
        combined = np.zeros(trend.k, dtype=np.int64)
        touched = False
        for w, week_start in enumerate(trend.week_starts):
            week_end = week_start + timedelta(days=6)
            if week_start <= event.end and week_end >= event.start:
                combined += trend.counts[w]
                touched = True
        total = int(combined.sum())
        if not touched or total == 0:
            rows.append(AlignmentRow(
                start=event.start, end=event.end, description=event.description,
                topics=[], themes=[], outside_range=True,
            ))
            continue
        ranked = sorted(range(trend.k), key=lambda t: (-combined[t], t))
        top = [t for t in ranked[:top_m] if combined[t] > 0]
        themes = [theme_names[t] if theme_names else f"Topic {t + 1}" for t in top]
        rows.append(AlignmentRow(
            start=event.start, end=event.end, description=event.description,
            topics=top, themes=themes,
        ))
    return rows


def save_trend_csv(trend: TrendMatrix, path: str | Path) -> None:
    """Write week_start,topic_0..K-1 rows; percentages to 1 decimal.

    Empty weeks keep their row with blank percentage cells.
    """
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["week_start"] + [f"topic_{t}" for t in range(trend.k)])
        for w in range(trend.n_weeks):
            start = trend.week_starts[w].isoformat()
            if int(trend.counts[w].sum()) == 0:
                writer.writerow([start] + [""] * trend.k)
            else:
                writer.writerow([start] + [f"{v:.1f}" for v in trend.percentages[w]])


def save_trend_counts_csv(trend: TrendMatrix, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["week_start"] + [f"topic_{t}" for t in range(trend.k)])
        for w in range(trend.n_weeks):
            writer.writerow([trend.week_starts[w].isoformat()]
                            + [str(int(c)) for c in trend.counts[w]])


def load_trend_csv(path: str | Path) -> tuple[list[date], list[list[float | None]]]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"trend file not found: {path}")
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty trend file") from None
        if not header or header[0] != "week_start":
            raise DataError(f"{path}: expected week_start header")
        weeks: list[date] = []
        rows: list[list[float | None]] = []
        for lineno, row in enumerate(reader, start=2):
            try:
                weeks.append(date.fromisoformat(row[0]))
                rows.append([float(cell) if cell else None for cell in row[1:]])
            except (IndexError, ValueError) as exc:
                raise DataError(f"{path}:{lineno}: malformed row: {exc}") from exc
    return weeks, rows


def alignment_markdown(rows: list[AlignmentRow]) -> str:
    """Render the event alignment as a Markdown table."""
    lines = [
        "| Weeks | Events | Trending topics |",
        "| --- | --- | --- |",
    ]
    for row in rows:
        period = f"{row.start.strftime('%b %d')} to {row.end.strftime('%b %d')}"
        themes = ", ".join(row.themes) if row.themes else "(outside corpus range)"
        lines.append(f"| {period} | {row.description} | {themes} |")
    return "\n".join(lines) + "\n"
