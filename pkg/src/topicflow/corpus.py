"""Corpus ingestion and text preprocessing.

Raw documents arrive as JSONL or CSV records with an id, a text body, an
RFC 3339 timestamp, and an optional relevance label. Preprocessing runs
normalize -> tokenize -> stopword removal -> stemming, then exact-duplicate
removal on the final token sequences.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from . import porter
from .errors import ConfigError, DataError

RELEVANT = "relevant"
IRRELEVANT = "irrelevant"
LABELS = (RELEVANT, IRRELEVANT)

DEFAULT_KEYWORDS = frozenset({"coronavirus", "covid-19", "sars-ncov"})

_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_WS_RE = re.compile(r"\s+")

# Penn-Treebank contraction suffixes, n't checked first so "don't" does not
# split at the possessive rule.
_CLITICS = ("n't", "'s", "'re", "'ve", "'ll", "'d", "'m")


@dataclass
class RawDocument:
    id: str
    text: str
    timestamp: datetime
    label: str | None = None


@dataclass
class CleanDocument:
    id: str
    tokens: list[str]
    timestamp: datetime
    label: str | None = None
    week_index: int | None = None


@dataclass(frozen=True)
class PreprocessConfig:
    stopwords: frozenset[str]
    keywords: frozenset[str] = DEFAULT_KEYWORDS
    strip_urls: bool = True
    strip_mentions_hashmarks: bool = True
    strip_non_ascii: bool = True
    min_tokens: int = 1


def parse_timestamp(value: str, where: str = "") -> datetime:
    """Parse an RFC 3339 timestamp; naive values are taken as UTC."""
    if not isinstance(value, str) or not value:
        raise DataError(f"{where}: missing or non-string timestamp")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(text)
    except ValueError as exc:
        raise DataError(f"{where}: invalid timestamp {value!r}: {exc}") from exc
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _parse_label(value, where: str) -> str | None:
    if value is None:
        return None
    text = str(value).strip().lower()
    if not text:
        return None
    if text not in LABELS:
        raise DataError(f"{where}: invalid label {value!r} (expected relevant/irrelevant)")
    return text


def load_corpus(path: str | Path, fmt: str | None = None) -> list[RawDocument]:
    """Load raw documents from a JSONL or CSV file.

    The format is inferred from the file extension unless given explicitly.
    Duplicate ids and malformed records raise DataError with a line number.
    """
    path = Path(path)
    if fmt is None:
        ext = path.suffix.lower()
        if ext == ".jsonl":
            fmt = "jsonl"
        elif ext == ".csv":
            fmt = "csv"
        else:
            raise ConfigError(f"cannot infer corpus format from extension {ext!r}; pass fmt")
    if fmt not in ("jsonl", "csv"):
        raise ConfigError(f"unknown corpus format {fmt!r}")
    if not path.exists():
        raise DataError(f"corpus file not found: {path}")

    docs: list[RawDocument] = []
    seen: set[str] = set()

    def add(doc_id, text, ts_raw, label_raw, where: str) -> None:
        if not isinstance(doc_id, str) or not doc_id:
            raise DataError(f"{where}: missing or empty id")
        if not isinstance(text, str) or not text:
            raise DataError(f"{where}: missing or empty text")
        if doc_id in seen:
            raise DataError(f"{where}: duplicate id {doc_id!r}")
        seen.add(doc_id)
        docs.append(RawDocument(
            id=doc_id,
            text=text,
            timestamp=parse_timestamp(ts_raw, where),
            label=_parse_label(label_raw, where),
        ))

    if fmt == "jsonl":
        with path.open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                where = f"{path}:{lineno}"
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise DataError(f"{where}: invalid JSON: {exc}") from exc
                if not isinstance(obj, dict):
                    raise DataError(f"{where}: record is not a JSON object")
                add(obj.get("id"), obj.get("text"), obj.get("ts"), obj.get("label"), where)
    else:
        with path.open("r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [col for col in ("id", "text", "ts", "label") if col not in header]
            if missing:
                raise DataError(f"{path}:1: CSV header missing columns {missing}")
            for lineno, row in enumerate(reader, start=2):
                where = f"{path}:{lineno}"
                add(row.get("id"), row.get("text"), row.get("ts"), row.get("label"), where)
    return docs


def load_term_file(path: str | Path) -> frozenset[str]:
    """Load a one-term-per-line file; '#' lines are comments."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"term file not found: {path}")
    terms = set()
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            terms.add(text.lower())
    return frozenset(terms)


def default_stopwords() -> frozenset[str]:
    """Bundled English stoplist plus contraction clitics."""
    data = resources.files("topicflow").joinpath("data/stopwords.txt").read_text("utf-8")
    terms = set()
    for line in data.splitlines():
        text = line.strip()
        if text and not text.startswith("#"):
            terms.add(text.lower())
    return frozenset(terms)


def _keep_char(ch: str, strip_non_ascii: bool) -> bool:
    if ch == "'" or ch.isspace():
        return True
    if strip_non_ascii:
        return ("a" <= ch <= "z") or ("0" <= ch <= "9")
    return ch.isalnum()


def _trim_marks(token: str) -> str:
    """Strip leading/trailing characters that are not letters or digits."""
    start, end = 0, len(token)
    while start < end and not token[start].isalnum():
        start += 1
    while end > start and not token[end - 1].isalnum():
        end -= 1
    return token[start:end]


def normalize(text: str, config: PreprocessConfig) -> str:
    """Lowercase, strip URLs/marks/symbols, and drop collection keywords.

    Keywords are matched twice: against whole tokens before symbol removal
    (so hyphenated forms match) and against their symbol-stripped spellings
    afterwards, which keeps the function idempotent.
    """
    out = text.lower()
    if config.strip_urls:
        out = _URL_RE.sub(" ", out)
    if config.strip_mentions_hashmarks:
        out = out.replace("#", "").replace("@", "")
    if config.keywords:
        kept = [tok for tok in out.split() if _trim_marks(tok) not in config.keywords]
        out = " ".join(kept)
    out = "".join(ch for ch in out if _keep_char(ch, config.strip_non_ascii))
    if config.keywords:
        bare = {
            "".join(ch for ch in kw if _keep_char(ch, config.strip_non_ascii) and not ch.isspace())
            for kw in config.keywords
        }
        out = " ".join(tok for tok in out.split() if tok not in bare)
    return _WS_RE.sub(" ", out).strip()


def tokenize(text: str) -> list[str]:
    """Whitespace tokenization with Treebank-style contraction splitting.

    "don't" becomes ("do", "n't"); possessive and auxiliary clitics such as
    's, 're, 've, 'll, 'd, 'm split off likewise. Apostrophes at token
    edges are dropped. Never returns empty tokens.
    """
    tokens: list[str] = []
    for raw in text.split():
        tok = raw.strip("'")
        if not tok:
            continue
        split = None
        for clitic in _CLITICS:
            if tok.endswith(clitic) and len(tok) > len(clitic):
                split = (tok[: -len(clitic)], clitic)
                break
        if split is not None:
            tokens.append(split[0])
            tokens.append(split[1])
        else:
            tokens.append(tok)
    return tokens


def remove_stopwords(tokens: list[str], stopwords: frozenset[str]) -> list[str]:
    return [tok for tok in tokens if tok not in stopwords]


def stem_tokens(tokens: list[str]) -> list[str]:
    return [porter.stem(tok) for tok in tokens]


def preprocess(doc: RawDocument, config: PreprocessConfig) -> CleanDocument | None:
    """Run the full normalization chain; None when too few tokens remain."""
    tokens = stem_tokens(remove_stopwords(tokenize(normalize(doc.text, config)), config.stopwords))
    if len(tokens) < max(config.min_tokens, 1):
        return None
    return CleanDocument(id=doc.id, tokens=tokens, timestamp=doc.timestamp, label=doc.label)


def deduplicate(docs: list[CleanDocument]) -> tuple[list[CleanDocument], int]:
    """Drop exact duplicates of the stemmed token sequence.

    The surviving instance is the one with the earliest timestamp (ties
    keep the earliest input position); output preserves input order of the
    survivors. Returns (survivors, number dropped).
    """
    best: dict[tuple[str, ...], int] = {}
    for pos, doc in enumerate(docs):
        key = tuple(doc.tokens)
        if key not in best:
            best[key] = pos
        elif doc.timestamp < docs[best[key]].timestamp:
            best[key] = pos
    keep = set(best.values())
    survivors = [doc for pos, doc in enumerate(docs) if pos in keep]
    return survivors, len(docs) - len(survivors)


def save_clean_corpus(docs: list[CleanDocument], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for doc in docs:
            record = {"id": doc.id, "tokens": doc.tokens, "ts": format_timestamp(doc.timestamp)}
            if doc.label is not None:
                record["label"] = doc.label
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def load_clean_corpus(path: str | Path) -> list[CleanDocument]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"clean corpus file not found: {path}")
    docs: list[CleanDocument] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            where = f"{path}:{lineno}"
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{where}: invalid JSON: {exc}") from exc
            doc_id = obj.get("id")
            tokens = obj.get("tokens")
            if not isinstance(doc_id, str) or not doc_id:
                raise DataError(f"{where}: missing or empty id")
            if doc_id in seen:
                raise DataError(f"{where}: duplicate id {doc_id!r}")
            seen.add(doc_id)
            if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
                raise DataError(f"{where}: tokens must be a list of strings")
            docs.append(CleanDocument(
                id=doc_id,
                tokens=tokens,
                timestamp=parse_timestamp(obj.get("ts"), where),
                label=_parse_label(obj.get("label"), where),
            ))
    return docs
