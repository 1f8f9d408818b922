#!/usr/bin/env python3
"""Regenerate the bundled sample corpus, timeline, and config.

The corpus is synthetic but shaped like a keyword-collected feed:
noisy text, drifting topic mixture over early 2020, and a 1,154/346
relevant/irrelevant label split that survives preprocessing intact.
"""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from topicflow.corpus import DEFAULT_KEYWORDS, PreprocessConfig, deduplicate, default_stopwords, parse_timestamp, preprocess, RawDocument  # noqa: E402
from topicflow.synthetic import N_SAMPLE_IRRELEVANT, N_SAMPLE_RELEVANT, build_sample_corpus  # noqa: E402

CONFIG = """\
[run]
seed = 42
out = out/sample

[data]
corpus = data/sample/corpus.jsonl
format = jsonl
timeline = data/sample/timeline.json

[features]
kind = tfidf
min_df = 2
max_df_ratio = 0.95

[model]
kind = logreg
epochs = 30
learning_rate = 0.1
l2 = 0.0001

[smote]
enabled = true
k = 5

[lda]
k = 8
k_range = 6..10
beta = 0.01
iterations = 300
burn_in = 150
sample_every = 10
min_df = 5
max_df_ratio = 0.5

[coherence]
measure = umass
top_n = 10

[trends]
origin = 2020-01-01
top_m = 3
"""


def main() -> int:
    out_dir = ROOT / "data" / "sample"
    out_dir.mkdir(parents=True, exist_ok=True)
    records, timeline = build_sample_corpus()

    pcfg = PreprocessConfig(stopwords=default_stopwords(), keywords=DEFAULT_KEYWORDS)
    cleaned = []
    for rec in records:
        raw = RawDocument(id=rec["id"], text=rec["text"],
                          timestamp=parse_timestamp(rec["ts"]), label=rec["label"])
        doc = preprocess(raw, pcfg)
        assert doc is not None, f"{rec['id']} died in preprocessing"
        cleaned.append(doc)
    unique, dropped = deduplicate(cleaned)
    assert dropped == 0, f"{dropped} duplicates after cleaning"
    n_rel = sum(1 for d in unique if d.label == "relevant")
    assert n_rel == N_SAMPLE_RELEVANT, n_rel
    assert len(unique) - n_rel == N_SAMPLE_IRRELEVANT

    with (out_dir / "corpus.jsonl").open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    with (out_dir / "timeline.json").open("w", encoding="utf-8") as fh:
        json.dump(timeline, fh, indent=2)
        fh.write("\n")
    (out_dir / "config.ini").write_text(CONFIG, encoding="utf-8")
    print(f"wrote {len(records)} documents, {len(timeline)} events -> {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
