"""Synthetic data generators for tests, demos, and the bundled sample run.

Everything here is deterministic given a seed. The sample corpus is
built so that every document survives preprocessing and no two
documents collapse to the same token sequence, which keeps the
label counts exact after cleaning.
"""

from __future__ import annotations

from datetime import date, datetime, timedelta, timezone

import numpy as np

from .corpus import DEFAULT_KEYWORDS, IRRELEVANT, RELEVANT, PreprocessConfig, RawDocument, default_stopwords, format_timestamp, preprocess

N_SAMPLE_RELEVANT = 1154
N_SAMPLE_IRRELEVANT = 346
SAMPLE_START = date(2020, 1, 1)
SAMPLE_DAYS = 121


def make_blobs(counts, centers, spread=1.0, seed=0):
    """Draw isotropic Gaussian clusters.

    counts: per-class sample counts. centers: (c, d) array of cluster
    means. Returns (X, y) with rows shuffled.
    """
    centers = np.asarray(centers, dtype=np.float64)
    if centers.ndim != 2 or len(counts) != centers.shape[0]:
        raise ValueError("counts and centers must describe the same classes")
    rng = np.random.default_rng(seed)
    rows = []
    labels = []
    for cls, n in enumerate(counts):
        rows.append(centers[cls] + rng.normal(scale=spread, size=(n, centers.shape[1])))
        labels.extend([cls] * n)
    X = np.vstack(rows)
    y = np.array(labels, dtype=np.int64)
    order = rng.permutation(len(y))
    return X[order], y[order]


def planted_lda_corpus(n_docs=2000, doc_len=20, n_topics=4, terms_per_topic=10,
                       leak=0.05, alpha=0.1, seed=0):
    """Generate documents from a known topic model with block structure.

    Each topic owns a contiguous block of `terms_per_topic` terms and
    spreads `leak` probability mass uniformly over the whole
    vocabulary. Returns (token_docs, phi, terms) where phi is the
    (n_topics, vocab) word distribution the corpus was drawn from.
    """
    vocab_size = n_topics * terms_per_topic
    terms = [f"term{i:02d}" for i in range(vocab_size)]
    phi = np.full((n_topics, vocab_size), leak / vocab_size, dtype=np.float64)
    for t in range(n_topics):
        block = slice(t * terms_per_topic, (t + 1) * terms_per_topic)
        phi[t, block] += (1.0 - leak) / terms_per_topic
    cumulative = np.cumsum(phi, axis=1)
    rng = np.random.default_rng(seed)
    docs = []
    for _ in range(n_docs):
        theta = rng.dirichlet([alpha] * n_topics)
        z = rng.choice(n_topics, size=doc_len, p=theta)
        u = rng.random(doc_len)
        docs.append([terms[min(int(np.searchsorted(cumulative[zi], ui)), vocab_size - 1)]
                     for zi, ui in zip(z, u)])
    return docs, phi, terms


# Word banks for the bundled sample corpus. Eight on-topic themes and
# four off-topic ones; all words are content words so documents keep
# enough tokens after stopword removal.
_RELEVANT_BANKS = [
    ["outbreak", "confirmed", "cases", "cluster", "spread", "infection", "surge",
     "rising", "tally", "counted", "reported", "growth", "curve", "daily",
     "numbers", "province", "region", "wave", "peak", "doubling", "chart",
     "milestone", "toll", "tracking"],
    ["testing", "symptoms", "fever", "cough", "swab", "clinic", "screening",
     "diagnosed", "results", "kits", "laboratory", "samples", "positive",
     "negative", "checked", "thermometer", "breathing", "fatigue", "isolation",
     "quarantine", "monitoring", "triage", "drive", "appointment"],
    ["lockdown", "curfew", "home", "indoors", "distancing", "gatherings",
     "banned", "closed", "orders", "restrictions", "essential", "errands",
     "neighborhood", "streets", "quiet", "remote", "video", "calls", "family",
     "apartment", "balcony", "walks", "groceries", "delivery"],
    ["masks", "gloves", "sanitizer", "hygiene", "handwashing", "protective",
     "equipment", "shortage", "supplies", "fabric", "sewing", "respirator",
     "shield", "disinfectant", "wipes", "soap", "coverings", "donated",
     "distributed", "reuse", "guidance", "layers", "fit", "stockpile"],
    ["economy", "jobs", "layoffs", "unemployment", "stimulus", "relief",
     "payroll", "businesses", "shops", "revenue", "markets", "stocks",
     "recession", "loans", "rent", "savings", "paycheck", "furlough",
     "industry", "bailout", "budget", "spending", "invoices", "customers"],
    ["vaccine", "trial", "researchers", "antibodies", "immunity", "dose",
     "candidates", "laboratories", "scientists", "studies", "findings",
     "publication", "peer", "data", "efficacy", "phase", "volunteers",
     "breakthrough", "funding", "development", "protein", "genome",
     "sequence", "platform"],
    ["travel", "flights", "airport", "borders", "passengers", "cancelled",
     "grounded", "airlines", "cruise", "ship", "docked", "visas",
     "repatriation", "stranded", "terminal", "arrivals", "departures",
     "screening", "corridor", "embassy", "evacuation", "itinerary",
     "refunds", "advisory"],
    ["hospital", "nurses", "doctors", "ventilators", "beds", "icu",
     "frontline", "staff", "shifts", "exhausted", "patients", "admissions",
     "discharged", "recovering", "wards", "emergency", "capacity", "overflow",
     "tents", "volunteers", "applause", "gratitude", "scrubs", "rounds"],
]

_IRRELEVANT_BANKS = [
    ["football", "season", "playoffs", "goal", "striker", "transfer",
     "league", "coach", "stadium", "derby", "referee", "penalty", "fixture",
     "training", "squad", "highlights", "scoreline", "champions", "kit"],
    ["album", "concert", "tour", "vinyl", "playlist", "guitar", "band",
     "lyrics", "studio", "remix", "festival", "drummer", "chorus", "encore",
     "acoustic", "tickets", "merch", "single", "producer"],
    ["recipe", "sourdough", "baking", "oven", "garlic", "simmer", "broth",
     "noodles", "roasted", "seasoning", "pantry", "skillet", "leftovers",
     "dessert", "chocolate", "crispy", "marinade", "brunch", "flour"],
    ["console", "quest", "multiplayer", "speedrun", "leaderboard", "patch",
     "loot", "boss", "respawn", "arcade", "pixel", "controller", "stream",
     "guild", "unlock", "tournament", "glitch", "sandbox", "frames"],
]

# Phase weights give the sample corpus a drifting topic mixture:
# early weeks lean toward case counts and travel, the middle toward
# lockdowns and protective gear, the tail toward economy and research.
_PHASE_WEIGHTS = [
    [0.26, 0.16, 0.04, 0.06, 0.04, 0.04, 0.28, 0.12],
    [0.12, 0.12, 0.24, 0.20, 0.08, 0.06, 0.06, 0.12],
    [0.08, 0.06, 0.14, 0.08, 0.26, 0.22, 0.04, 0.12],
]

_LEADS = ["", "breaking:", "update -", "just in:", "thread:", "daily briefing:",
          "local news:", "fwiw", "psa:", "morning read:"]
_HASHTAGS = ["#covid19", "#stayhome", "#pandemic", "#flattenthecurve",
             "#washyourhands", "#quarantinelife", "#outbreak", "#health"]
_OFF_HASHTAGS = ["#matchday", "#nowplaying", "#homecooking", "#gamernews"]
_URL_CHARS = "abcdefghijklmnopqrstuvwxyz0123456789"


def _phase(day: int) -> int:
    if day < 40:
        return 0
    if day < 80:
        return 1
    return 2


def _noise_url(rng) -> str:
    tail = "".join(_URL_CHARS[int(rng.integers(0, len(_URL_CHARS)))] for _ in range(7))
    return f"https://t.co/{tail}"


def _compose(rng, bank, keyword, hashtags) -> str:
    n_words = int(rng.integers(7, 13))
    words = [bank[int(i)] for i in rng.choice(len(bank), size=n_words, replace=False)]
    parts = []
    lead = _LEADS[int(rng.integers(0, len(_LEADS)))]
    if lead:
        parts.append(lead)
    if keyword and rng.random() < 0.5:
        parts.append(keyword)
        keyword = None
    parts.extend(words)
    if keyword:
        parts.insert(int(rng.integers(1, len(parts) + 1)), keyword)
    if rng.random() < 0.35:
        parts.append(hashtags[int(rng.integers(0, len(hashtags)))])
    if rng.random() < 0.25:
        parts.append(f"@user{int(rng.integers(1, 500))}")
    if rng.random() < 0.30:
        parts.append(_noise_url(rng))
    if rng.random() < 0.15:
        parts.append("!!")
    text = " ".join(parts)
    if rng.random() < 0.20:
        text = text.upper() if rng.random() < 0.3 else text.capitalize()
    return text


def build_sample_corpus(seed=20200101):
    """Build the bundled demo corpus: 1,154 relevant and 346 irrelevant
    documents dated over early 2020, plus a small event timeline.

    Returns (records, timeline) where records are dicts ready to be
    written as JSONL and timeline is a list of event dicts.
    """
    rng = np.random.default_rng(seed)
    pcfg = PreprocessConfig(stopwords=default_stopwords(), keywords=DEFAULT_KEYWORDS)
    keywords = sorted(DEFAULT_KEYWORDS)
    seen: set[tuple] = set()
    records = []

    def emit(label: str, banks, hashtags, keyword_rate: float) -> None:
        day = int(rng.integers(0, SAMPLE_DAYS))
        if label == RELEVANT:
            weights = _PHASE_WEIGHTS[_phase(day)]
            bank = banks[int(rng.choice(len(banks), p=weights))]
        else:
            bank = banks[int(rng.integers(0, len(banks)))]
        stamp = datetime(2020, 1, 1, tzinfo=timezone.utc) + timedelta(
            days=day,
            hours=int(rng.integers(0, 24)),
            minutes=int(rng.integers(0, 60)),
            seconds=int(rng.integers(0, 60)),
        )
        for _ in range(100):
            keyword = keywords[int(rng.integers(0, 3))] if rng.random() < keyword_rate else None
            text = _compose(rng, bank, keyword, hashtags)
            probe = RawDocument(id="probe", text=text, timestamp=stamp, label=label)
            clean = preprocess(probe, pcfg)
            if clean is None:
                continue
            key = tuple(clean.tokens)
            if key in seen:
                continue
            seen.add(key)
            records.append({
                "id": "",
                "text": text,
                "ts": format_timestamp(stamp),
                "label": label,
            })
            return
        raise RuntimeError("could not compose a unique document in 100 attempts")

    for _ in range(N_SAMPLE_RELEVANT):
        emit(RELEVANT, _RELEVANT_BANKS, _HASHTAGS, keyword_rate=1.0)
    for _ in range(N_SAMPLE_IRRELEVANT):
        emit(IRRELEVANT, _IRRELEVANT_BANKS, _OFF_HASHTAGS, keyword_rate=0.3)

    order = rng.permutation(len(records))
    shuffled = [records[int(i)] for i in order]
    for n, rec in enumerate(shuffled, start=1):
        rec["id"] = f"doc-{n:05d}"

    timeline = [
        {"start": "2019-12-10", "end": "2019-12-31",
         "description": "Early reports of an unusual pneumonia cluster circulate"},
        {"start": "2020-01-30", "end": "2020-01-30",
         "description": "International public health emergency declared"},
        {"start": "2020-02-11", "end": "2020-02-11",
         "description": "The disease receives its official name"},
        {"start": "2020-03-11", "end": "2020-03-11",
         "description": "Outbreak characterized as a pandemic"},
        {"start": "2020-03-19", "end": "2020-04-07",
         "description": "Stay-at-home orders expand across many regions"},
        {"start": "2020-04-16", "end": "2020-04-30",
         "description": "Governments publish phased reopening plans"},
    ]
    return shuffled, timeline
