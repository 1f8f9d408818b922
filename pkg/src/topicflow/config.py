"""Run configuration: dataclass settings plus INI parsing.

Configuration lives in an INI file with one section per pipeline stage;
CLI flags override file values, file values override defaults. Unknown
sections or keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

from .classify import SplitSpec
from .errors import ConfigError

FEATURES_TFIDF = "tfidf"
FEATURES_EMBEDDINGS = "embeddings"


@dataclass
class DataPaths:
    corpus: str | None = None
    format: str | None = None
    stoplist: str | None = None
    keywords: str | None = None
    embeddings: str | None = None
    timeline: str | None = None


@dataclass
class PreprocessSettings:
    min_tokens: int = 1
    strip_urls: bool = True
    strip_mentions_hashmarks: bool = True
    strip_non_ascii: bool = True


@dataclass
class FeatureSettings:
    kind: str = FEATURES_TFIDF
    min_df: int = 2
    max_df_ratio: float = 0.95
    pca_components: int = 300


@dataclass
class ModelSettings:
    kind: str = "logreg"
    epochs: int = 100
    learning_rate: float = 0.1
    l2: float = 1e-4
    svm_epochs: int = 50
    lam: float = 1e-4


@dataclass
class SmoteSettings:
    enabled: bool = True
    k: int = 5


@dataclass
class LdaSettings:
    k: int = 8
    k_range: tuple[int, int] | None = None
    alpha: float | None = None
    beta: float = 0.01
    iterations: int = 1000
    burn_in: int = 500
    sample_every: int = 10
    min_df: int = 5
    max_df_ratio: float = 0.5
    infer_iterations: int = 100


@dataclass
class CoherenceSettings:
    measure: str = "umass"
    top_n: int = 10
    window: int = 10


@dataclass
class TrendSettings:
    origin: date | None = None
    top_m: int = 3


@dataclass
class RunConfig:
    seed: int = 42
    out: str = "out"
    threads: int = 1
    data: DataPaths = field(default_factory=DataPaths)
    preprocess: PreprocessSettings = field(default_factory=PreprocessSettings)
    split: SplitSpec = field(default_factory=SplitSpec)
    features: FeatureSettings = field(default_factory=FeatureSettings)
    model: ModelSettings = field(default_factory=ModelSettings)
    smote: SmoteSettings = field(default_factory=SmoteSettings)
    cv_folds: int = 5
    lda: LdaSettings = field(default_factory=LdaSettings)
    coherence: CoherenceSettings = field(default_factory=CoherenceSettings)
    trends: TrendSettings = field(default_factory=TrendSettings)
    themes: dict = field(default_factory=dict)

    def theme_names(self, k: int) -> list[str]:
        """Per-topic display names; configured themes fill in by 1-based index."""
        return [self.themes.get(t + 1, f"Topic {t + 1}") for t in range(k)]


_KNOWN_KEYS = {
    "run": {"seed", "out", "threads"},
    "data": {"corpus", "format", "stoplist", "keywords", "embeddings", "timeline"},
    "preprocess": {"min_tokens", "strip_urls", "strip_mentions_hashmarks", "strip_non_ascii"},
    "split": {"train", "test", "val", "stratified"},
    "features": {"kind", "min_df", "max_df_ratio", "pca_components"},
    "model": {"kind", "epochs", "learning_rate", "l2", "svm_epochs", "lambda"},
    "smote": {"enabled", "k"},
    "cv": {"folds"},
    "lda": {"k", "k_range", "alpha", "beta", "iterations", "burn_in", "sample_every",
            "min_df", "max_df_ratio", "infer_iterations"},
    "coherence": {"measure", "top_n", "window"},
    "trends": {"origin", "top_m"},
    "themes": None,
}


class _Section(object):
    """Typed accessors over one INI section; blank values read as unset."""

    def __init__(self, parser: configparser.ConfigParser, name: str) -> None:
        self.name = name
        self.raw = dict(parser[name]) if parser.has_section(name) else {}

    def get(self, key: str) -> str | None:
        value = self.raw.get(key, "").strip()
        return value or None

    def _typed(self, key: str, caster, kind: str):
        value = self.get(key)
        if value is None:
            return None
        try:
            return caster(value)
        except ValueError as exc:
            raise ConfigError(f"[{self.name}] {key} = {value!r} is not a valid {kind}") from exc

    def get_int(self, key: str) -> int | None:
        return self._typed(key, int, "integer")

    def get_float(self, key: str) -> float | None:
        return self._typed(key, float, "number")

    def get_bool(self, key: str) -> bool | None:
        value = self.get(key)
        if value is None:
            return None
        lowered = value.lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"[{self.name}] {key} = {value!r} is not a valid boolean")

    def get_date(self, key: str) -> date | None:
        value = self.get(key)
        if value is None:
            return None
        try:
            return date.fromisoformat(value)
        except ValueError as exc:
            raise ConfigError(f"[{self.name}] {key} = {value!r} is not a valid date") from exc


def _parse_k_range(value: str | None, where: str) -> tuple[int, int] | None:
    if value is None:
        return None
    parts = value.split("..")
    if len(parts) != 2:
        raise ConfigError(f"{where}: expected '<lo>..<hi>', got {value!r}")
    try:
        lo, hi = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ConfigError(f"{where}: non-integer bound in {value!r}") from exc
    if not (1 <= lo <= hi):
        raise ConfigError(f"{where}: need 1 <= lo <= hi, got {value!r}")
    return lo, hi


def load_config(path: str | Path) -> RunConfig:
    """Parse an INI config file into a RunConfig, rejecting unknown keys."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with path.open("r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"{path}: unknown section [{section}]")
        allowed = _KNOWN_KEYS[section]
        if allowed is None:
            continue
        for key in parser[section]:
            if key not in allowed:
                raise ConfigError(f"{path}: unknown key {key!r} in section [{section}]")

    cfg = RunConfig()
    run = _Section(parser, "run")
    cfg.seed = run.get_int("seed") if run.get("seed") is not None else cfg.seed
    cfg.out = run.get("out") or cfg.out
    cfg.threads = run.get_int("threads") if run.get("threads") is not None else cfg.threads
    if cfg.threads < 1:
        raise ConfigError(f"[run] threads must be >= 1, got {cfg.threads}")

    data = _Section(parser, "data")
    fmt = data.get("format")
    if fmt is not None and fmt not in ("jsonl", "csv"):
        raise ConfigError(f"[data] format must be jsonl or csv, got {fmt!r}")
    cfg.data = DataPaths(
        corpus=data.get("corpus"),
        format=fmt,
        stoplist=data.get("stoplist"),
        keywords=data.get("keywords"),
        embeddings=data.get("embeddings"),
        timeline=data.get("timeline"),
    )

    pre = _Section(parser, "preprocess")
    defaults = PreprocessSettings()
    cfg.preprocess = PreprocessSettings(
        min_tokens=pre.get_int("min_tokens") if pre.get("min_tokens") is not None else defaults.min_tokens,
        strip_urls=pre.get_bool("strip_urls") if pre.get("strip_urls") is not None else defaults.strip_urls,
        strip_mentions_hashmarks=(
            pre.get_bool("strip_mentions_hashmarks")
            if pre.get("strip_mentions_hashmarks") is not None
            else defaults.strip_mentions_hashmarks
        ),
        strip_non_ascii=(
            pre.get_bool("strip_non_ascii")
            if pre.get("strip_non_ascii") is not None
            else defaults.strip_non_ascii
        ),
    )

    sp = _Section(parser, "split")
    base = SplitSpec()
    cfg.split = SplitSpec(
        train_frac=sp.get_float("train") if sp.get("train") is not None else base.train_frac,
        test_frac=sp.get_float("test") if sp.get("test") is not None else base.test_frac,
        val_frac=sp.get_float("val") if sp.get("val") is not None else base.val_frac,
        stratified=sp.get_bool("stratified") if sp.get("stratified") is not None else base.stratified,
    )
    cfg.split.validate()

    feats = _Section(parser, "features")
    fdef = FeatureSettings()
    kind = feats.get("kind") or fdef.kind
    if kind not in (FEATURES_TFIDF, FEATURES_EMBEDDINGS):
        raise ConfigError(f"[features] kind must be tfidf or embeddings, got {kind!r}")
    cfg.features = FeatureSettings(
        kind=kind,
        min_df=feats.get_int("min_df") if feats.get("min_df") is not None else fdef.min_df,
        max_df_ratio=(feats.get_float("max_df_ratio")
                      if feats.get("max_df_ratio") is not None else fdef.max_df_ratio),
        pca_components=(feats.get_int("pca_components")
                        if feats.get("pca_components") is not None else fdef.pca_components),
    )

    model = _Section(parser, "model")
    mdef = ModelSettings()
    mkind = model.get("kind") or mdef.kind
    if mkind not in ("logreg", "svm"):
        raise ConfigError(f"[model] kind must be logreg or svm, got {mkind!r}")
    cfg.model = ModelSettings(
        kind=mkind,
        epochs=model.get_int("epochs") if model.get("epochs") is not None else mdef.epochs,
        learning_rate=(model.get_float("learning_rate")
                       if model.get("learning_rate") is not None else mdef.learning_rate),
        l2=model.get_float("l2") if model.get("l2") is not None else mdef.l2,
        svm_epochs=(model.get_int("svm_epochs")
                    if model.get("svm_epochs") is not None else mdef.svm_epochs),
        lam=model.get_float("lambda") if model.get("lambda") is not None else mdef.lam,
    )

    sm = _Section(parser, "smote")
    sdef = SmoteSettings()
    cfg.smote = SmoteSettings(
        enabled=sm.get_bool("enabled") if sm.get("enabled") is not None else sdef.enabled,
        k=sm.get_int("k") if sm.get("k") is not None else sdef.k,
    )

    cv = _Section(parser, "cv")
    cfg.cv_folds = cv.get_int("folds") if cv.get("folds") is not None else cfg.cv_folds

    lda = _Section(parser, "lda")
    ldef = LdaSettings()
    cfg.lda = LdaSettings(
        k=lda.get_int("k") if lda.get("k") is not None else ldef.k,
        k_range=_parse_k_range(lda.get("k_range"), "[lda] k_range"),
        alpha=lda.get_float("alpha"),
        beta=lda.get_float("beta") if lda.get("beta") is not None else ldef.beta,
        iterations=lda.get_int("iterations") if lda.get("iterations") is not None else ldef.iterations,
        burn_in=lda.get_int("burn_in") if lda.get("burn_in") is not None else ldef.burn_in,
        sample_every=(lda.get_int("sample_every")
                      if lda.get("sample_every") is not None else ldef.sample_every),
        min_df=lda.get_int("min_df") if lda.get("min_df") is not None else ldef.min_df,
        max_df_ratio=(lda.get_float("max_df_ratio")
                      if lda.get("max_df_ratio") is not None else ldef.max_df_ratio),
        infer_iterations=(lda.get_int("infer_iterations")
                          if lda.get("infer_iterations") is not None else ldef.infer_iterations),
    )

    coh = _Section(parser, "coherence")
    cdef = CoherenceSettings()
    measure = coh.get("measure") or cdef.measure
    if measure not in ("umass", "npmi"):
        raise ConfigError(f"[coherence] measure must be umass or npmi, got {measure!r}")
    cfg.coherence = CoherenceSettings(
        measure=measure,
        top_n=coh.get_int("top_n") if coh.get("top_n") is not None else cdef.top_n,
        window=coh.get_int("window") if coh.get("window") is not None else cdef.window,
    )

    tr = _Section(parser, "trends")
    tdef = TrendSettings()
    cfg.trends = TrendSettings(
        origin=tr.get_date("origin"),
        top_m=tr.get_int("top_m") if tr.get("top_m") is not None else tdef.top_m,
    )

    themes: dict[int, str] = {}
    if parser.has_section("themes"):
        for key, value in parser["themes"].items():
            if not key.startswith("topic_"):
                raise ConfigError(f"[themes] keys must look like topic_<n>, got {key!r}")
            try:
                idx = int(key[len("topic_"):])
            except ValueError as exc:
                raise ConfigError(f"[themes] keys must look like topic_<n>, got {key!r}") from exc
            if idx < 1:
                raise ConfigError(f"[themes] topic indices are 1-based, got {key!r}")
            themes[idx] = value.strip()
    cfg.themes = themes
    return cfg
