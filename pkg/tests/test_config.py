"""Config parsing: defaults, INI round trips, and typo rejection."""

from datetime import date

import pytest

from topicflow.config import (
    FEATURES_EMBEDDINGS,
    FEATURES_TFIDF,
    RunConfig,
    load_config,
)
from topicflow.errors import ConfigError


def write_config(tmp_path, text):
    path = tmp_path / "run.ini"
    path.write_text(text, encoding="utf-8")
    return path


def test_defaults():
    cfg = RunConfig()
    assert cfg.seed == 42
    assert cfg.out == "out"
    assert cfg.threads == 1
    assert cfg.preprocess.min_tokens == 1
    assert cfg.split.train_frac == 0.75
    assert cfg.split.test_frac == 0.15
    assert cfg.split.val_frac == 0.10
    assert cfg.split.stratified is True
    assert cfg.features.kind == FEATURES_TFIDF
    assert cfg.features.min_df == 2
    assert cfg.features.max_df_ratio == 0.95
    assert cfg.features.pca_components == 300
    assert cfg.model.kind == "logreg"
    assert cfg.smote.enabled is True
    assert cfg.smote.k == 5
    assert cfg.cv_folds == 5
    assert cfg.lda.k == 8
    assert cfg.lda.k_range is None
    assert cfg.lda.alpha is None
    assert cfg.lda.beta == 0.01
    assert cfg.lda.iterations == 1000
    assert cfg.lda.burn_in == 500
    assert cfg.lda.sample_every == 10
    assert cfg.coherence.measure == "umass"
    assert cfg.coherence.top_n == 10
    assert cfg.trends.origin is None
    assert cfg.trends.top_m == 3
    assert cfg.themes == {}


def test_empty_file_gives_defaults(tmp_path):
    cfg = load_config(write_config(tmp_path, ""))
    assert cfg.seed == RunConfig().seed
    assert cfg.lda.k == RunConfig().lda.k


def test_full_parse(tmp_path):
    cfg = load_config(write_config(tmp_path, """
[run]
seed = 7
out = results
threads = 2

[data]
corpus = data/c.jsonl
format = csv
stoplist = stop.txt
keywords = kw.txt
embeddings = emb.vec
timeline = tl.json

[preprocess]
min_tokens = 3
strip_urls = false
strip_mentions_hashmarks = no
strip_non_ascii = off

[split]
train = 0.6
test = 0.2
val = 0.2
stratified = false

[features]
kind = embeddings
min_df = 4
max_df_ratio = 0.8
pca_components = 50

[model]
kind = svm
epochs = 11
learning_rate = 0.05
l2 = 0.001
svm_epochs = 12
lambda = 0.002

[smote]
enabled = false
k = 3

[cv]
folds = 4

[lda]
k = 6
k_range = 4..9
alpha = 0.2
beta = 0.05
iterations = 200
burn_in = 100
sample_every = 5
min_df = 2
max_df_ratio = 0.4
infer_iterations = 30

[coherence]
measure = npmi
top_n = 8
window = 15

[trends]
origin = 2020-02-03
top_m = 2

[themes]
topic_1 = Case counts
topic_3 = Vaccines
"""))
    assert cfg.seed == 7
    assert cfg.out == "results"
    assert cfg.threads == 2
    assert cfg.data.corpus == "data/c.jsonl"
    assert cfg.data.format == "csv"
    assert cfg.data.stoplist == "stop.txt"
    assert cfg.data.keywords == "kw.txt"
    assert cfg.data.embeddings == "emb.vec"
    assert cfg.data.timeline == "tl.json"
    assert cfg.preprocess.min_tokens == 3
    assert cfg.preprocess.strip_urls is False
    assert cfg.preprocess.strip_mentions_hashmarks is False
    assert cfg.preprocess.strip_non_ascii is False
    assert cfg.split.train_frac == 0.6
    assert cfg.split.test_frac == 0.2
    assert cfg.split.val_frac == 0.2
    assert cfg.split.stratified is False
    assert cfg.features.kind == FEATURES_EMBEDDINGS
    assert cfg.features.min_df == 4
    assert cfg.features.max_df_ratio == 0.8
    assert cfg.features.pca_components == 50
    assert cfg.model.kind == "svm"
    assert cfg.model.epochs == 11
    assert cfg.model.learning_rate == 0.05
    assert cfg.model.l2 == 0.001
    assert cfg.model.svm_epochs == 12
    assert cfg.model.lam == 0.002
    assert cfg.smote.enabled is False
    assert cfg.smote.k == 3
    assert cfg.cv_folds == 4
    assert cfg.lda.k == 6
    assert cfg.lda.k_range == (4, 9)
    assert cfg.lda.alpha == 0.2
    assert cfg.lda.beta == 0.05
    assert cfg.lda.iterations == 200
    assert cfg.lda.burn_in == 100
    assert cfg.lda.sample_every == 5
    assert cfg.lda.min_df == 2
    assert cfg.lda.max_df_ratio == 0.4
    assert cfg.lda.infer_iterations == 30
    assert cfg.coherence.measure == "npmi"
    assert cfg.coherence.top_n == 8
    assert cfg.coherence.window == 15
    assert cfg.trends.origin == date(2020, 2, 3)
    assert cfg.trends.top_m == 2
    assert cfg.themes == {1: "Case counts", 3: "Vaccines"}


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "nope.ini")


def test_malformed_ini(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write_config(tmp_path, "seed = 1\n"))


def test_unknown_section(tmp_path):
    with pytest.raises(ConfigError, match=r"unknown section \[modle\]"):
        load_config(write_config(tmp_path, "[modle]\nkind = svm\n"))


def test_unknown_key(tmp_path):
    with pytest.raises(ConfigError, match=r"unknown key 'sede' in section \[run\]"):
        load_config(write_config(tmp_path, "[run]\nsede = 9\n"))


def test_bad_int(tmp_path):
    with pytest.raises(ConfigError, match="not a valid integer"):
        load_config(write_config(tmp_path, "[run]\nseed = forty-two\n"))


def test_bad_float(tmp_path):
    with pytest.raises(ConfigError, match="not a valid number"):
        load_config(write_config(tmp_path, "[model]\nlearning_rate = fast\n"))


def test_bad_bool(tmp_path):
    with pytest.raises(ConfigError, match="not a valid boolean"):
        load_config(write_config(tmp_path, "[smote]\nenabled = maybe\n"))


def test_bad_date(tmp_path):
    with pytest.raises(ConfigError, match="not a valid date"):
        load_config(write_config(tmp_path, "[trends]\norigin = 2020/01/01\n"))


def test_bool_spellings(tmp_path):
    cfg = load_config(write_config(tmp_path, "[smote]\nenabled = On\n"))
    assert cfg.smote.enabled is True
    cfg = load_config(write_config(tmp_path, "[smote]\nenabled = 0\n"))
    assert cfg.smote.enabled is False


def test_threads_must_be_positive(tmp_path):
    with pytest.raises(ConfigError, match="threads"):
        load_config(write_config(tmp_path, "[run]\nthreads = 0\n"))


def test_bad_format(tmp_path):
    with pytest.raises(ConfigError, match="format"):
        load_config(write_config(tmp_path, "[data]\nformat = xml\n"))


def test_bad_feature_kind(tmp_path):
    with pytest.raises(ConfigError, match="tfidf or embeddings"):
        load_config(write_config(tmp_path, "[features]\nkind = bow\n"))


def test_bad_model_kind(tmp_path):
    with pytest.raises(ConfigError, match="logreg or svm"):
        load_config(write_config(tmp_path, "[model]\nkind = tree\n"))


def test_bad_coherence_measure(tmp_path):
    with pytest.raises(ConfigError, match="umass or npmi"):
        load_config(write_config(tmp_path, "[coherence]\nmeasure = cv\n"))


def test_k_range_parse(tmp_path):
    cfg = load_config(write_config(tmp_path, "[lda]\nk_range = 2..8\n"))
    assert cfg.lda.k_range == (2, 8)


@pytest.mark.parametrize("value", ["5", "5..", "..5", "5..4", "0..3", "a..b", "1..2..3"])
def test_k_range_rejects(tmp_path, value):
    with pytest.raises(ConfigError, match="k_range"):
        load_config(write_config(tmp_path, f"[lda]\nk_range = {value}\n"))


def test_split_must_sum_to_one(tmp_path):
    with pytest.raises(ConfigError, match="sum to 1"):
        load_config(write_config(tmp_path, "[split]\ntrain = 0.5\ntest = 0.3\nval = 0.3\n"))


def test_split_negative_fraction(tmp_path):
    with pytest.raises(ConfigError, match=">= 0"):
        load_config(write_config(tmp_path, "[split]\ntrain = 1.2\ntest = -0.3\nval = 0.1\n"))


def test_blank_value_keeps_default(tmp_path):
    cfg = load_config(write_config(tmp_path, "[run]\nseed =\n\n[trends]\norigin =\n"))
    assert cfg.seed == 42
    assert cfg.trends.origin is None


def test_theme_names_fill_gaps(tmp_path):
    cfg = load_config(write_config(tmp_path, "[themes]\ntopic_2 = Lockdowns\n"))
    assert cfg.theme_names(3) == ["Topic 1", "Lockdowns", "Topic 3"]


@pytest.mark.parametrize("key", ["theme_1", "topic_x", "topic_0", "topic_-1"])
def test_theme_key_rejects(tmp_path, key):
    with pytest.raises(ConfigError, match="themes"):
        load_config(write_config(tmp_path, f"[themes]\n{key} = Name\n"))
