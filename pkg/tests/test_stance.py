import json
import logging
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vaxnet.stance import (
    DEFAULT_HASHTAGS,
    Hyperparams,
    LabeledExample,
    NgramLinearModel,
    StanceScore,
    consensus_filter,
    cross_validate,
    featurize,
    fnv1a_64,
    predict,
    pretrain_hashtags,
    tokenize,
    train,
    transfer,
    upsample_balance,
)
from vaxnet.stance.data import SchemaError, read_labeled_csv, read_ratings_csv, write_labeled_csv
from vaxnet.stance.evaluation import micro_f1_from_counts, report_from_counts, score_predictions, stratified_folds
from vaxnet.stance.model import loss_and_gradients
from vaxnet.stance.training import hashtag_examples
from vaxnet.synth import hashtag_corpus, planted_ratings, stance_corpus

SMALL = Hyperparams(bucket_count=1 << 12, dim=8, epochs=10, seed=0)


def test_tokenize_examples():
    assert tokenize("Vaccines WORK!") == ["vaccines", "work", "!"]
    assert tokenize("Hi @bob") == ["hi", "⟨user⟩"]
    assert tokenize("see https://x.y") == ["see", "⟨url⟩"]
    assert tokenize("#VaccinesWork rocks") == ["#vaccineswork", "rocks"]


def test_fnv_known_vectors():
    # published FNV-1a 64-bit test vectors
    assert fnv1a_64("") == 0xCBF29CE484222325
    assert fnv1a_64("a") == 0xAF63DC4C8601EC8C
    assert fnv1a_64("foobar") == 0x85944171F73967E8


def _fnv_oracle(s: str) -> int:
    h = 14695981039346656037
    for b in s.encode():
        h = ((h ^ b) * 1099511628211) % 2**64
    return h


def test_featurize_counts_and_index():
    assert len(featurize(["a"], 1, 1 << 20)) == 1
    idx = featurize(["a", "b"], 2, 1 << 20)
    assert len(idx) == 3
    assert idx[0] == _fnv_oracle("a") % (1 << 20)
    assert idx[2] == _fnv_oracle("a b") % (1 << 20)
    assert featurize(["a"], 1, 1 << 20)[0] == 0xAF63DC4C8601EC8C % (1 << 20)


def test_zero_model_is_uniform():
    m = NgramLinearModel.initialize(("anti", "pro", "neutral"), 64, 4, 2, seed=3)
    s = predict(m, "vaccines are great")
    assert s.as_tuple() == pytest.approx((1 / 3, 1 / 3, 1 / 3), abs=1e-15)
    assert predict(m, "").as_tuple() == (1 / 3, 1 / 3, 1 / 3)


def test_stance_score_validation():
    StanceScore(0.2, 0.3, 0.5)
    with pytest.raises(ValueError):
        StanceScore(0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        StanceScore(-0.1, 0.6, 0.5)


def test_fixture_model_simplex(fixtures):
    model = NgramLinearModel.load(fixtures / "model.bin")
    expected = json.loads((fixtures / "model_expected.json").read_text())
    assert list(model.class_names) == expected["class_names"]
    for text, probs in expected["proba"].items():
        np.testing.assert_allclose(model.predict_proba(text), probs, rtol=0, atol=1e-12)


def test_simplex_on_random_models():
    rng = np.random.default_rng(0)
    m = NgramLinearModel.initialize(("anti", "pro", "neutral"), 256, 6, 2, seed=1)
    m.output_weights = rng.normal(0, 5, size=m.output_weights.shape)
    m.output_bias = rng.normal(0, 5, size=3)
    words = ["vaccine", "autism", "cdc", "love", "#vaxxed", "!", "the"]
    for _ in range(500):
        text = " ".join(rng.choice(words, size=int(rng.integers(0, 8))))
        p = predict(m, text).as_tuple()
        assert min(p) >= 0 and abs(sum(p) - 1) <= 1e-6


def _loss(model, idx, label):
    return loss_and_gradients(model, idx, label)[0]


def test_gradient_check():
    rng = np.random.default_rng(42)
    for trial in range(5):
        m = NgramLinearModel.initialize(("a", "b", "c"), 32, 5, 2, seed=trial)
        m.embedding = rng.normal(0, 0.5, size=m.embedding.shape)
        m.output_weights = rng.normal(0, 0.5, size=m.output_weights.shape)
        m.output_bias = rng.normal(0, 0.5, size=3)
        idx = np.array([3, 7, 7, 20, 3, 1])
        label = trial % 3
        _, gw, gb, rows, grows = loss_and_gradients(m, idx, label)
        eps = 1e-6
        for (i, j), g in np.ndenumerate(gw):
            m.output_weights[i, j] += eps
            up = _loss(m, idx, label)
            m.output_weights[i, j] -= 2 * eps
            down = _loss(m, idx, label)
            m.output_weights[i, j] += eps
            num = (up - down) / (2 * eps)
            assert abs(num - g) <= 1e-4 * max(abs(num), abs(g), 1e-8)
        row_pos = list(rows).index(7)
        for j in range(m.dim):
            m.embedding[7, j] += eps
            up = _loss(m, idx, label)
            m.embedding[7, j] -= 2 * eps
            down = _loss(m, idx, label)
            m.embedding[7, j] += eps
            num = (up - down) / (2 * eps)
            g = grows[row_pos, j]
            assert abs(num - g) <= 1e-4 * max(abs(num), abs(g), 1e-8)


def test_train_separable_and_deterministic():
    data = stance_corpus(300, seed=1)
    m1 = train(data, SMALL)
    m2 = train(data, SMALL)
    assert m1.to_bytes() == m2.to_bytes()
    acc = np.mean([m1.predict_label(e.text) == e.label for e in data])
    assert acc == 1.0
    hist = m1.loss_history
    assert all(b <= a + 1e-9 for a, b in zip(hist, hist[1:]))


def test_lr_zero_leaves_init():
    data = stance_corpus(30, seed=1)
    hp = Hyperparams(bucket_count=256, dim=4, lr=0.0, epochs=3, seed=5)
    m = train(data, hp)
    init = NgramLinearModel.initialize(m.class_names, 256, 4, 2, seed=5)
    assert np.array_equal(m.embedding, init.embedding)
    assert not m.output_weights.any() and not m.output_bias.any()


def test_single_class_rejected():
    with pytest.raises(ValueError):
        train([LabeledExample("a", "anti"), LabeledExample("b", "anti")], SMALL)


def test_model_roundtrip_bytes(tmp_path):
    m = train(stance_corpus(30, seed=1), Hyperparams(bucket_count=128, dim=4, epochs=2))
    m.save(tmp_path / "m.bin")
    back = NgramLinearModel.load(tmp_path / "m.bin")
    assert back.to_bytes() == m.to_bytes()
    assert back.class_names == m.class_names
    data = (tmp_path / "m.bin").read_bytes()
    with pytest.raises(ValueError):
        NgramLinearModel.from_bytes(b"XXXXXXXX" + data[8:])
    with pytest.raises(ValueError):
        NgramLinearModel.from_bytes(data[:-3])


def test_upsample_balance():
    ex = [LabeledExample(str(i), lab) for lab, n in (("A", 10), ("B", 5), ("C", 2)) for i in range(n)]
    out = upsample_balance(ex, seed=3)
    assert Counter(e.label for e in out) == {"A": 10, "B": 10, "C": 10}
    assert out[: len(ex)] == ex
    assert upsample_balance(ex, seed=3) == out
    balanced = [LabeledExample(str(i), lab) for lab in "AB" for i in range(4)]
    assert upsample_balance(balanced) == balanced
    with pytest.raises(ValueError):
        upsample_balance([])


def test_hashtag_leakage_rule():
    ((tokens, tag),) = hashtag_examples(["#vaccineswork great news"], ["vaccineswork"])
    assert tag == "vaccineswork" and tokens == ["great", "news"]
    pairs = hashtag_examples(["#vaxxed #cdctruth wow"], ["vaxxed", "cdctruth"])
    assert sorted(pairs) == [(["#cdctruth", "wow"], "vaxxed"), (["#vaxxed", "wow"], "cdctruth")]


def test_default_hashtags_arity():
    assert len(DEFAULT_HASHTAGS) == 27
    texts = [f"word{i % 5} #{tag}" for i, tag in enumerate(DEFAULT_HASHTAGS * 2)]
    m = pretrain_hashtags(texts, DEFAULT_HASHTAGS, Hyperparams(bucket_count=512, dim=4, epochs=1))
    assert m.class_count == 27


def test_pretrain_drops_absent_with_warning(caplog):
    with caplog.at_level(logging.WARNING):
        m = pretrain_hashtags(["x #a", "y #b"], ["a", "b", "zzz"], Hyperparams(bucket_count=64, dim=2, epochs=1))
    assert m.class_names == ("a", "b")
    assert "zzz" in caplog.text


def test_pretrain_beats_chance():
    texts = hashtag_corpus(600, seed=2)
    train_texts, test_texts = texts[:450], texts[450:]
    hp = Hyperparams(bucket_count=1 << 14, dim=16, epochs=10)
    m = pretrain_hashtags(train_texts, DEFAULT_HASHTAGS, hp)
    pairs = hashtag_examples(test_texts, m.class_names)
    acc = np.mean([m.predict_label(" ".join(t)) == tag for t, tag in pairs])
    assert acc > 1.5 / m.class_count


def test_transfer_freeze_and_stage_toggle():
    pre = pretrain_hashtags(hashtag_corpus(200, seed=1), DEFAULT_HASHTAGS, SMALL)
    data = stance_corpus(60, seed=4)
    stage1, stage2 = transfer(pre, data, SMALL, return_stages=True)
    assert stage1.embedding.tobytes() == pre.embedding.tobytes()
    assert stage2.embedding.tobytes() != pre.embedding.tobytes()
    no_thaw = transfer(pre, data, Hyperparams(**{**SMALL.__dict__, "chain_thaw": False}))
    for attr in ("embedding", "output_weights", "output_bias"):
        assert getattr(no_thaw, attr).tobytes() == getattr(stage1, attr).tobytes()
    with pytest.raises(ValueError):
        transfer(pre, data, Hyperparams(bucket_count=1 << 11, dim=8))


def test_consensus_filter():
    kept = consensus_filter([("t1", ["anti"] * 3), ("t2", ["anti", "anti", "pro"])])
    assert kept == [LabeledExample("t1", "anti")]
    with pytest.raises(ValueError):
        consensus_filter([("t", ["anti", "anti"])])
    rows = planted_ratings(10_000, unanimous=5358, seed=0)
    assert len(consensus_filter(rows)) == 5358


def test_cross_validate_perfect_and_errors():
    data = stance_corpus(60, seed=2)

    class Oracle:
        def predict_label(self, text):
            return truth[text]

    truth = {e.text: e.label for e in data}
    rep = cross_validate(data, k=5, fit=lambda tr: Oracle())
    assert rep.micro_f1 == 1.0 and rep.accuracy == 1.0
    with pytest.raises(ValueError):
        cross_validate(data, k=25)
    binary = cross_validate(data, k=5, binary=True, fit=lambda tr: type("C", (), {
        "predict_label": lambda self, t: "anti" if truth[t] == "anti" else "not_anti"})())
    assert binary.binary and binary.accuracy == 1.0


def test_micro_f1_hand_value():
    assert micro_f1_from_counts(4, 2, 2) == pytest.approx(2 / 3)


@settings(max_examples=200)
@given(st.lists(st.tuples(st.sampled_from("abc"), st.sampled_from("abcd")), min_size=1, max_size=50))
def test_micro_f1_equals_accuracy(pairs):
    y_true, y_pred = zip(*pairs)
    rep = report_from_counts(score_predictions(y_true, y_pred, sorted(set(y_true))), 1)
    assert rep.micro_f1 == pytest.approx(rep.accuracy, abs=1e-15)


def test_stratified_folds_balanced():
    labels = ["a"] * 20 + ["b"] * 10
    folds = stratified_folds(labels, 5, seed=0)
    for f in range(5):
        members = [lab for lab, g in zip(labels, folds) if g == f]
        assert Counter(members) == {"a": 4, "b": 2}


def test_eval_report_deterministic():
    data = stance_corpus(60, seed=2)
    r1 = cross_validate(data, k=3, hp=SMALL, seed=4)
    r2 = cross_validate(data, k=3, hp=SMALL, seed=4)
    assert r1.to_json() == r2.to_json()


def test_csv_readers(tmp_path):
    write_labeled_csv([LabeledExample("a, \"b\"", "anti")], tmp_path / "l.csv")
    assert read_labeled_csv(tmp_path / "l.csv") == [LabeledExample("a, \"b\"", "anti")]
    (tmp_path / "bad.csv").write_text("text,stance\nx,anti\n")
    with pytest.raises(SchemaError, match="label"):
        read_labeled_csv(tmp_path / "bad.csv")
    (tmp_path / "r.csv").write_text("text,r1,r2\nx,a,a\n")
    with pytest.raises(SchemaError, match="r3"):
        read_ratings_csv(tmp_path / "r.csv")
