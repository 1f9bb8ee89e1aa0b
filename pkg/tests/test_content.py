import json
import os

import pytest

from segames.content import (IndexOutOfRange, ValidationError, default_content_dir,
                             load_content, prior_text)


@pytest.fixture(scope="module")
def bundle():
    return load_content(default_content_dir())


def test_default_bundle_loads(bundle):
    assert len(bundle.texts) == 2
    assert len(bundle.strategies) == 5
    assert len(bundle.event_cards) == 16
    assert all(c.delta != 0 and -3 <= c.delta <= 3 for c in bundle.event_cards)


def test_linked_to_a_specific_sentence_present(bundle):
    reasons = {r.text for s in bundle.strategies.values() for r in s.reasons}
    assert "Linked to a specific sentence" in reasons


def test_prior_text_first_sentence_empty(bundle):
    text = next(iter(bundle.texts.values()))
    assert prior_text(text, 0) == ""


def test_prior_text_joins_earlier_sentences(bundle):
    text = bundle.texts["water_cycle"]
    assert prior_text(text, 2) == text.sentences[0] + " " + text.sentences[1]
    last = len(text.sentences) - 1
    assert prior_text(text, last) == " ".join(text.sentences[:last])


def test_prior_text_out_of_range(bundle):
    text = bundle.texts["water_cycle"]
    with pytest.raises(IndexOutOfRange):
        prior_text(text, len(text.sentences))


def _write_bundle(tmp_path, text_overrides=None, strategies=None):
    os.makedirs(tmp_path / "texts")
    text = {"id": "t1", "title": "T", "sentences": ["One.", "Two.", "Three."],
            "target_indices": [1]}
    text.update(text_overrides or {})
    (tmp_path / "texts" / "t1.json").write_text(json.dumps(text))
    (tmp_path / "strategies.json").write_text(json.dumps(
        strategies if strategies is not None else
        [{"id": "s1", "name": "S1", "reasons": [{"id": "r1", "text": "R1"}]}]))
    (tmp_path / "event_cards.json").write_text(json.dumps([{"label": "c", "delta": 1}]))
    (tmp_path / "stopwords.txt").write_text("the\na\n")
    return str(tmp_path)


def test_target_index_out_of_range_rejected(tmp_path):
    path = _write_bundle(tmp_path, {"target_indices": [3]})
    with pytest.raises(ValidationError):
        load_content(path)


def test_strategy_without_reasons_rejected(tmp_path):
    path = _write_bundle(tmp_path, strategies=[{"id": "s1", "name": "S1", "reasons": []}])
    with pytest.raises(ValidationError):
        load_content(path)


def test_reload_is_stable(bundle):
    again = load_content(default_content_dir())
    assert again.content_hash == bundle.content_hash
    assert list(again.texts) == list(bundle.texts)
