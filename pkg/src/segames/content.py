"""Content store: practice texts, strategy definitions, event cards, stopwords.

All content lives in one directory:

    texts/*.json     one practice text per file
    strategies.json  list of strategy definitions with CMB reason lists
    event_cards.json list of {"label", "delta"} cards
    stopwords.txt    one stopword per line

Content is immutable after load.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional


class ContentError(Exception):
    pass


class ParseError(ContentError):
    pass


class ValidationError(ContentError):
    pass


class IndexOutOfRange(ContentError):
    pass


@dataclass(frozen=True)
class PracticeText:
    id: str
    title: str
    sentences: tuple
    target_indices: tuple
    bonus_target_index: Optional[int] = None


@dataclass(frozen=True)
class Reason:
    id: str
    text: str


@dataclass(frozen=True)
class StrategyDef:
    id: str
    name: str
    description: str
    reasons: tuple  # of Reason


@dataclass(frozen=True)
class EventCard:
    label: str
    delta: int


@dataclass
class ContentBundle:
    texts: Dict[str, PracticeText]
    strategies: Dict[str, StrategyDef]
    event_cards: List[EventCard]
    stopwords: frozenset
    content_hash: str = ""

    @property
    def strategy_ids(self) -> List[str]:
        return list(self.strategies.keys())

    def text_ids(self) -> List[str]:
        return list(self.texts.keys())


def default_content_dir() -> str:
    return os.path.join(os.path.dirname(__file__), "data")


def prior_text(text: PracticeText, target_index: int) -> str:
    """All sentences strictly before the target, space-joined."""
    if not 0 <= target_index < len(text.sentences):
        raise IndexOutOfRange(f"{text.id}: sentence index {target_index}")
    return " ".join(text.sentences[:target_index])


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}: {exc.msg}") from exc


def _validate_text(path: str, raw: dict) -> PracticeText:
    for key in ("id", "title", "sentences", "target_indices"):
        if key not in raw:
            raise ValidationError(f"{path}: missing field {key!r}")
    sentences = tuple(raw["sentences"])
    targets = tuple(raw["target_indices"])
    if not targets:
        raise ValidationError(f"{path}: text needs at least one target sentence")
    if list(targets) != sorted(set(targets)):
        raise ValidationError(f"{path}: target_indices must be strictly increasing")
    for t in targets:
        if not 0 <= t < len(sentences):
            raise ValidationError(f"{path}: target index {t} out of range")
    bonus = raw.get("bonus_target_index")
    if bonus is not None and not 0 <= bonus < len(sentences):
        raise ValidationError(f"{path}: bonus target index {bonus} out of range")
    return PracticeText(id=raw["id"], title=raw["title"], sentences=sentences,
                        target_indices=targets, bonus_target_index=bonus)


def load_content(content_dir: str, event_delta_bound: int = 3) -> ContentBundle:
    if not os.path.isdir(content_dir):
        raise ContentError(f"content directory not found: {content_dir}")

    texts: Dict[str, PracticeText] = {}
    texts_dir = os.path.join(content_dir, "texts")
    for name in sorted(os.listdir(texts_dir)):
        if not name.endswith(".json"):
            continue
        path = os.path.join(texts_dir, name)
        text = _validate_text(path, _load_json(path))
        if text.id in texts:
            raise ValidationError(f"{path}: duplicate text id {text.id!r}")
        texts[text.id] = text

    strategies: Dict[str, StrategyDef] = {}
    spath = os.path.join(content_dir, "strategies.json")
    for raw in _load_json(spath):
        reasons = tuple(Reason(r["id"], r["text"]) for r in raw.get("reasons", []))
        if not reasons:
            raise ValidationError(f"{spath}: strategy {raw.get('id')!r} has no reasons")
        strat = StrategyDef(id=raw["id"], name=raw["name"],
                            description=raw.get("description", ""), reasons=reasons)
        if strat.id in strategies:
            raise ValidationError(f"{spath}: duplicate strategy id {strat.id!r}")
        strategies[strat.id] = strat
    if not strategies:
        raise ValidationError(f"{spath}: no strategies defined")

    cards: List[EventCard] = []
    cpath = os.path.join(content_dir, "event_cards.json")
    for raw in _load_json(cpath):
        delta = int(raw["delta"])
        if delta == 0 or abs(delta) > event_delta_bound:
            raise ValidationError(f"{cpath}: card {raw.get('label')!r} delta {delta} out of bounds")
        cards.append(EventCard(label=raw["label"], delta=delta))
    if not cards:
        raise ValidationError(f"{cpath}: no event cards defined")

    with open(os.path.join(content_dir, "stopwords.txt"), encoding="utf-8") as fh:
        stopwords = frozenset(line.strip().lower() for line in fh if line.strip())

    digest = hashlib.sha256()
    for tid in sorted(texts):
        digest.update(repr(texts[tid]).encode())
    for sid in sorted(strategies):
        digest.update(repr(strategies[sid]).encode())
    for card in cards:
        digest.update(repr(card).encode())
    digest.update(repr(sorted(stopwords)).encode())

    return ContentBundle(texts=texts, strategies=strategies, event_cards=cards,
                         stopwords=stopwords, content_hash=digest.hexdigest())
