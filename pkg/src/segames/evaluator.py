"""Self-explanation quality scoring on the 0-3 scale.

Screening flags (any flag forces score 0):
    too_short    fewer content words than the configured minimum
    too_similar  word overlap with the target sentence at or above the ceiling
    irrelevant   no similarity signal (word or vector) reaches the floor

Unflagged explanations are laddered: 1 if they engage only the target
sentence, 2 if they also bridge to the prior text, 3 if the bridge comes
with enough novel content words (elaboration evidence).

All thresholds live in ScoringConfig and can be recalibrated without code
changes.  The vector space is an optional plugin; a tf-idf space over the
content store's texts is provided as the default implementation.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Protocol, Sequence


class EvaluatorError(Exception):
    pass


class EmptyTarget(EvaluatorError):
    pass


class EmptyCorpus(EvaluatorError):
    pass


@dataclass(frozen=True)
class ScoringConfig:
    min_content_words: int = 5
    sim_ceiling: float = 0.8
    relevance_floor: float = 0.1
    prior_bonus_floor: float = 0.15
    excellent_novel_floor: int = 8
    stopword_list: str = "default"

    def validate(self) -> None:
        for name in ("sim_ceiling", "relevance_floor", "prior_bonus_floor"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0,1), got {v}")
        if self.min_content_words < 1 or self.excellent_novel_floor < 1:
            raise ValueError("count thresholds must be >= 1")


@dataclass(frozen=True)
class Evaluation:
    score: int
    too_short: bool
    too_similar: bool
    irrelevant: bool
    features: Dict[str, float] = field(default_factory=dict, compare=False)

    @property
    def flagged(self) -> bool:
        return self.too_short or self.too_similar or self.irrelevant


class VectorSpacePlugin(Protocol):
    def embed(self, text: str): ...
    def cosine(self, a, b) -> float: ...


_TOKEN_RE = re.compile(r"[0-9a-z]+")


def content_words(text: str, stopwords: Iterable[str]) -> List[str]:
    """Lowercase, split on non-alphanumeric runs, drop stopwords, keep dups."""
    stop = stopwords if isinstance(stopwords, (set, frozenset)) else set(stopwords)
    return [tok for tok in _TOKEN_RE.findall(text.lower()) if tok not in stop]


def overlap(a: Sequence[str], b: Sequence[str]) -> float:
    """Fraction of a's distinct tokens that also appear in b; 0 if a is empty."""
    da = set(a)
    if not da:
        return 0.0
    return len(da & set(b)) / len(da)


class Evaluator:
    def __init__(self, stopwords: Iterable[str], config: ScoringConfig = ScoringConfig(),
                 plugin: Optional[VectorSpacePlugin] = None):
        config.validate()
        self.stopwords = frozenset(w.lower() for w in stopwords)
        self.config = config
        self.plugin = plugin

    def evaluate(self, se: str, target: str, prior: str) -> Evaluation:
        if not target.strip():
            raise EmptyTarget("target sentence must be non-empty")
        cfg = self.config

        se_tokens = content_words(se, self.stopwords)
        target_tokens = content_words(target, self.stopwords)
        prior_tokens = content_words(prior, self.stopwords)

        content_len = len(se_tokens)
        sim_target = overlap(se_tokens, target_tokens)
        sim_prior = overlap(se_tokens, prior_tokens)
        known = set(target_tokens) | set(prior_tokens)
        novel_count = sum(1 for tok in se_tokens if tok not in known)

        features: Dict[str, float] = {
            "content_len": float(content_len),
            "sim_target": sim_target,
            "sim_prior": sim_prior,
            "novel_count": float(novel_count),
        }

        cos_text = None
        if self.plugin is not None:
            full_text = (prior + " " + target).strip()
            se_vec = self.plugin.embed(se)
            cos_target = self.plugin.cosine(se_vec, self.plugin.embed(target))
            cos_text = self.plugin.cosine(se_vec, self.plugin.embed(full_text))
            features["cos_target"] = cos_target
            features["cos_text"] = cos_text

        too_short = content_len < cfg.min_content_words
        too_similar = sim_target >= cfg.sim_ceiling
        relevance = max(sim_target, sim_prior, cos_text if cos_text is not None else 0.0)
        irrelevant = relevance < cfg.relevance_floor

        if too_short or too_similar or irrelevant:
            score = 0
        elif sim_prior < cfg.prior_bonus_floor:
            score = 1
        elif novel_count >= cfg.excellent_novel_floor:
            score = 3
        else:
            score = 2

        return Evaluation(score=score, too_short=too_short, too_similar=too_similar,
                          irrelevant=irrelevant, features=features)


class TfIdfVectorSpace:
    """Default vector space: tf-idf over the content store's texts.

    Stand-in for a trained semantic space; cosine of nonnegative tf-idf
    vectors is already in [0,1], negatives would be clamped to 0.
    """

    def __init__(self, corpus: Sequence[str], stopwords: Iterable[str] = ()):
        docs = [content_words(doc, frozenset(stopwords)) for doc in corpus]
        docs = [d for d in docs if d]
        if not docs:
            raise EmptyCorpus("vector space needs at least one non-empty document")
        self._stopwords = frozenset(stopwords)
        df: Counter = Counter()
        for d in docs:
            df.update(set(d))
        n = len(docs)
        self._idf = {tok: math.log((1 + n) / (1 + c)) + 1.0 for tok, c in df.items()}
        self._default_idf = math.log(1 + n) + 1.0  # unseen terms

    def embed(self, text: str) -> Dict[str, float]:
        counts = Counter(content_words(text, self._stopwords))
        return {tok: tf * self._idf.get(tok, self._default_idf) for tok, tf in counts.items()}

    def cosine(self, a: Dict[str, float], b: Dict[str, float]) -> float:
        na = math.sqrt(sum(v * v for v in a.values()))
        nb = math.sqrt(sum(v * v for v in b.values()))
        if na == 0.0 or nb == 0.0:
            return 0.0
        dot = sum(v * b.get(k, 0.0) for k, v in a.items())
        return max(0.0, min(1.0, dot / (na * nb)))
