"""Yes-no question identification over dialogue corpora.

Three modes:
  relaxed      question-side lexical rules only
  strict       relaxed rules plus a direct-answer check on the next turn
  dialogue_act gold dialogue-act tags (SWDA / MRDA style label sets)

Matching is whole-token on lowercased text; contractions such as "don't"
are single tokens, so the auxiliary list enumerates negated forms
explicitly and "no" never fires inside "nobody".
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .corpus import Corpus, Turn, split_sentences, tokenize
from .errors import CorpusFormatError, NotAnnotatedError

DEFAULT_AUXILIARY_VERBS = frozenset(
    {
        "do", "does", "did", "don't", "doesn't", "didn't",
        "is", "isn't", "are", "aren't", "was", "wasn't", "were", "weren't",
        "have", "haven't", "has", "hasn't",
        "can", "can't", "could", "couldn't",
        "will", "won't", "would", "wouldn't",
        "may", "might",
    }
)

DEFAULT_WH_WORDS = frozenset(
    {"what", "when", "where", "which", "who", "whom", "whose", "why", "how"}
)

DEFAULT_ANSWER_KEYWORDS = frozenset(
    {"yes", "yea", "yup", "yep", "yeah", "sure", "no", "nope"}
)

# Dialogue-act tags marking yes-no questions, matched verbatim.
SWDA_YES_NO_ACTS = frozenset(
    {
        "qh", "qy", "qy^d", "^g", "qy^t", "qy^r", "qy^m", "qy^h", "qy^c",
        "qy^2", "qy(^q)", "qy^g", "qy^g^t", "qy^g^r", "qy^g^c",
        "qy^d^t", "qy^d^r", "qy^d^m", "qy^d^h", "qy^d^c", "qy^d(^q)",
        "qy^c^r",
    }
)

MRDA_YES_NO_ACTS = frozenset({"qy", "g"})

MODES = ("relaxed", "strict", "dialogue_act")


@dataclass(frozen=True)
class QidRuleConfig:
    """Lexical rule grammar for yes-no question identification."""

    auxiliary_verbs: frozenset[str] = DEFAULT_AUXILIARY_VERBS
    wh_words: frozenset[str] = DEFAULT_WH_WORDS
    min_token_count_exclusive: int = 3
    answer_keywords: frozenset[str] = DEFAULT_ANSWER_KEYWORDS
    answer_sentence_window: int = 2

    def __post_init__(self):
        overlap = self.auxiliary_verbs & self.wh_words
        if overlap:
            raise ValueError(f"auxiliary_verbs and wh_words overlap: {sorted(overlap)}")


@dataclass(frozen=True)
class DialogueActConfig:
    """Dialogue-act labels that mark a turn as a yes-no question."""

    yes_no_act_labels: frozenset[str] = field(
        default_factory=lambda: frozenset(SWDA_YES_NO_ACTS | MRDA_YES_NO_ACTS)
    )


@dataclass(frozen=True)
class QidMatch:
    question: Turn
    answer: Optional[Turn]  # next turn in the same dialogue, when it exists
    mode: str
    has_direct_answer: bool


@dataclass(frozen=True)
class QidStats:
    total_turns: int
    match_count: int
    precision_sample: tuple[QidMatch, ...]
    sample_seed: int


def is_yes_no_question_relaxed(turn: Turn, config: QidRuleConfig = QidRuleConfig()) -> bool:
    """Question-side rules: auxiliary present, no wh-word, more than
    min_token_count_exclusive tokens, and text ends in '?'."""
    stripped = turn.text.rstrip()
    if not stripped.endswith("?"):
        return False
    tokens = [t.lower() for t in tokenize(turn.text)]
    if len(tokens) <= config.min_token_count_exclusive:
        return False
    if any(t in config.wh_words for t in tokens):
        return False
    return any(t in config.auxiliary_verbs for t in tokens)


def has_direct_answer(next_turn: Turn, config: QidRuleConfig = QidRuleConfig()) -> bool:
    """True iff a polar keyword appears as a whole token within the first
    answer_sentence_window sentences of the turn."""
    sentences = split_sentences(next_turn.text)[: config.answer_sentence_window]
    for sentence in sentences:
        for token in tokenize(sentence):
            if token.lower() in config.answer_keywords:
                return True
    return False


def identify_by_dialogue_acts(turn: Turn, config: DialogueActConfig = DialogueActConfig()) -> bool:
    """Exact-string match of the turn's gold dialogue act against the
    configured yes-no labels."""
    if turn.dialogue_act is None:
        raise NotAnnotatedError(
            f"turn {turn.turn_id!r} carries no dialogue-act annotation"
        )
    return turn.dialogue_act in config.yes_no_act_labels


def scan_corpus(
    corpus: Corpus,
    mode: str,
    rule_config: QidRuleConfig = QidRuleConfig(),
    act_config: DialogueActConfig = DialogueActConfig(),
    sample_size: int = 200,
    seed: int = 0,
) -> tuple[list[QidMatch], QidStats]:
    """Scan every turn, in (dialogue_id, ordinal) order, for yes-no questions.

    Strict mode requires a next turn in the same dialogue that passes
    has_direct_answer; the next-turn lookup never crosses dialogue
    boundaries. The precision sample is drawn uniformly without
    replacement, seeded, for manual audit.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if sample_size < 0:
        raise ValueError("sample_size must be >= 0")
    if mode == "dialogue_act":
        if all(t.dialogue_act is None for d in corpus for t in d.turns):
            raise NotAnnotatedError("corpus carries no dialogue-act annotations")

    matches: list[QidMatch] = []
    for dialogue in corpus:
        for i, turn in enumerate(dialogue.turns):
            next_turn = dialogue.turns[i + 1] if i + 1 < len(dialogue.turns) else None
            if mode == "dialogue_act":
                if turn.dialogue_act is None:
                    continue
                if not identify_by_dialogue_acts(turn, act_config):
                    continue
            else:
                if not is_yes_no_question_relaxed(turn, rule_config):
                    continue
            direct = next_turn is not None and has_direct_answer(next_turn, rule_config)
            if mode == "strict" and not direct:
                continue
            matches.append(
                QidMatch(question=turn, answer=next_turn, mode=mode, has_direct_answer=direct)
            )

    k = min(sample_size, len(matches))
    sample = tuple(random.Random(seed).sample(matches, k))
    stats = QidStats(
        total_turns=corpus.total_turns,
        match_count=len(matches),
        precision_sample=sample,
        sample_seed=seed,
    )
    return matches, stats


def write_matches(matches: list[QidMatch], path: Union[str, Path]) -> None:
    """Write matches as JSONL: {dialogue_id, question_turn_id, answer_turn_id?, mode}."""
    with Path(path).open("w", encoding="utf-8") as handle:
        for m in matches:
            obj = {
                "dialogue_id": m.question.dialogue_id,
                "question_turn_id": m.question.turn_id,
                "mode": m.mode,
            }
            if m.answer is not None:
                obj["answer_turn_id"] = m.answer.turn_id
            handle.write(json.dumps(obj, ensure_ascii=False) + "\n")


def load_matches(
    path: Union[str, Path],
    corpus: Corpus,
    rule_config: QidRuleConfig = QidRuleConfig(),
) -> list[QidMatch]:
    """Resolve a matches JSONL file back against its corpus.

    has_direct_answer is recomputed for non-strict matches (it is implied
    true for strict ones).
    """
    index = corpus.turn_index()
    matches = []
    with Path(path).open("r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            qid_ = obj["question_turn_id"]
            if qid_ not in index:
                raise CorpusFormatError(
                    f"line {lineno}: question turn {qid_!r} not in corpus"
                )
            question = index[qid_]
            answer = None
            if obj.get("answer_turn_id") is not None:
                aid = obj["answer_turn_id"]
                if aid not in index:
                    raise CorpusFormatError(
                        f"line {lineno}: answer turn {aid!r} not in corpus"
                    )
                answer = index[aid]
            mode = obj.get("mode", "relaxed")
            direct = (
                True
                if mode == "strict"
                else answer is not None and has_direct_answer(answer, rule_config)
            )
            matches.append(
                QidMatch(question=question, answer=answer, mode=mode, has_direct_answer=direct)
            )
    return matches


def write_audit_sample(stats: QidStats, path: Union[str, Path]) -> None:
    """Export the precision sample as a reviewable TSV (question, answer,
    dialogue_id); the precision judgment itself stays manual."""
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, delimiter="\t", lineterminator="\n")
        writer.writerow(["question", "answer", "dialogue_id"])
        for m in stats.precision_sample:
            writer.writerow(
                [m.question.text, m.answer.text if m.answer else "", m.question.dialogue_id]
            )
