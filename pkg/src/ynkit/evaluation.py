"""Classification metrics: per-label P/R/F1, Cohen's kappa, McNemar's test.

The chi-square(1) upper tail is computed through the complementary error
function, so no statistics dependency is needed; agreement with standard
tables is within 1e-10 absolute.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Sequence, Union

from .corpus import LABEL_ORDER, Label
from .errors import AlignmentError, DegenerateMarginalsError


@dataclass(frozen=True)
class ConfusionMatrix:
    labels: tuple[Label, ...]
    counts: tuple[tuple[int, ...], ...]  # counts[gold][predicted]

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)


@dataclass(frozen=True)
class EvalReport:
    per_label: dict[Label, tuple[float, float, float]]  # (precision, recall, f1)
    macro_f1: float
    weighted_f1: float
    accuracy: float
    n: int
    confusion: ConfusionMatrix

    def to_dict(self) -> dict:
        return {
            "per_label": {
                label.value: {"precision": p, "recall": r, "f1": f}
                for label, (p, r, f) in self.per_label.items()
            },
            "macro_f1": self.macro_f1,
            "weighted_f1": self.weighted_f1,
            "accuracy": self.accuracy,
            "n": self.n,
        }


@dataclass(frozen=True)
class KappaResult:
    kappa: float
    observed_agreement: float
    expected_agreement: float
    # fraction of *disagreements* per unordered label pair; empty when the
    # annotators never disagree
    disagreement_breakdown: dict[tuple[Label, Label], float]

    @property
    def polar_vs_middle_fraction(self) -> float:
        """Fraction of disagreements pitting Yes or No against Middle."""
        return sum(
            fraction
            for pair, fraction in self.disagreement_breakdown.items()
            if Label.MIDDLE in pair
        )

    @property
    def yes_vs_no_fraction(self) -> float:
        return self.disagreement_breakdown.get((Label.NO, Label.YES), 0.0)


@dataclass(frozen=True)
class McNemarResult:
    b: int  # A correct, B wrong
    c: int  # A wrong, B correct
    statistic: float
    p_value: float
    method: str

    def to_dict(self) -> dict:
        return {
            "b": self.b,
            "c": self.c,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "method": self.method,
        }


def _check_aligned(*sequences: Sequence[Label]) -> int:
    lengths = {len(s) for s in sequences}
    if len(lengths) != 1:
        raise AlignmentError(f"sequences differ in length: {sorted(lengths)}")
    n = lengths.pop()
    if n < 1:
        raise AlignmentError("need at least one scored instance")
    return n


def confusion_matrix(gold: Sequence[Label], predicted: Sequence[Label]) -> ConfusionMatrix:
    _check_aligned(gold, predicted)
    index = {label: i for i, label in enumerate(LABEL_ORDER)}
    counts = [[0] * len(LABEL_ORDER) for _ in LABEL_ORDER]
    for g, p in zip(gold, predicted):
        counts[index[g]][index[p]] += 1
    return ConfusionMatrix(
        labels=LABEL_ORDER, counts=tuple(tuple(row) for row in counts)
    )


def score(
    gold: Sequence[Label],
    predicted: Sequence[Label],
    absent_label_policy: str = "zero",
) -> EvalReport:
    """Per-label precision/recall/F1 plus macro, weighted, and accuracy.

    Zero denominators score 0. A label absent from both gold and
    predictions scores F1 1.0 only under absent_label_policy="one";
    the default keeps it at 0 and still averages over all three labels.
    """
    if absent_label_policy not in ("zero", "one"):
        raise ValueError("absent_label_policy must be 'zero' or 'one'")
    n = _check_aligned(gold, predicted)
    cm = confusion_matrix(gold, predicted)
    per_label: dict[Label, tuple[float, float, float]] = {}
    f1s = []
    weighted = 0.0
    for i, label in enumerate(cm.labels):
        tp = cm.counts[i][i]
        gold_count = sum(cm.counts[i])
        pred_count = sum(row[i] for row in cm.counts)
        precision = tp / pred_count if pred_count else 0.0
        recall = tp / gold_count if gold_count else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        if absent_label_policy == "one" and gold_count == 0 and pred_count == 0:
            precision = recall = f1 = 1.0
        per_label[label] = (precision, recall, f1)
        f1s.append(f1)
        weighted += gold_count * f1
    accuracy = sum(cm.counts[i][i] for i in range(len(cm.labels))) / n
    return EvalReport(
        per_label=per_label,
        macro_f1=sum(f1s) / len(f1s),
        weighted_f1=weighted / n,
        accuracy=accuracy,
        n=n,
        confusion=cm,
    )


def cohens_kappa(ann_a: Sequence[Label], ann_b: Sequence[Label]) -> KappaResult:
    """Chance-corrected agreement between two annotators."""
    n = _check_aligned(ann_a, ann_b)
    observed = sum(1 for a, b in zip(ann_a, ann_b) if a == b) / n
    expected = 0.0
    for label in LABEL_ORDER:
        pa = sum(1 for a in ann_a if a == label) / n
        pb = sum(1 for b in ann_b if b == label) / n
        expected += pa * pb
    if math.isclose(expected, 1.0, abs_tol=1e-15):
        if math.isclose(observed, 1.0, abs_tol=1e-15):
            kappa = 1.0
        else:
            raise DegenerateMarginalsError(
                "expected agreement is 1 while observed agreement is not"
            )
    else:
        kappa = (observed - expected) / (1.0 - expected)

    disagreements = [(a, b) for a, b in zip(ann_a, ann_b) if a != b]
    breakdown: dict[tuple[Label, Label], float] = {}
    if disagreements:
        pair_counts: dict[tuple[Label, Label], int] = {}
        for a, b in disagreements:
            pair = tuple(sorted((a, b), key=lambda l: l.value))
            pair_counts[pair] = pair_counts.get(pair, 0) + 1
        breakdown = {
            pair: count / len(disagreements) for pair, count in pair_counts.items()
        }
    return KappaResult(
        kappa=kappa,
        observed_agreement=observed,
        expected_agreement=expected,
        disagreement_breakdown=breakdown,
    )


def chi2_sf_1df(statistic: float) -> float:
    """Upper tail of the chi-square distribution with one degree of freedom."""
    return math.erfc(math.sqrt(statistic / 2.0))


def _binomial_two_sided(k: int, n: int) -> float:
    """Two-sided exact binomial(n, 1/2) p-value for observing min-count k."""
    if n == 0:
        return 1.0
    tail = sum(math.comb(n, i) for i in range(0, k + 1)) / 2**n
    return min(1.0, 2.0 * tail)


def mcnemar(
    gold: Sequence[Label],
    pred_a: Sequence[Label],
    pred_b: Sequence[Label],
    method: str = "continuity_corrected_chi2",
) -> McNemarResult:
    """Paired significance test over discordant prediction pairs.

    b counts instances A got right and B got wrong; c the reverse.
    b + c = 0 yields p = 1.0 rather than an error.
    """
    if method not in ("continuity_corrected_chi2", "exact_binomial"):
        raise ValueError(f"unknown method {method!r}")
    _check_aligned(gold, pred_a, pred_b)
    b = sum(1 for g, a, p in zip(gold, pred_a, pred_b) if a == g and p != g)
    c = sum(1 for g, a, p in zip(gold, pred_a, pred_b) if a != g and p == g)
    if method == "continuity_corrected_chi2":
        if b + c == 0 or abs(b - c) <= 1:
            statistic = 0.0
            p_value = 1.0
        else:
            statistic = (abs(b - c) - 1) ** 2 / (b + c)
            p_value = chi2_sf_1df(statistic)
    else:
        statistic = float(min(b, c))
        p_value = _binomial_two_sided(min(b, c), b + c)
    return McNemarResult(b=b, c=c, statistic=statistic, p_value=p_value, method=method)


def compare_runs(
    gold: Sequence[Label],
    preds: dict[str, Sequence[Label]],
    method: str = "continuity_corrected_chi2",
) -> dict:
    """EvalReport per system plus pairwise McNemar tests, as a JSON-ready
    dict; render_comparison() turns it into an aligned text table."""
    reports = {name: score(gold, p) for name, p in preds.items()}
    pairwise = []
    for name_a, name_b in combinations(sorted(preds), 2):
        result = mcnemar(gold, preds[name_a], preds[name_b], method=method)
        pairwise.append({"system_a": name_a, "system_b": name_b, **result.to_dict()})
    return {
        "systems": {name: report.to_dict() for name, report in reports.items()},
        "pairwise_mcnemar": pairwise,
    }


def render_comparison(comparison: dict) -> str:
    header = f"{'system':<24} {'macro_f1':>9} {'weighted':>9} {'accuracy':>9} {'n':>7}"
    lines = [header, "-" * len(header)]
    for name in sorted(comparison["systems"]):
        r = comparison["systems"][name]
        lines.append(
            f"{name:<24} {r['macro_f1']:>9.4f} {r['weighted_f1']:>9.4f} "
            f"{r['accuracy']:>9.4f} {r['n']:>7d}"
        )
    if comparison["pairwise_mcnemar"]:
        lines.append("")
        lines.append(f"{'pair':<34} {'b':>5} {'c':>5} {'stat':>9} {'p':>9}")
        for row in comparison["pairwise_mcnemar"]:
            pair = f"{row['system_a']} vs {row['system_b']}"
            lines.append(
                f"{pair:<34} {row['b']:>5d} {row['c']:>5d} "
                f"{row['statistic']:>9.4f} {row['p_value']:>9.4f}"
            )
    return "\n".join(lines)


def write_report(report_dict: dict, path: Union[str, Path]) -> None:
    Path(path).write_text(
        json.dumps(report_dict, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
