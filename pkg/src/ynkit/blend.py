"""Training curricula: gold-only, merged, and blended plans.

A blended plan runs m blending epochs in which the gold fraction decays
per epoch (geometric by default, f_i = alpha^(i-1)) while every epoch
carries all distant instances, followed by n epochs of distant instances
only. The gold subset is redrawn fresh each blending epoch; the distant
cap, when set, subsamples the distant pool once before planning.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .distant import QAInstance, instance_to_dict, read_instances, write_instances
from .errors import EmptyPlanError, InvalidConfigError

STRATEGIES = ("gold_only", "merged", "blended")
SCHEDULES = ("geometric", "linear")


@dataclass(frozen=True)
class BlendConfig:
    alpha: float
    m: int  # blending epochs
    n: int  # pure distant epochs
    seed: int
    distant_cap: Optional[int] = None
    schedule: str = "geometric"

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidConfigError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.m < 1:
            raise InvalidConfigError(f"m must be >= 1, got {self.m}")
        if self.n < 0:
            raise InvalidConfigError(f"n must be >= 0, got {self.n}")
        if self.distant_cap is not None and self.distant_cap <= 0:
            raise InvalidConfigError(f"distant_cap must be > 0, got {self.distant_cap}")
        if self.schedule not in SCHEDULES:
            raise InvalidConfigError(f"schedule must be one of {SCHEDULES}")


@dataclass(frozen=True)
class EpochDataset:
    gold_count: int
    distant_count: int
    instances: tuple[QAInstance, ...]

    def __post_init__(self):
        if self.gold_count + self.distant_count != len(self.instances):
            raise InvalidConfigError("epoch counts do not add up to instance count")


@dataclass(frozen=True)
class TrainingPlan:
    epochs: tuple[EpochDataset, ...]
    strategy: str
    provenance: dict

    def __len__(self) -> int:
        return len(self.epochs)


def round_half_away_from_zero(x: float) -> int:
    """Deterministic rounding: 12.5 -> 13, unlike banker's round()."""
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


def gold_fraction(alpha: float, epoch_index: int, schedule: str = "geometric") -> float:
    """Fraction of gold instances for 1-based blending epoch epoch_index."""
    if schedule == "geometric":
        return alpha ** (epoch_index - 1)
    return max(0.0, 1.0 - (1.0 - alpha) * (epoch_index - 1))


def _rng(seed: int, *scope: object) -> random.Random:
    # str seeds hash deterministically across processes; tuple seeds do not
    return random.Random(":".join(str(part) for part in (seed, *scope)))


def _apply_cap(distant: Sequence[QAInstance], cap: Optional[int], seed: int) -> list[QAInstance]:
    if cap is None or cap >= len(distant):
        return list(distant)
    return _rng(seed, "cap").sample(list(distant), cap)


def _epoch(gold_part: list[QAInstance], distant_part: list[QAInstance], seed: int, index: int) -> EpochDataset:
    instances = gold_part + distant_part
    _rng(seed, "epoch", index).shuffle(instances)
    return EpochDataset(
        gold_count=len(gold_part),
        distant_count=len(distant_part),
        instances=tuple(instances),
    )


def build_merged_plan(
    gold: Sequence[QAInstance],
    distant: Sequence[QAInstance],
    epochs: int,
    seed: int,
    distant_cap: Optional[int] = None,
    strategy: str = "merged",
) -> TrainingPlan:
    """Every epoch carries all gold plus all (capped) distant instances,
    reshuffled per epoch."""
    if epochs < 1:
        raise InvalidConfigError(f"epochs must be >= 1, got {epochs}")
    if not gold and not distant:
        raise EmptyPlanError("merged plan needs at least one instance")
    capped = _apply_cap(distant, distant_cap, seed)
    plan_epochs = tuple(
        _epoch(list(gold), list(capped), seed, i) for i in range(1, epochs + 1)
    )
    provenance = {
        "strategy": strategy,
        "alpha": None,
        "m": None,
        "n": None,
        "epochs": epochs,
        "seed": seed,
        "cap": distant_cap,
    }
    return TrainingPlan(epochs=plan_epochs, strategy=strategy, provenance=provenance)


def build_gold_plan(gold: Sequence[QAInstance], epochs: int, seed: int) -> TrainingPlan:
    """Gold data only; the degenerate merge with an empty distant pool."""
    return build_merged_plan(gold, [], epochs, seed, strategy="gold_only")


def build_blended_plan(
    gold: Sequence[QAInstance],
    distant: Sequence[QAInstance],
    config: BlendConfig,
) -> TrainingPlan:
    """m blending epochs with decaying gold fractions, then n distant-only
    epochs. Epoch 1 always contains every gold instance."""
    if not gold or not distant:
        raise InvalidConfigError("blended plan needs non-empty gold and distant pools")
    capped = _apply_cap(distant, config.distant_cap, config.seed)
    plan_epochs = []
    for i in range(1, config.m + 1):
        fraction = gold_fraction(config.alpha, i, config.schedule)
        count = min(len(gold), round_half_away_from_zero(fraction * len(gold)))
        subset = _rng(config.seed, "gold", i).sample(list(gold), count)
        plan_epochs.append(_epoch(subset, list(capped), config.seed, i))
    for i in range(config.m + 1, config.m + config.n + 1):
        plan_epochs.append(_epoch([], list(capped), config.seed, i))
    provenance = {
        "strategy": "blended",
        "alpha": config.alpha,
        "m": config.m,
        "n": config.n,
        "epochs": config.m + config.n,
        "seed": config.seed,
        "cap": config.distant_cap,
        "schedule": config.schedule,
    }
    return TrainingPlan(epochs=tuple(plan_epochs), strategy="blended", provenance=provenance)


def export_plan(plan: TrainingPlan, directory: Union[str, Path]) -> list[Path]:
    """Write epoch_000.jsonl ... plus plan.json; byte-identical re-export
    for identical inputs."""
    if not plan.epochs:
        raise EmptyPlanError("cannot export a plan with no epochs")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for i, epoch in enumerate(plan.epochs):
        path = directory / f"epoch_{i:03d}.jsonl"
        write_instances(epoch.instances, path)
        written.append(path)
    manifest = dict(plan.provenance)
    manifest["epoch_sizes"] = [len(e.instances) for e in plan.epochs]
    manifest["gold_counts"] = [e.gold_count for e in plan.epochs]
    plan_path = directory / "plan.json"
    plan_path.write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    written.append(plan_path)
    return written


def load_plan(directory: Union[str, Path]) -> TrainingPlan:
    """Reconstruct a TrainingPlan from an exported directory.

    Gold/distant counts per epoch come from plan.json; instance identity
    within each epoch file is preserved in order.
    """
    directory = Path(directory)
    plan_path = directory / "plan.json"
    if not plan_path.exists():
        raise EmptyPlanError(f"no plan.json under {directory}")
    manifest = json.loads(plan_path.read_text(encoding="utf-8"))
    epoch_paths = sorted(directory.glob("epoch_*.jsonl"))
    if not epoch_paths:
        raise EmptyPlanError(f"no epoch files under {directory}")
    epochs = []
    for i, path in enumerate(epoch_paths):
        instances = tuple(read_instances(path))
        gold_count = manifest.get("gold_counts", [None] * len(epoch_paths))[i]
        if gold_count is None:
            gold_count = sum(1 for inst in instances if inst.source == "gold")
        epochs.append(
            EpochDataset(
                gold_count=gold_count,
                distant_count=len(instances) - gold_count,
                instances=instances,
            )
        )
    strategy = manifest.get("strategy", "merged")
    return TrainingPlan(epochs=tuple(epochs), strategy=strategy, provenance=manifest)


def plan_instances_digest(plan: TrainingPlan) -> str:
    """Stable content digest used by tests to compare plans."""
    h = hashlib.sha256()
    for epoch in plan.epochs:
        for inst in epoch.instances:
            h.update(json.dumps(instance_to_dict(inst), sort_keys=True).encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()
