"""Prompt construction and completion-endpoint probing for the 3-label task.

The default template renders the instruction block, optional worked
examples, and the target question/answer pair, ending at "### Response:".
Completions map back to labels by whole-token scan; anything with zero or
several distinct label tokens counts as unmapped.

Clients implement send(prompt, params) -> str. The replay client serves
recorded completions keyed by a digest of (prompt, params), so parameter
changes invalidate recordings and test runs never touch the network.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Protocol, Sequence, Union

from .corpus import Label, tokenize
from .distant import QAInstance
from .errors import (
    AlignmentError,
    InsufficientShotsError,
    MissingRecordingError,
    TransportError,
)

PROMPT_PREAMBLE = (
    "Below is an instruction and a yes-no question-answer pair input. "
    "Write a response that appropriately completes the request."
)

PROMPT_INSTRUCTION = (
    "I need you to help me understand indirect answers to yes-no questions. "
    "Indirect answers can be interpreted with three meanings: Yes, No, and Middle. "
    "Simply reply Yes, No or Middle based on the question and answer."
)

PROMPT_CLOSING_QUESTION = "Does the answer mean Yes, No or Middle?"


@dataclass(frozen=True)
class GenerationParams:
    temperature: float = 0.1
    top_p: float = 0.1
    max_tokens: int = 4

    def to_dict(self) -> dict:
        return {
            "temperature": self.temperature,
            "top_p": self.top_p,
            "max_tokens": self.max_tokens,
        }


@dataclass(frozen=True)
class PromptTemplate:
    preamble: str = PROMPT_PREAMBLE
    instruction_text: str = PROMPT_INSTRUCTION
    closing_question: str = PROMPT_CLOSING_QUESTION
    shot_examples: tuple[tuple[str, str, Label], ...] = ()


def _input_block(question: str, answer: str, closing_question: str) -> str:
    return (
        "### Input:\n\n"
        f'Question: "{question}"\n\n'
        f'Answer: "{answer}"\n\n'
        f"{closing_question}\n\n"
        "### Response:"
    )


def build_prompt(instance: QAInstance, template: PromptTemplate = PromptTemplate(), shots: int = 0) -> str:
    """Byte-deterministic prompt: instruction, `shots` worked examples,
    then the target pair, ending at "### Response:"."""
    if shots > len(template.shot_examples):
        raise InsufficientShotsError(
            f"requested {shots} shots but template has {len(template.shot_examples)} examples"
        )
    parts = [
        template.preamble,
        f"### Instruction: {template.instruction_text}",
    ]
    for question, answer, label in template.shot_examples[:shots]:
        block = _input_block(question, answer, template.closing_question)
        parts.append(f"{block} {label.value.capitalize()}")
    parts.append(_input_block(instance.question, instance.answer, template.closing_question))
    return "\n\n".join(parts)


@dataclass(frozen=True)
class MappedResponse:
    raw: str
    label: Optional[Label]  # None means unmapped

    @property
    def is_unmapped(self) -> bool:
        return self.label is None


def map_response(raw: str) -> MappedResponse:
    """Scan lowercased whole tokens for yes/no/middle; exactly one distinct
    candidate maps, zero or several leave the response unmapped."""
    candidates = {
        token.lower()
        for token in tokenize(raw)
        if token.lower() in ("yes", "no", "middle")
    }
    if len(candidates) == 1:
        return MappedResponse(raw=raw, label=Label(candidates.pop()))
    return MappedResponse(raw=raw, label=None)


class CompletionClient(Protocol):
    def send(self, prompt: str, params: GenerationParams) -> str: ...

    def identity(self) -> str: ...


def recording_key(prompt: str, params: GenerationParams) -> str:
    payload = json.dumps(
        {"prompt": prompt, "params": params.to_dict()}, sort_keys=True
    ).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


class ReplayClient:
    """Serves completions from a recorded store; never touches the network."""

    def __init__(self, store: Union[dict, str, Path]):
        if isinstance(store, (str, Path)):
            self.path = Path(store)
            self.store: dict[str, str] = json.loads(self.path.read_text(encoding="utf-8"))
        else:
            self.path = None
            self.store = dict(store)

    def send(self, prompt: str, params: GenerationParams) -> str:
        key = recording_key(prompt, params)
        if key not in self.store:
            raise MissingRecordingError(f"no recording for prompt digest {key}")
        return self.store[key]

    def identity(self) -> str:
        return f"replay:{self.path or 'memory'}"


class RecordingClient:
    """Wraps a live client and captures (digest -> completion) pairs."""

    def __init__(self, inner: CompletionClient):
        self.inner = inner
        self.store: dict[str, str] = {}

    def send(self, prompt: str, params: GenerationParams) -> str:
        completion = self.inner.send(prompt, params)
        self.store[recording_key(prompt, params)] = completion
        return completion

    def identity(self) -> str:
        return f"recording({self.inner.identity()})"

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(
            json.dumps(self.store, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )


class LiveClient:
    """HTTP POST client for a completion endpoint.

    Endpoint and credential come from arguments or the YNKIT_LLM_ENDPOINT /
    YNKIT_LLM_API_KEY environment variables. Accepts {"completion": ...},
    OpenAI-style {"choices": [{"text": ...}]} and chat-style
    {"choices": [{"message": {"content": ...}}]} response bodies.
    """

    def __init__(
        self,
        endpoint: Optional[str] = None,
        api_key: Optional[str] = None,
        max_retries: int = 3,
        backoff_seconds: float = 1.0,
        sleeper: Callable[[float], None] = time.sleep,
    ):
        self.endpoint = endpoint or os.environ.get("YNKIT_LLM_ENDPOINT")
        if not self.endpoint:
            raise TransportError(
                "no completion endpoint configured (set YNKIT_LLM_ENDPOINT)"
            )
        self.api_key = api_key or os.environ.get("YNKIT_LLM_API_KEY")
        self.max_retries = max_retries
        self.backoff_seconds = backoff_seconds
        self.sleeper = sleeper

    def send(self, prompt: str, params: GenerationParams) -> str:
        import requests

        body = {"prompt": prompt, **params.to_dict()}
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        last_error: Optional[Exception] = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                self.sleeper(self.backoff_seconds * 2 ** (attempt - 1))
            try:
                response = requests.post(
                    self.endpoint, json=body, headers=headers, timeout=60
                )
                response.raise_for_status()
                return self._extract(response.json())
            except (requests.RequestException, ValueError, KeyError) as exc:
                last_error = exc
        raise TransportError(
            f"completion request failed after {self.max_retries + 1} attempts: {last_error}"
        )

    @staticmethod
    def _extract(payload: dict) -> str:
        if "completion" in payload:
            return payload["completion"]
        choice = payload["choices"][0]
        if "text" in choice:
            return choice["text"]
        return choice["message"]["content"]

    def identity(self) -> str:
        return f"live:{self.endpoint}"


@dataclass(frozen=True)
class ProbeResult:
    responses: tuple[MappedResponse, ...]
    unmapped_count: int
    manifest: dict


def probe_benchmark(
    instances: Sequence[QAInstance],
    template: PromptTemplate,
    shots: int,
    client: CompletionClient,
    params: GenerationParams = GenerationParams(),
    concurrency: int = 1,
) -> ProbeResult:
    """One mapped response per instance, in input order regardless of
    completion order."""
    prompts = [build_prompt(inst, template, shots) for inst in instances]
    if concurrency <= 1:
        completions = [client.send(p, params) for p in prompts]
    else:
        with ThreadPoolExecutor(max_workers=concurrency) as pool:
            completions = list(pool.map(lambda p: client.send(p, params), prompts))
    responses = tuple(map_response(c) for c in completions)
    unmapped = sum(1 for r in responses if r.is_unmapped)
    manifest = {
        "client": client.identity(),
        "params": params.to_dict(),
        "shots": shots,
        "n": len(instances),
        "unmapped": unmapped,
    }
    return ProbeResult(responses=responses, unmapped_count=unmapped, manifest=manifest)


def align_for_scoring(
    gold: Sequence[Label],
    responses: Sequence[MappedResponse],
    policy: str = "exclude",
) -> tuple[list[Label], list[Label], int]:
    """Pair gold labels with mapped predictions for scoring.

    policy="exclude" drops unmapped responses (count returned);
    policy="wrong" scores each unmapped response as a deterministic
    incorrect label instead.
    """
    if policy not in ("exclude", "wrong"):
        raise ValueError("policy must be 'exclude' or 'wrong'")
    if len(gold) != len(responses):
        raise AlignmentError(f"gold has {len(gold)} items, predictions {len(responses)}")
    kept_gold: list[Label] = []
    kept_pred: list[Label] = []
    excluded = 0
    for g, r in zip(gold, responses):
        if r.label is not None:
            kept_gold.append(g)
            kept_pred.append(r.label)
        elif policy == "wrong":
            kept_gold.append(g)
            kept_pred.append(next(l for l in Label if l != g))
        else:
            excluded += 1
    return kept_gold, kept_pred, excluded
