"""Single entry point exposing the pipeline stages as subcommands.

Exit codes: 0 success, 1 domain errors (bad inputs, missing files),
2 usage errors. Diagnostics go to stderr; data goes to files or stdout.
A flat key=value config file can seed any flag default; explicit flags
win.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import blend, distant, evaluation, llm_probe, model, qid
from .corpus import Label, load_corpus, parse_label
from .errors import YnkitError

log = logging.getLogger("ynkit")

DEFAULT_SEED = 1729  # fixed so bare runs are reproducible; override with --seed


def _read_config_file(path: str) -> dict:
    """Parse a flat key = value file (strings, ints, floats, booleans)."""
    values: dict = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise YnkitError(f"{path}: line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip().strip('"').strip("'")
        if value.lower() in ("true", "false"):
            values[key] = value.lower() == "true"
        else:
            try:
                values[key] = int(value)
            except ValueError:
                try:
                    values[key] = float(value)
                except ValueError:
                    values[key] = value
    return values


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("-v", "--verbose", action="count", default=0)


def _setup_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(message)s")


def _log_effective(args: argparse.Namespace) -> None:
    shown = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    print(f"config: {shown}", file=sys.stderr)


def _cmd_identify(args) -> int:
    corpus = load_corpus(args.corpus)
    mode = {"acts": "dialogue_act"}.get(args.mode, args.mode)
    matches, stats = qid.scan_corpus(
        corpus, mode, sample_size=args.sample, seed=args.seed
    )
    qid.write_matches(matches, args.out)
    if args.audit:
        qid.write_audit_sample(stats, args.audit)
    log.info("scanned %d turns, %d matches", stats.total_turns, stats.match_count)
    print(
        json.dumps(
            {
                "total_turns": stats.total_turns,
                "match_count": stats.match_count,
                "sample_size": len(stats.precision_sample),
                "mode": mode,
            }
        )
    )
    return 0


def _cmd_distill(args) -> int:
    corpus = load_corpus(args.corpus)
    matches = qid.load_matches(args.matches, corpus)
    config = distant.DistantConfig(context_window=args.context_window)
    instances = distant.extract_distant_instances(corpus, matches, config)
    if args.balance:
        instances = distant.balance_dataset(instances, seed=args.seed)
    distant.write_instances(instances, args.out)
    log.info("extracted %d distant instances", len(instances))
    print(json.dumps({"instances": len(instances), "balanced": bool(args.balance)}))
    return 0


def _cmd_plan(args) -> int:
    gold = distant.read_instances(args.gold) if args.gold else []
    distant_pool = distant.read_instances(args.distant) if args.distant else []
    if args.strategy == "blended":
        config = blend.BlendConfig(
            alpha=args.alpha,
            m=args.m,
            n=args.n,
            seed=args.seed,
            distant_cap=args.cap,
        )
        plan = blend.build_blended_plan(gold, distant_pool, config)
    else:
        plan = blend.build_merged_plan(
            gold, distant_pool, epochs=args.epochs, seed=args.seed, distant_cap=args.cap
        )
    blend.export_plan(plan, args.out)
    sizes = [len(e.instances) for e in plan.epochs]
    log.info("exported %d epochs to %s", len(plan.epochs), args.out)
    print(json.dumps({"strategy": plan.strategy, "epoch_sizes": sizes}))
    return 0


def _cmd_train(args) -> int:
    plan = blend.load_plan(args.plan)
    ngram_orders = tuple(int(n) for n in str(args.ngrams).split(","))
    fields = tuple(f.strip() for f in str(args.fields).split(","))
    config = model.TrainConfig(
        learning_rate=args.lr,
        l2=args.l2,
        num_buckets=args.buckets,
        ngram_orders=ngram_orders,
        fields_used=fields,
        seed=args.seed,
    )
    trained = model.train(plan, config)
    model.save_model(trained, args.out)
    log.info("trained on %d epochs, wrote %s", len(plan.epochs), args.out)
    print(json.dumps({"epochs": len(plan.epochs), "model": str(args.out)}))
    return 0


def _cmd_predict(args) -> int:
    trained = model.load_model(args.model)
    instances = distant.read_instances(args.infile)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    with Path(args.out).open("w", encoding="utf-8") as handle:
        for inst in instances:
            label, probs = model.predict(trained, inst)
            handle.write(
                json.dumps(
                    {
                        "label": label.value,
                        "probs": {k.value: v for k, v in probs.items()},
                        "origin": {
                            "dialogue_id": inst.origin_ids[0],
                            "question_turn_id": inst.origin_ids[1],
                            "answer_turn_id": inst.origin_ids[2],
                        },
                    },
                    sort_keys=True,
                )
                + "\n"
            )
    print(json.dumps({"predicted": len(instances)}))
    return 0


def _read_pred_labels(path: str) -> list[Optional[Label]]:
    labels: list[Optional[Label]] = []
    with Path(path).open("r", encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            obj = json.loads(line)
            value = obj.get("label")
            labels.append(parse_label(value) if value is not None else None)
    return labels


def _cmd_evaluate(args) -> int:
    gold_instances = distant.read_instances(args.gold)
    gold = [inst.label for inst in gold_instances]
    if any(label is None for label in gold):
        raise YnkitError(f"{args.gold}: every gold instance needs a label")
    preds = _read_pred_labels(args.pred)
    responses = [
        llm_probe.MappedResponse(raw="", label=p) for p in preds
    ]
    gold_kept, pred_kept, excluded = llm_probe.align_for_scoring(
        gold, responses, policy=args.unmapped
    )
    report = evaluation.score(gold_kept, pred_kept).to_dict()
    if excluded:
        report["excluded_unmapped"] = excluded
    if args.pred2:
        preds2 = _read_pred_labels(args.pred2)
        if any(p is None for p in preds) or any(p is None for p in preds2):
            raise YnkitError("mcnemar comparison requires fully mapped predictions")
        method = (
            "exact_binomial" if args.mcnemar == "exact" else "continuity_corrected_chi2"
        )
        result = evaluation.mcnemar(gold, preds, preds2, method=method)
        report["mcnemar"] = result.to_dict()
        report["system_b"] = evaluation.score(gold, preds2).to_dict()
    evaluation.write_report(report, args.out)
    print(json.dumps({"macro_f1": report["macro_f1"], "n": report["n"]}))
    return 0


def _cmd_probe(args) -> int:
    instances = distant.read_instances(args.infile)
    template = llm_probe.PromptTemplate()
    if args.shots:
        if not args.shot_examples:
            raise YnkitError("--shots requires --shot-examples with labeled instances")
        shot_instances = distant.read_instances(args.shot_examples)
        examples = []
        for inst in shot_instances:
            if inst.label is None:
                raise YnkitError("shot examples must be labeled")
            examples.append((inst.question, inst.answer, inst.label))
        template = llm_probe.PromptTemplate(shot_examples=tuple(examples))
    if args.client == "replay":
        client = llm_probe.ReplayClient(args.store)
    else:
        client = llm_probe.LiveClient(endpoint=args.endpoint)
    result = llm_probe.probe_benchmark(
        instances, template, args.shots, client, concurrency=args.concurrency
    )
    with Path(args.out).open("w", encoding="utf-8") as handle:
        for response in result.responses:
            handle.write(
                json.dumps(
                    {
                        "label": response.label.value if response.label else None,
                        "raw": response.raw,
                    },
                    sort_keys=True,
                )
                + "\n"
            )
    manifest_path = Path(args.out).with_suffix(".manifest.json")
    manifest_path.write_text(
        json.dumps(result.manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    print(json.dumps({"probed": len(result.responses), "unmapped": result.unmapped_count}))
    return 0


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="ynkit",
        description="Yes-no question pipelines: identify, distill, plan, train, predict, evaluate, probe.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    registry: dict[str, argparse.ArgumentParser] = {}

    p = sub.add_parser("identify", help="scan a corpus for yes-no questions")
    p.add_argument("--corpus", required=True)
    p.add_argument("--mode", choices=["relaxed", "strict", "acts"], default="relaxed")
    p.add_argument("--sample", type=int, default=200)
    p.add_argument("--out", required=True)
    p.add_argument("--audit")
    _add_common(p)
    p.set_defaults(func=_cmd_identify)

    p = sub.add_parser("distill", help="extract distant instances from strict matches")
    p.add_argument("--corpus", required=True)
    p.add_argument("--matches", required=True)
    p.add_argument("--balance", action="store_true")
    p.add_argument("--context-window", type=int, default=1)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_distill)

    p = sub.add_parser("plan", help="build a training curriculum")
    p.add_argument("--gold")
    p.add_argument("--distant")
    p.add_argument("--strategy", choices=["merged", "blended"], default="merged")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--epochs", type=int, default=5, help="epoch count for merged plans")
    p.add_argument("--cap", type=int)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("train", help="train the linear classifier on a plan")
    p.add_argument("--plan", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--l2", type=float, default=1e-6)
    p.add_argument("--buckets", type=int, default=2**18)
    p.add_argument("--ngrams", default="1,2")
    p.add_argument("--fields", default="context,question,answer")
    _add_common(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="predict labels for instances")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("evaluate", help="score predictions against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--pred2")
    p.add_argument("--mcnemar", choices=["chi2", "exact"], default="chi2")
    p.add_argument("--unmapped", choices=["exclude", "wrong"], default="exclude")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("probe", help="prompt a completion endpoint")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--shots", type=int, default=0)
    p.add_argument("--shot-examples", help="jsonl of labeled shot instances")
    p.add_argument("--client", choices=["live", "replay"], default="replay")
    p.add_argument("--store", help="replay store JSON file")
    p.add_argument("--endpoint", help="live endpoint URL")
    p.add_argument("--concurrency", type=int, default=1)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_probe)

    registry.update(
        identify=sub.choices["identify"],
        distill=sub.choices["distill"],
        plan=sub.choices["plan"],
        train=sub.choices["train"],
        predict=sub.choices["predict"],
        evaluate=sub.choices["evaluate"],
        probe=sub.choices["probe"],
    )
    return parser, registry


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, registry = build_parser()

    # pre-scan for --config so file values become defaults, flags still win
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv)
    if known.config:
        try:
            file_values = _read_config_file(known.config)
        except FileNotFoundError:
            print(f"error: config file not found: {known.config}", file=sys.stderr)
            return 1
        except YnkitError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        for sub_parser in registry.values():
            sub_parser.set_defaults(
                **{k: v for k, v in file_values.items() if k != "config"}
            )

    args = parser.parse_args(argv)
    _setup_logging(args.verbose)
    _log_effective(args)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return 1
    except YnkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())
