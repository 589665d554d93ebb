"""Command-line entry point: ``personasynth <command> ...``.

Exit codes: 0 ok, 1 other failure, 2 configuration error, 3 fatal backend error,
4 corrupt data.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

import yaml

from . import errors
from .dedup import apply_quality_filter, dedup_embedding, dedup_minhash
from .dedup.report import DedupReport
from .evaluation import (
    BandSpec,
    EqualityChecker,
    Producer,
    SolutionSet,
    consensus_filter,
    run_similarity_experiment,
    sample_pairs_at_band,
    solve_items,
)
from .jsonl import read_typed, write_records
from .llm import make_backend, make_embedder
from .llm.base import BackendConfig, BackendKind, Decoding, EmbeddingConfig
from .persona import Persona, SourceText, SynthesisItem
from .persona2persona import expand_graph
from .pipeline import check_lineage, load_config, run_pipeline, stats
from .pipeline.config import build
from .synthesis import Demo, Mode, SynthesisJob, derive_demo_personas, synthesize
from .text2persona import T2PConfig, run_text_to_persona

log = logging.getLogger("personasynth")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BACKEND, EXIT_DATA = 0, 1, 2, 3, 4


# --- shared option groups -----------------------------------------------------


def _add_backend_flags(p: argparse.ArgumentParser, embedding: bool = False) -> None:
    g = p.add_argument_group("backend")
    g.add_argument("--config", help="YAML file whose backend/embedding sections provide defaults")
    g.add_argument("--backend", choices=[k.value for k in BackendKind], help="completion backend kind")
    g.add_argument("--model", help="model name")
    g.add_argument("--base-url", help="OpenAI-compatible endpoint base URL")
    g.add_argument("--api-key-env", help="environment variable that holds the API key")
    g.add_argument("--cassette", help="JSONL cassette for replay or recording")
    g.add_argument("--record", action="store_true", help="record live responses into --cassette")
    g.add_argument("--max-concurrency", type=int, default=None, help="bounded in-flight requests")
    g.add_argument("--seed", type=int, default=None, help="decoding seed")
    if embedding:
        g.add_argument("--embed-backend", choices=["mock", "http_openai_compatible"])
        g.add_argument("--embed-model")
        g.add_argument("--embed-dim", type=int)


def _sections(path: str | None) -> dict:
    if not path:
        return {}
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    except FileNotFoundError:
        raise errors.ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise errors.ConfigError(f"config {path}: invalid YAML: {exc}") from None
    if not isinstance(data, dict):
        raise errors.ConfigError(f"config {path}: top level must be a mapping")
    return data


def _backend_config(args) -> BackendConfig:
    d = dict(_sections(args.config).get("backend") or {})
    for flag, key in (("backend", "kind"), ("model", "model_name"), ("base_url", "base_url"),
                      ("api_key_env", "api_key_env_var"), ("cassette", "cassette_path"),
                      ("max_concurrency", "max_concurrency")):
        v = getattr(args, flag, None)
        if v is not None:
            d[key] = v
    if getattr(args, "record", False):
        d["record"] = True
    return build(BackendConfig, d, "backend")


def _embedding_config(args) -> EmbeddingConfig:
    d = dict(_sections(args.config).get("embedding") or {})
    for flag, key in (("embed_backend", "kind"), ("embed_model", "model_name"), ("embed_dim", "dim")):
        v = getattr(args, flag, None)
        if v is not None:
            d[key] = v
    return build(EmbeddingConfig, d, "embedding")


def _workers(args) -> int:
    return args.max_concurrency or 1


def _modifiers(pairs: Sequence[str] | None) -> dict[str, str]:
    out = {}
    for kv in pairs or ():
        key, eq, value = kv.partition("=")
        if not eq or not key:
            raise errors.ConfigError(f"--modifier expects key=value, got {kv!r}")
        out[key] = value
    return out


def _personas(path: str) -> list[Persona]:
    return list(read_typed(path, Persona.from_dict))


def _summary(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


# --- commands -----------------------------------------------------------------


def cmd_ingest(args) -> int:
    try:
        cfg = T2PConfig(
            relation_words=tuple(w.strip() for w in args.relation_words.split(",") if w.strip()),
            granularity_instruction=args.granularity,
            max_personas_per_text=args.max_personas,
            max_text_chars=args.max_text_chars,
            seed=args.seed,
        )
    except ValueError as exc:
        raise errors.ConfigError(str(exc)) from None
    backend = make_backend(_backend_config(args))
    corpus = list(read_typed(args.corpus, SourceText.from_dict))
    skips = []
    n = write_records(args.out, run_text_to_persona(corpus, cfg, backend, max_concurrency=_workers(args),
                                                    on_skip=skips.append))
    if args.skips:
        write_records(args.skips, skips)
    _summary({"texts": len(corpus), "personas": n, "skipped": len(skips)})
    return EXIT_OK


def cmd_expand(args) -> int:
    backend = make_backend(_backend_config(args))
    seeds = _personas(args.personas)
    graph = expand_graph(seeds, backend, args.iterations, args.fanout_cap, max_concurrency=_workers(args),
                         decoding=Decoding(max_tokens=768, seed=args.seed))
    out = Path(args.out_graph)
    write_records(out / "nodes.jsonl", graph.nodes.values())
    write_records(out / "edges.jsonl", graph.edges)
    _summary({"seeds": len(seeds), "nodes": len(graph.nodes), "edges": len(graph.edges),
              "max_iteration": graph.max_iteration})
    return EXIT_OK


def cmd_dedup(args) -> int:
    personas = _personas(args.personas)
    clusters = []
    kept = personas
    if args.quality:
        kept, rep = apply_quality_filter(kept)
        clusters += rep.clusters
    if args.stage in ("minhash", "both"):
        kept, rep = dedup_minhash(kept, args.threshold)
        clusters += rep.clusters
    if args.stage in ("embedding", "both"):
        if any(p.embedding is None for p in kept):
            raise errors.ConfigError("embedding dedup needs embedded personas; run `personasynth embed` first")
        kept, rep = dedup_embedding(kept, args.threshold)
        clusters += rep.clusters
    write_records(args.out, kept)
    if args.report:
        write_records(args.report, DedupReport(clusters).clusters)
    _summary({"in": len(personas), "out": len(kept), "clusters": len(clusters)})
    return EXIT_OK


def cmd_embed(args) -> int:
    personas = _personas(args.personas)
    embedder = make_embedder(_embedding_config(args), max_concurrency=_workers(args))
    vecs = embedder.embed([p.description for p in personas]) if personas else []
    n = write_records(args.out, (p.with_embedding(v) for p, v in zip(personas, vecs)))
    _summary({"personas": n, "dim": embedder.dim})
    return EXIT_OK


def _load_demos(path: str | None) -> list[Demo]:
    if not path:
        return []
    return list(read_typed(path, Demo.from_dict))


def cmd_synthesize(args) -> int:
    backend = make_backend(_backend_config(args))
    mode = Mode(args.mode)
    demos = _load_demos(args.demos)
    if mode is Mode.PERSONA_ENHANCED and any(d.demo_persona is None for d in demos):
        with_persona = {d.content: d for d in demos if d.demo_persona is not None}
        derived = {d.content: d for d in derive_demo_personas([d.content for d in demos if d.demo_persona is None], backend)}
        demos = [with_persona.get(d.content) or derived.get(d.content) for d in demos]
        demos = [d for d in demos if d is not None]
    decoding = Decoding(temperature=args.temperature, max_tokens=1024, seed=args.seed)
    job = SynthesisJob(args.scenario, mode, _modifiers(args.modifier), tuple(demos), decoding)
    skips = []
    n = write_records(args.out, synthesize(_personas(args.personas), job, backend, args.n_per_persona,
                                           max_concurrency=_workers(args), on_skip=skips.append))
    _summary({"items": n, "skipped": len(skips)})
    return EXIT_OK


def _producers(path: str) -> list[Producer]:
    data = _sections(path)
    rows = data.get("producers") if isinstance(data, dict) else None
    if not isinstance(rows, list) or not rows:
        raise errors.ConfigError(f"{path}: expected a non-empty 'producers' list")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, dict) or "label" not in row:
            raise errors.ConfigError(f"{path}: producers[{i}] needs a label")
        unknown = set(row) - {"label", "strategy", "backend", "temperature"}
        if unknown:
            raise errors.ConfigError(f"{path}: producers[{i}]: unknown key(s) {sorted(unknown)}")
        backend = make_backend(build(BackendConfig, row.get("backend") or {}, f"producers[{i}].backend"))
        decoding = Decoding(temperature=float(row.get("temperature", 0.0)), max_tokens=2048)
        try:
            out.append(Producer(row["label"], backend, row.get("strategy", "assistant"), decoding))
        except ValueError as exc:
            raise errors.ConfigError(f"{path}: producers[{i}]: {exc}") from None
    return out


def cmd_solve(args) -> int:
    producers = _producers(args.producers)
    items = list(read_typed(args.items, SynthesisItem.from_dict))
    sets = solve_items(items, producers, max_concurrency=args.max_concurrency or len(producers))
    n = write_records(args.out, (s.to_item() for s in sets))
    _summary({"items": n, "producers": [p.label for p in producers]})
    return EXIT_OK


def cmd_consensus(args) -> int:
    judge = None
    if args.judge:
        sections = _sections(args.judge)
        judge = make_backend(build(BackendConfig, sections.get("backend", sections), "judge"))
    checker = EqualityChecker(judge, fallback_on_unavailable=args.judge_fallback)
    sets = [SolutionSet.from_item(it) for it in read_typed(args.solutions, SynthesisItem.from_dict)]
    order = args.producer_order.split(",") if args.producer_order else None
    result = consensus_filter(sets, checker, args.min_agree, order)
    write_records(args.out, result.retained)
    if args.decisions:
        write_records(args.decisions, (
            {"item_id": d.item_id, "retained": d.retained, "reason": d.reason,
             "agreement": d.agreement, "attempted": d.attempted,
             "reference_answer": d.reference.answer if d.reference else None}
            for d in result.decisions
        ))
    _summary({"items": len(result.decisions), "retained": len(result.retained),
              "retention_rate": result.retention_rate, "judge_calls": checker.judge_calls,
              "judge_fallbacks": len(checker.flagged)})
    return EXIT_OK


def cmd_simexp(args) -> int:
    personas = _personas(args.personas)
    backend = make_backend(_backend_config(args))
    embedder = make_embedder(_embedding_config(args), max_concurrency=_workers(args))
    modifiers = _modifiers(args.modifier)
    summary = {}
    results = []
    for center in (float(c) for c in args.bands.split(",")):
        band = BandSpec(center, args.width, args.pairs)
        pairs = sample_pairs_at_band(personas, band, seed=args.seed or 0)
        res = run_similarity_experiment(pairs, band, backend, embedder, args.scenario, modifiers,
                                        max_concurrency=_workers(args))
        results.append(res.to_dict())
        summary[f"{center:g}"] = {**res.summary, "failures": len(res.failures)}
    write_records(args.out, results)
    summary_path = Path(args.summary) if args.summary else Path(args.out).with_suffix(".summary.json")
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _summary(summary)
    return EXIT_OK


def cmd_stats(args) -> int:
    _summary(stats(args.store))
    return EXIT_OK


def cmd_run(args) -> int:
    overrides = {}
    for kv in args.set or ():
        key, eq, value = kv.partition("=")
        if not eq or "." not in key:
            raise errors.ConfigError(f"--set expects section.key=value, got {kv!r}")
        overrides[key] = yaml.safe_load(value)
    cfg = load_config(args.config, overrides)
    summary = run_pipeline(cfg, stop_after=args.stop_after)
    if args.check_lineage:
        problems = check_lineage(cfg.out_dir, cfg.pipeline.corpus)
        summary["lineage_problems"] = problems
        if problems:
            _summary(summary)
            return EXIT_DATA
    _summary(summary)
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="personasynth", description="Persona-driven synthetic data toolkit")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="infer personas from a text corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--relation-words", default="read,write")
    p.add_argument("--granularity", default="as_specifically_as_possible",
                   choices=["as_specifically_as_possible", "coarse"])
    p.add_argument("--max-personas", type=int, default=3)
    p.add_argument("--max-text-chars", type=int, default=4000)
    p.add_argument("--skips", help="write skipped (text, relation) records here")
    _add_backend_flags(p)
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("expand", help="grow personas through interpersonal relations")
    p.add_argument("--personas", required=True)
    p.add_argument("--iterations", type=int, default=6)
    p.add_argument("--fanout-cap", type=int, default=5)
    p.add_argument("--out-graph", required=True, help="directory for nodes.jsonl and edges.jsonl")
    _add_backend_flags(p)
    p.set_defaults(fn=cmd_expand)

    p = sub.add_parser("dedup", help="remove near-duplicate personas")
    p.add_argument("--personas", required=True)
    p.add_argument("--stage", choices=["minhash", "embedding", "both"], default="minhash")
    p.add_argument("--threshold", type=float, default=0.9)
    p.add_argument("--quality", action="store_true", help="apply quality heuristics first")
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.set_defaults(fn=cmd_dedup)

    p = sub.add_parser("embed", help="attach embeddings to personas")
    p.add_argument("--personas", required=True)
    p.add_argument("--out", required=True)
    _add_backend_flags(p, embedding=True)
    p.set_defaults(fn=cmd_embed)

    p = sub.add_parser("synthesize", help="generate scenario data from personas")
    p.add_argument("--personas", required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("--modifier", action="append", metavar="KEY=VALUE")
    p.add_argument("--mode", default="zero_shot", choices=[m.value for m in Mode])
    p.add_argument("--demos", help="JSONL of {content, demo_persona?}")
    p.add_argument("--n-per-persona", type=int, default=1)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--out", required=True)
    _add_backend_flags(p)
    p.set_defaults(fn=cmd_synthesize)

    p = sub.add_parser("solve", help="solve items with several producers")
    p.add_argument("--items", required=True)
    p.add_argument("--producers", required=True, help="YAML with a 'producers' list")
    p.add_argument("--out", required=True)
    p.add_argument("--max-concurrency", type=int, default=None)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("consensus", help="keep items whose solutions agree")
    p.add_argument("--solutions", required=True)
    p.add_argument("--min-agree", type=int, default=2)
    p.add_argument("--out", required=True)
    p.add_argument("--judge", help="YAML backend config for the equality judge")
    p.add_argument("--judge-fallback", action="store_true", help="use the fast path when the judge fails")
    p.add_argument("--producer-order", help="comma-separated producer labels, highest priority first")
    p.add_argument("--decisions", help="write per-item decisions here")
    p.set_defaults(fn=cmd_consensus)

    p = sub.add_parser("simexp", help="persona-similarity band experiment")
    p.add_argument("--personas", required=True, help="embedded personas")
    p.add_argument("--bands", default="0.4,0.6,0.8")
    p.add_argument("--width", type=float, default=0.01)
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--scenario", default="math")
    p.add_argument("--modifier", action="append", metavar="KEY=VALUE")
    p.add_argument("--out", required=True)
    p.add_argument("--summary", help="per-band summary JSON (default: --out with suffix .summary.json)")
    _add_backend_flags(p, embedding=True)
    p.set_defaults(fn=cmd_simexp)

    p = sub.add_parser("stats", help="counts and distributions for a store")
    p.add_argument("store", help="personas JSONL file or run directory")
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("run", help="run the whole pipeline from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--stop-after", choices=["ingest", "expand", "quality", "minhash", "embed", "semantic",
                                            "synthesize"])
    p.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE", help="override a config value")
    p.add_argument("--check-lineage", action="store_true")
    p.set_defaults(fn=cmd_run)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args)
    except errors.CorruptRecord as exc:
        print(f"error: corrupt data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (errors.FatalBackendError, errors.RetriesExhausted) as exc:
        print(f"error: backend: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (errors.ConfigError, errors.UnknownScenario, errors.MissingModifier, errors.InvalidPromptSpec,
            errors.DemoPersonaMissing, FileNotFoundError) as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (errors.PersonaSynthError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
