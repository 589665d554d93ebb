"""Stage wiring: ingest -> expand -> quality -> minhash -> embed -> semantic -> synthesize.

Each stage writes its files under ``<out_dir>/<NN_stage>/`` and commits a
checkpoint before the next stage starts.  Ingest and synthesize commit every
``checkpoint_every`` input records and resume from the last committed ordinal;
the other stages are recomputed whole unless already complete.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import shutil
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from ..dedup import apply_quality_filter, dedup_embedding, dedup_minhash, first_band_key
from ..dedup.report import DedupCluster, DedupReport
from ..jsonl import dumps, iter_records, read_typed, write_records
from ..llm import make_backend, make_embedder
from ..llm.base import Backend
from ..llm.embed import Embedder
from ..persona import FromPersona, FromText, Persona, RelationEdge, SourceText, SynthesisItem
from ..persona2persona import expand_graph
from ..synthesis.generate import SynthesisJob, derive_demo_personas, synthesize
from ..synthesis.prompts import Demo, Mode
from ..text2persona import run_text_to_persona
from . import checkpoint
from .checkpoint import Checkpoint
from .config import PipelineConfig

log = logging.getLogger(__name__)

STAGES = ("ingest", "expand", "quality", "minhash", "embed", "semantic", "synthesize")
STAGE_DIRS = {name: f"{i:02d}_{name}" for i, name in enumerate(STAGES, start=1)}


def stage_dir(out_dir: Path, stage: str) -> Path:
    return Path(out_dir) / STAGE_DIRS[stage]


def file_digest(path: str | os.PathLike) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _count(path: Path) -> int:
    if not path.exists():
        return 0
    with open(path, "rb") as fh:
        return sum(1 for line in fh if line.strip())


def _personas(path: Path) -> list[Persona]:
    return list(read_typed(path, Persona.from_dict))


def _write_report(path: Path, report: DedupReport) -> int:
    return write_records(path, report.clusters)


@dataclass(frozen=True)
class StageCounts:
    stage: str
    n_in: int
    n_out: int
    n_skipped: int = 0

    def to_dict(self) -> dict:
        return {"stage": self.stage, "in": self.n_in, "out": self.n_out, "skipped": self.n_skipped}


class _Runner:
    def __init__(self, cfg: PipelineConfig, backend: Backend | None, embedder: Embedder | None):
        self.cfg = cfg
        self.out = cfg.out_dir
        self.ckpt_dir = cfg.checkpoint_dir
        self.config_hash = cfg.hash(file_digest(cfg.pipeline.corpus))
        self._backend = backend
        self._embedder = embedder

    @property
    def backend(self) -> Backend:
        if self._backend is None:
            self._backend = make_backend(self.cfg.backend)
        return self._backend

    @property
    def embedder(self) -> Embedder:
        if self._embedder is None:
            self._embedder = make_embedder(self.cfg.embedding, max_concurrency=self.cfg.workers)
        return self._embedder

    def invalidate_stale(self) -> None:
        stale = [
            ck.stage
            for ck in (Checkpoint.load(self.ckpt_dir, s) for s in STAGES)
            if ck is not None and ck.config_hash != self.config_hash
        ]
        if stale:
            log.warning("config changed since last run (stages %s); starting over", stale)
            checkpoint.clear(self.ckpt_dir)
            for s in STAGES:
                shutil.rmtree(stage_dir(self.out, s), ignore_errors=True)

    def done(self, stage: str) -> bool:
        ck = Checkpoint.load(self.ckpt_dir, stage)
        return ck is not None and ck.complete and ck.config_hash == self.config_hash

    def commit(self, stage: str, ordinal: int) -> None:
        Checkpoint(stage, ordinal, self.config_hash, complete=True).save(self.ckpt_dir)

    def chunked(self, stage: str, inputs: Sequence, outputs: dict[str, Path], work: Callable) -> None:
        """Run ``work(chunk) -> {name: records}`` over ``inputs`` with resumable partial files."""
        if self.done(stage):
            return
        every = self.cfg.pipeline.checkpoint_every
        partial = {name: p.with_name(p.name + ".partial") for name, p in outputs.items()}
        ck = Checkpoint.load(self.ckpt_dir, stage)
        start = 0
        resumable = (
            ck is not None
            and ck.config_hash == self.config_hash
            and set(ck.output_bytes) == set(outputs)
            and all(p.exists() and p.stat().st_size >= ck.output_bytes[n] for n, p in partial.items())
        )
        if resumable:
            start = ck.ordinal
            for name, p in partial.items():
                with open(p, "r+b") as fh:
                    fh.truncate(ck.output_bytes[name])
            log.info("%s: resuming at record %d", stage, start)
        else:
            for p in partial.values():
                p.parent.mkdir(parents=True, exist_ok=True)
                p.write_bytes(b"")
        handles = {name: open(p, "ab") for name, p in partial.items()}
        try:
            for lo in range(start, len(inputs), every):
                chunk = inputs[lo : lo + every]
                produced = work(chunk)
                sizes = {}
                for name, fh in handles.items():
                    for rec in produced.get(name, ()):
                        fh.write((dumps(rec.to_dict() if hasattr(rec, "to_dict") else rec) + "\n").encode("utf-8"))
                    fh.flush()
                    os.fsync(fh.fileno())
                    sizes[name] = fh.tell()
                Checkpoint(stage, lo + len(chunk), self.config_hash, False, sizes).save(self.ckpt_dir)
        finally:
            for fh in handles.values():
                fh.close()
        for name, p in partial.items():
            os.replace(p, outputs[name])
        self.commit(stage, len(inputs))

    # --- stages -----------------------------------------------------------

    def ingest(self) -> StageCounts:
        d = stage_dir(self.out, "ingest")
        corpus = list(read_typed(self.cfg.pipeline.corpus, SourceText.from_dict))
        outputs = {"personas": d / "personas.jsonl", "skips": d / "skips.jsonl"}

        def work(chunk):
            skips = []
            personas = list(
                run_text_to_persona(chunk, self.cfg.t2p, self.backend, max_concurrency=self.cfg.workers,
                                    on_skip=skips.append)
            )
            return {"personas": personas, "skips": skips}

        self.chunked("ingest", corpus, outputs, work)
        return StageCounts("ingest", len(corpus), _count(outputs["personas"]), _count(outputs["skips"]))

    def expand(self) -> StageCounts:
        seeds = _personas(stage_dir(self.out, "ingest") / "personas.jsonl")
        d = stage_dir(self.out, "expand")
        if not self.done("expand"):
            e = self.cfg.expand
            graph = expand_graph(seeds, self.backend, e.iterations, e.fanout_cap,
                                 max_concurrency=self.cfg.workers, decoding=self.cfg.expand_decoding)
            write_records(d / "edges.jsonl", graph.edges)
            write_records(d / "nodes.jsonl", graph.nodes.values())
            self.commit("expand", len(seeds))
        return StageCounts("expand", len(seeds), _count(d / "nodes.jsonl"))

    def _filter(self, stage: str, source: Path, fn) -> StageCounts:
        d = stage_dir(self.out, stage)
        personas = _personas(source)
        if not self.done(stage):
            kept, report = fn(personas)
            _write_report(d / "report.jsonl", report)
            write_records(d / "personas.jsonl", kept)
            self.commit(stage, len(personas))
        return StageCounts(stage, len(personas), _count(d / "personas.jsonl"))

    def quality(self) -> StageCounts:
        return self._filter("quality", stage_dir(self.out, "expand") / "nodes.jsonl", apply_quality_filter)

    def minhash(self) -> StageCounts:
        c = self.cfg.dedup
        return self._filter(
            "minhash",
            stage_dir(self.out, "quality") / "personas.jsonl",
            lambda ps: dedup_minhash(ps, c.minhash_threshold, c.k, c.bands, c.rows, c.minhash_seed),
        )

    def embed(self) -> StageCounts:
        personas = _personas(stage_dir(self.out, "minhash") / "personas.jsonl")
        d = stage_dir(self.out, "embed")
        if not self.done("embed"):
            vecs = self.embedder.embed([p.description for p in personas])
            write_records(d / "personas.jsonl", (p.with_embedding(v) for p, v in zip(personas, vecs)))
            self.commit("embed", len(personas))
        return StageCounts("embed", len(personas), _count(d / "personas.jsonl"))

    def semantic(self) -> StageCounts:
        c = self.cfg.dedup
        key = (lambda p: first_band_key(p, c.k, c.rows, c.minhash_seed)) if c.block_by_first_band else None
        return self._filter(
            "semantic",
            stage_dir(self.out, "embed") / "personas.jsonl",
            lambda ps: dedup_embedding(ps, c.embedding_threshold, key),
        )

    def synthesize(self) -> StageCounts:
        s = self.cfg.synthesize
        personas = _personas(stage_dir(self.out, "semantic") / "personas.jsonl")
        d = stage_dir(self.out, "synthesize")
        outputs = {"items": d / "items.jsonl", "skips": d / "skips.jsonl"}
        if not self.done("synthesize"):
            if s.mode is Mode.PERSONA_ENHANCED:
                demos = tuple(derive_demo_personas(s.demos, self.backend))
            else:
                demos = tuple(Demo(t) for t in s.demos)
            job = SynthesisJob(s.scenario, s.mode, s.modifiers, demos, self.cfg.synth_decoding)

            def work(chunk):
                skips = []
                items = list(synthesize(chunk, job, self.backend, s.n_per_persona,
                                        max_concurrency=self.cfg.workers, on_skip=skips.append))
                return {"items": items, "skips": skips}

            self.chunked("synthesize", personas, outputs, work)
        return StageCounts("synthesize", len(personas), _count(outputs["items"]), _count(outputs["skips"]))


def run_pipeline(
    cfg: PipelineConfig,
    *,
    backend: Backend | None = None,
    embedder: Embedder | None = None,
    stop_after: str | None = None,
) -> dict:
    """Run (or resume) every stage and write ``summary.json``; returns the summary."""
    if stop_after is not None and stop_after not in STAGES:
        raise ValueError(f"stop_after must be one of {STAGES}")
    cfg.validate()
    runner = _Runner(cfg, backend, embedder)
    runner.out.mkdir(parents=True, exist_ok=True)
    runner.invalidate_stale()
    counts = []
    for stage in STAGES:
        counts.append(getattr(runner, stage)())
        log.info("%s: %d -> %d", stage, counts[-1].n_in, counts[-1].n_out)
        if stage == stop_after:
            break
    summary = {
        "config_hash": runner.config_hash,
        "complete": stop_after is None or stop_after == STAGES[-1],
        "stages": [c.to_dict() for c in counts],
    }
    (runner.out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return summary


def check_lineage(out_dir: str | os.PathLike, corpus: str | os.PathLike) -> list[str]:
    """Every id an output record points to must exist in an earlier stage's file."""
    out = Path(out_dir)
    problems: list[str] = []
    text_ids = {rec["id"] for _, rec in iter_records(corpus)}

    def ids_of(path: Path) -> set[str]:
        return {rec["id"] for _, rec in iter_records(path)} if path.exists() else set()

    ingest = _personas(stage_dir(out, "ingest") / "personas.jsonl")
    for p in ingest:
        if not isinstance(p.provenance, FromText) or p.provenance.source_id not in text_ids:
            problems.append(f"ingest: {p.id} has no source text")
    seeds = {p.id for p in ingest}

    nodes = _personas(stage_dir(out, "expand") / "nodes.jsonl")
    node_ids = {p.id for p in nodes}
    for p in nodes:
        if isinstance(p.provenance, FromPersona):
            if p.provenance.parent_id not in node_ids:
                problems.append(f"expand: {p.id} parent {p.provenance.parent_id} missing")
        elif p.id not in seeds:
            problems.append(f"expand: {p.id} is neither a seed nor derived")
    for e in read_typed(stage_dir(out, "expand") / "edges.jsonl", RelationEdge.from_dict):
        if e.parent_id not in node_ids or e.child_id not in node_ids:
            problems.append(f"expand: dangling edge {e.parent_id}->{e.child_id}")

    upstream = node_ids
    for stage in ("quality", "minhash", "embed", "semantic"):
        d = stage_dir(out, stage)
        kept = ids_of(d / "personas.jsonl")
        for pid in sorted(kept - upstream):
            problems.append(f"{stage}: {pid} not in upstream stage")
        report = d / "report.jsonl"
        if report.exists():
            for c in read_typed(report, DedupCluster.from_dict):
                if c.kept_id is not None and c.kept_id not in kept:
                    problems.append(f"{stage}: cluster keeps {c.kept_id}, which is not a survivor")
                for pid in c.dropped_ids:
                    if pid not in upstream or pid in kept:
                        problems.append(f"{stage}: bad dropped id {pid}")
        upstream = kept

    items_path = stage_dir(out, "synthesize") / "items.jsonl"
    if items_path.exists():
        for item in read_typed(items_path, SynthesisItem.from_dict):
            if item.persona_id not in upstream:
                problems.append(f"synthesize: item {item.id} persona {item.persona_id} not a survivor")
    return problems
