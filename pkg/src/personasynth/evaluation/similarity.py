"""Persona-similarity bands: do similar personas produce similar problems?"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..concurrency import ordered_map
from ..errors import FatalBackendError, InsufficientPairs, MalformedResponse, PersonaSynthError
from ..llm.base import Backend, Decoding
from ..llm.embed import Embedder
from ..persona import Persona
from ..synthesis.generate import SynthesisJob, synthesize
from ..synthesis.prompts import TemplateRegistry

log = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 4000  # personas; above this, pairs are found by random probing
PROBE_BUDGET = 200  # random probes per requested pair


@dataclass(frozen=True)
class BandSpec:
    center: float
    width: float = 0.01
    n_pairs: int = 20

    def __post_init__(self):
        if not 0.0 <= self.center <= 1.0:
            raise ValueError(f"band center must lie in [0, 1], got {self.center}")
        if self.width <= 0:
            raise ValueError("band width must be positive")
        if self.n_pairs < 1:
            raise ValueError("n_pairs must be >= 1")

    @property
    def low(self) -> float:
        return self.center - self.width

    @property
    def high(self) -> float:
        return self.center + self.width

    def contains(self, cos: float) -> bool:
        return self.low <= cos <= self.high

    def to_dict(self) -> dict:
        return {"center": self.center, "width": self.width, "n_pairs": self.n_pairs}


def pair_cosine(a: Sequence[float], b: Sequence[float]) -> float:
    va, vb = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    return float(va @ vb / (np.linalg.norm(va) * np.linalg.norm(vb)))


def _matrix(personas: Sequence[Persona]) -> np.ndarray:
    missing = [p.id for p in personas if p.embedding is None]
    if missing:
        raise ValueError(f"{len(missing)} personas lack embeddings, e.g. {missing[0]}")
    m = np.asarray([p.embedding for p in personas], dtype=np.float64)
    norms = np.linalg.norm(m, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise ValueError("zero-norm embedding in sample pool")
    return m / norms


def band_candidates(personas: Sequence[Persona], band: BandSpec, chunk: int = 512) -> list[tuple[int, int]]:
    """Every index pair ``i < j`` whose cosine lies inside the band (approximate screen, slack 1e-9)."""
    m = _matrix(personas)
    out: list[tuple[int, int]] = []
    lo, hi = band.low - 1e-9, band.high + 1e-9
    for start in range(0, len(m), chunk):
        block = m[start : start + chunk] @ m.T
        rows, cols = np.nonzero((block >= lo) & (block <= hi))
        rows = rows + start
        keep = cols > rows
        out.extend(zip(rows[keep].tolist(), cols[keep].tolist()))
    return out


def sample_pairs_at_band(
    personas: Sequence[Persona], band: BandSpec, seed: int = 0
) -> list[tuple[Persona, Persona]]:
    """Draw ``band.n_pairs`` distinct pairs whose cosine similarity lies in ``[center-width, center+width]``.

    Each accepted pair is rechecked with :func:`pair_cosine`.  Raises
    ``InsufficientPairs`` when the pool does not hold enough in-band pairs.
    """
    if len(personas) < 2:
        raise ValueError("need at least two personas")
    rng = np.random.default_rng(seed)
    exact = lambda i, j: band.contains(pair_cosine(personas[i].embedding, personas[j].embedding))
    if len(personas) <= EXHAUSTIVE_LIMIT:
        cands = [(i, j) for i, j in band_candidates(personas, band) if exact(i, j)]
        if len(cands) < band.n_pairs:
            raise InsufficientPairs(len(cands), band.n_pairs, band.center)
        pick = rng.choice(len(cands), size=band.n_pairs, replace=False)
        chosen = [cands[k] for k in pick]
    else:
        _matrix(personas)
        seen: set[tuple[int, int]] = set()
        chosen = []
        n = len(personas)
        for _ in range(PROBE_BUDGET * band.n_pairs):
            i, j = (int(x) for x in rng.choice(n, size=2, replace=False))
            key = (min(i, j), max(i, j))
            if key in seen:
                continue
            seen.add(key)
            if exact(*key):
                chosen.append(key)
                if len(chosen) == band.n_pairs:
                    break
        if len(chosen) < band.n_pairs:
            raise InsufficientPairs(len(chosen), band.n_pairs, band.center)
    return [(personas[i], personas[j]) for i, j in chosen]


@dataclass
class SimilarityExperimentResult:
    band: BandSpec
    persona_pair_sims: list[float] = field(default_factory=list)
    problem_pair_sims: list[float] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)
    scenario: str = "math"
    modifiers: Mapping[str, str] = field(default_factory=dict)

    @property
    def summary(self) -> dict:
        if not self.problem_pair_sims:
            return {"n": 0, "mean": None, "median": None, "p25": None, "p75": None}
        v = np.asarray(self.problem_pair_sims, dtype=np.float64)
        return {
            "n": int(v.size),
            "mean": float(v.mean()),
            "median": float(np.median(v)),
            "p25": float(np.percentile(v, 25)),
            "p75": float(np.percentile(v, 75)),
        }

    def to_dict(self) -> dict:
        return {
            "band": self.band.to_dict(),
            "scenario": self.scenario,
            "modifiers": dict(self.modifiers),
            "persona_pair_sims": self.persona_pair_sims,
            "problem_pair_sims": self.problem_pair_sims,
            "failures": self.failures,
            "summary": self.summary,
        }


def run_similarity_experiment(
    pairs: Sequence[tuple[Persona, Persona]],
    band: BandSpec,
    backend: Backend,
    embedder: Embedder,
    scenario: str = "math",
    modifiers: Mapping[str, str] | None = None,
    *,
    registry: TemplateRegistry | None = None,
    max_concurrency: int = 1,
) -> SimilarityExperimentResult:
    """One greedy-decoded problem per persona of each pair; record the cosine of the two problems."""
    job = SynthesisJob(scenario=scenario, modifiers=modifiers or {}, decoding=Decoding(temperature=0.0, max_tokens=1024))
    result = SimilarityExperimentResult(band=band, scenario=scenario, modifiers=dict(modifiers or {}))

    def work(pair):
        a, b = pair
        try:
            items = list(synthesize([a, b], job, backend, registry=registry))
            if len(items) != 2:
                raise MalformedResponse("no problem generated for one side of the pair")
            vecs = embedder.embed([items[0].output_text, items[1].output_text])
            return float(vecs[0] @ vecs[1]), None
        except FatalBackendError:
            raise
        except (PersonaSynthError, ValueError) as exc:
            log.warning("pair (%s, %s) failed: %s", a.id, b.id, exc)
            return None, {"pair": [a.id, b.id], "reason": f"{type(exc).__name__}: {exc}"}

    for (a, b), (sim, failure) in zip(pairs, ordered_map(work, pairs, max_concurrency)):
        if failure is not None:
            result.failures.append(failure)
            continue
        result.persona_pair_sims.append(pair_cosine(a.embedding, b.embedding))
        result.problem_pair_sims.append(sim)
    return result
