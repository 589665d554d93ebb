"""Persona-similarity band experiment on the offline mock backend.

Builds a pool of embedded personas, samples pairs at each band and reports
how similar the problems generated for the two personas of a pair are.

    python3 scripts/similarity_bands_demo.py [--pool 1500] [--pairs 50] [--bands 0.4,0.6,0.8]
"""

import argparse
import json
import random

from personasynth.evaluation import BandSpec, run_similarity_experiment, sample_pairs_at_band
from personasynth.llm import BackendConfig, EmbeddingConfig, make_backend, make_embedder
from personasynth.persona import Persona


def pool(n: int, embedder, seed: int = 0) -> list[Persona]:
    rnd = random.Random(seed)
    syllables = [c + v for c in "bdfgklmnprstvz" for v in "aeiou"]
    vocab = [a + b for a in syllables[:20] for b in syllables[20:35]]  # 300 letter-only words
    families = [rnd.sample(vocab, 16) for _ in range(20)]
    texts: list[str] = []
    while len(texts) < n:
        words = list(rnd.choice(families))
        for k in rnd.sample(range(16), rnd.randint(0, 12)):
            words[k] = rnd.choice(vocab)
        if (t := " ".join(words)) not in texts:
            texts.append(t)
    return [Persona.create(t).with_embedding(v) for t, v in zip(texts, embedder.embed(texts))]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pool", type=int, default=1500)
    ap.add_argument("--pairs", type=int, default=50)
    ap.add_argument("--bands", default="0.4,0.6,0.8")
    ap.add_argument("--dim", type=int, default=128)
    args = ap.parse_args()
    embedder = make_embedder(EmbeddingConfig(dim=args.dim))
    backend = make_backend(BackendConfig())
    personas = pool(args.pool, embedder)
    out = {}
    for center in (float(b) for b in args.bands.split(",")):
        band = BandSpec(center, n_pairs=args.pairs)
        res = run_similarity_experiment(sample_pairs_at_band(personas, band), band, backend, embedder)
        out[f"{center:g}"] = res.summary
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
