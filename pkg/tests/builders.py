"""Small constructors for evaluation fixtures."""

from personasynth.evaluation import SolutionSet
from personasynth.persona import Scenario, Solution, SynthesisItem

PRODUCERS = ("p0", "p1", "p2")


def item(i: int) -> SynthesisItem:
    return SynthesisItem(id=f"s_{i:05d}", scenario=Scenario.MATH, persona_id="p_x",
                         prompt_text="prompt", output_text=f"Math problem: what is {i}+1?")


def solution_set(i: int, answers, producers=PRODUCERS) -> SolutionSet:
    sols = tuple(Solution(p, a, f"... \\boxed{{{a}}}") for p, a in zip(producers, answers))
    return SolutionSet(item(i), sols)


def consensus_corpus(n: int, agree: int):
    """``agree`` items with exactly two of three matching answers, the rest all different."""
    sets = []
    for i in range(n):
        answers = (f"{i}", f"{i}/1", f"{i + 7}") if i < agree else (f"{i}", f"{i + 1}", f"{i + 2}")
        sets.append(solution_set(i, answers))
    return sets


def embedded_pool(n: int = 400, dim: int = 128, seed: int = 0):
    """Personas in word families with varying mutation so pairwise cosines cover most of [0, 1]."""
    import random

    from personasynth.llm import EmbeddingConfig, make_embedder
    from personasynth.persona import Persona

    rnd = random.Random(seed)
    syllables = [c + v for c in "bdfgklmnprstvz" for v in "aeiou"]
    vocab = [a + b for a in syllables[:20] for b in syllables[20:35]]  # 300 letter-only words
    families = [rnd.sample(vocab, 16) for _ in range(20)]
    texts: list[str] = []
    while len(texts) < n:
        words = list(rnd.choice(families))
        for k in rnd.sample(range(16), rnd.randint(0, 12)):
            words[k] = rnd.choice(vocab)
        text = " ".join(words)
        if text not in texts:
            texts.append(text)
    vecs = make_embedder(EmbeddingConfig(dim=dim)).embed(texts)
    return [Persona.create(t).with_embedding(v) for t, v in zip(texts, vecs)]
