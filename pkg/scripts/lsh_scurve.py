"""Tabulate the banding candidate probability and compare it to the measured collision rate.

    python3 scripts/lsh_scurve.py [--bands 16] [--rows 8] [--pairs 200]
"""

import argparse
from fractions import Fraction

from personasynth.dedup import LSHIndex, candidate_probability, scurve_threshold
from personasynth.dedup.minhash import signature_array


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bands", type=int, default=16)
    ap.add_argument("--rows", type=int, default=8)
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--union", type=int, default=100)
    args = ap.parse_args()
    k = args.bands * args.rows
    print(f"bands={args.bands} rows={args.rows} k={k} threshold~{scurve_threshold(args.bands, args.rows):.4f}")
    print(f"{'J':>5} {'predicted':>10} {'measured':>9}")
    for level in range(1, 20):
        j = Fraction(level, 20)
        inter = int(j * args.union)
        hits = 0
        for i in range(args.pairs):
            shared = [f"j{level}p{i}s{t}" for t in range(inter)]
            rest = args.union - inter
            a = shared + [f"j{level}p{i}a{t}" for t in range(rest // 2)]
            b = shared + [f"j{level}p{i}b{t}" for t in range(rest - rest // 2)]
            index = LSHIndex(args.bands, args.rows)
            index.insert(0, signature_array(a, k))
            hits += bool(index.candidates(signature_array(b, k)))
        exact_j = Fraction(inter, args.union)
        print(f"{float(exact_j):5.2f} {candidate_probability(float(exact_j), args.bands, args.rows):10.4f} "
              f"{hits / args.pairs:9.3f}")


if __name__ == "__main__":
    main()
