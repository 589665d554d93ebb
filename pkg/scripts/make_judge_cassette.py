"""Write the judge cassette used by the equality tests.

Each row stores the exact judge prompt for one answer pair and the verdict the
judge gave for it, so the judge path can be replayed offline.

    python3 scripts/make_judge_cassette.py [--out tests/data/judge_cassette.jsonl]
"""

import argparse
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from equality_table import JUDGE_CASES  # noqa: E402

from personasynth.evaluation.answers import judge_prompt  # noqa: E402
from personasynth.llm import GREEDY, Cassette, Completion  # noqa: E402


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(ROOT / "tests" / "data" / "judge_cassette.jsonl"))
    args = ap.parse_args()
    out = Path(args.out)
    out.unlink(missing_ok=True)
    cassette = Cassette(out)
    for expected, got, verdict in JUDGE_CASES:
        cassette.put(judge_prompt(expected, got), GREEDY, Completion(verdict, "judge"))
    print(f"wrote {len(cassette)} rows to {out}")


if __name__ == "__main__":
    main()
