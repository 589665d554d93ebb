"""Write the 50-text demo corpus used by the example config and the end-to-end tests."""

import argparse
import json
from pathlib import Path

TOPICS = [
    ("climate", "Rising sea temperatures are bleaching coral reefs along the tropical coastline, and researchers are tracking recovery rates after each marine heatwave."),
    ("medicine", "The randomized trial compared two anticoagulant dosing schedules in elderly patients recovering from hip replacement surgery."),
    ("finance", "Quarterly earnings beat analyst forecasts, but the bond market reacted to guidance about slowing consumer credit growth."),
    ("cooking", "Slow fermentation gives sourdough its open crumb; a cold overnight proof in the refrigerator deepens the flavor of the crust."),
    ("astronomy", "The telescope captured the faint spectrum of an exoplanet atmosphere, revealing traces of water vapor and methane."),
    ("education", "Teachers in rural districts reported that project-based learning improved attendance among middle school students."),
    ("law", "The appellate court ruled that the warrantless search of cloud storage violated constitutional privacy protections."),
    ("gardening", "Companion planting basil beside tomatoes can deter pests, while marigolds along the border attract pollinators."),
    ("robotics", "The warehouse robot uses lidar and a learned grasping policy to pick irregularly shaped parcels from moving conveyor belts."),
    ("history", "Merchant ledgers from the sixteenth century reveal how spice prices shifted along the Indian Ocean trade routes."),
    ("music", "The string quartet rehearsed the late Beethoven work for months, debating tempo changes in the slow movement."),
    ("sports", "The marathon runner adjusted her training to include altitude camps and tempo runs before the autumn championship."),
    ("architecture", "Cross-laminated timber allows mid-rise apartment buildings to store carbon while meeting strict fire safety codes."),
    ("linguistics", "Field recordings document tone patterns in an endangered language spoken by fewer than two thousand villagers."),
    ("cybersecurity", "Attackers exploited a misconfigured authentication token to move laterally across the hospital network."),
    ("agriculture", "Drip irrigation and soil moisture sensors cut water use on the almond orchard by nearly a third last season."),
    ("psychology", "The longitudinal study followed adolescents for ten years to measure how sleep habits shape anxiety symptoms."),
    ("aviation", "Pilots practiced crosswind landings in the simulator before the airline introduced the new regional jet."),
    ("fashion", "The designer sourced recycled wool from local mills and built the winter collection around modular pieces."),
    ("mathematics", "The proof relies on a clever pigeonhole argument to bound the number of monochromatic triangles in the coloring."),
    ("journalism", "Reporters verified the leaked documents by cross-checking metadata with public procurement records."),
    ("ecology", "Reintroducing wolves changed elk grazing behavior, which allowed willow stands to recover along the riverbanks."),
    ("gaming", "The studio patched the multiplayer matchmaking system after players reported long queues in ranked mode."),
    ("chemistry", "A new catalyst lowers the temperature needed to split ammonia into hydrogen for fuel cell vehicles."),
    ("urban planning", "The city converted two car lanes into a protected bike corridor and measured changes in downtown foot traffic."),
]

FRAMES = [
    "News brief: {body}",
    "From a discussion forum: I have been reading about this all week. {body} Does anyone have sources?",
]


def build() -> list[dict]:
    rows = []
    for frame_idx, frame in enumerate(FRAMES):
        for topic, body in TOPICS:
            rows.append({
                "id": f"t{len(rows):03d}",
                "text": frame.format(body=body),
                "source_tag": f"demo/{topic.replace(' ', '_')}/{frame_idx}",
                "lang": "en",
            })
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "demo_corpus.jsonl"))
    args = ap.parse_args()
    rows = build()
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as fh:
        for r in rows:
            fh.write(json.dumps(r, ensure_ascii=False) + "\n")
    print(f"wrote {len(rows)} texts to {args.out}")


if __name__ == "__main__":
    main()
