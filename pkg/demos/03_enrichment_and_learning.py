#!/usr/bin/env python3
"""The two knowledge-acquisition paths: embedding-neighbor enrichment and
confidence-gated learning of values observed in conversation."""

from apisynth import enrich_values, load_embeddings, load_kg, record_learned_value
from apisynth.fixtures import DEMO_GRAPH, DEMO_VECTORS, fixture_path

model = load_embeddings(fixture_path(DEMO_VECTORS))
graph = load_kg(fixture_path(DEMO_GRAPH))

location = graph.declaration("yelp.search").parameter("location")
print("location values before enrichment:", location.literals())

report = enrich_values(graph, model, k=2, min_sim=0.9)
print("\nenrichment report:")
for added in report.added_values:
    print(
        f"  + {added.literal!r} -> {added.declaration_id}.{added.parameter}"
        f" (neighbor of {added.source_literal!r}, sim {added.similarity:.3f})"
    )
print("location values after enrichment:", location.literals())

second = enrich_values(graph, model, k=2, min_sim=0.9)
print(
    "\nsecond identical run adds "
    f"{len(second.added_values)} values and {len(second.added_links)} links"
)

print("\nlearning from conversations (0.40 confidence gate):")
for literal, confidence in (("sushi", 0.72), ("tapas", 0.40), ("noise", 0.12)):
    accepted = record_learned_value(graph, "yelp.search", "term", literal, confidence)
    verdict = "stored" if accepted else "discarded"
    print(f"  {literal!r} at confidence {confidence:.2f}: {verdict}")
print("term values now:", graph.declaration("yelp.search").parameter("term").literals())
