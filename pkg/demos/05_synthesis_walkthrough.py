#!/usr/bin/env python3
"""The full pipeline, stage by stage, for the bundled two-API graph:
entity extraction, API ranking, declaration selection, entity-parameter
mapping, coverage checking and call construction."""

from apisynth import (
    check_coverage,
    extract_entities,
    load_embeddings,
    load_kg,
    map_entities_to_params,
    select_apis,
    select_declaration,
    synthesize,
    tokenize,
)
from apisynth.fixtures import DEMO_GRAPH, DEMO_VECTORS, fixture_path

model = load_embeddings(fixture_path(DEMO_VECTORS))
graph = load_kg(fixture_path(DEMO_GRAPH))
expression = "Is there any Chinese restaurant near Sydney Opera House"
print(f"expression: {expression!r}\n")

entities = extract_entities(expression, model)
print("1. extracted entities:", [e.text for e in entities])

scores = select_apis(entities, graph, model)
print("2. API ranking:")
for score in scores:
    print(f"   {score.api_id:8s} score {score.score:.3f}")
    for entity, term, sim in score.matched_evidence:
        print(f"     {entity} ~ {term} ({sim:.3f})")

tokens = [t.normalized for t in tokenize(expression)]
match = select_declaration(tokens, scores, graph, model, entities=entities)
print(
    f"3. declaration: {match.declaration_id} "
    f"(similarity {match.similarity:.3f} to {match.best_sample_expression!r})"
)

declaration = graph.declaration(match.declaration_id)
matrix = map_entities_to_params(entities, declaration, graph, model)
print("4. parameter-value matrix:")
for entry in matrix.entries:
    print(f"   {entry.param_name} <- {entry.entity_text} ({entry.confidence:.3f})")

report = check_coverage(declaration, matrix, {})
print(f"5. coverage: {report.required_bound}/{report.required_total} = {report.coverage}")

result = synthesize(expression, graph, model)
print(f"6. result: {result.status}")
print(f"   {result.call.method} {result.call.url}")
print("   learned:", [(lv.literal, lv.accepted) for lv in result.learned])

print("\n--- a conversation that needs follow-up input ---")
graph = load_kg(fixture_path(DEMO_GRAPH))
graph.declaration("yelp.search").parameter("location").values.clear()
pending = synthesize(expression, graph, model)
print("status:", pending.status, "| missing:", pending.coverage_report.missing_required)
answered = synthesize(expression, graph, model, user_bindings={"location": "sydney"})
print("after answering:", answered.status, "|", answered.call.url)
