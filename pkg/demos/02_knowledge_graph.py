#!/usr/bin/env python3
"""Build an API knowledge graph from scratch, persist it, and query it."""

import io

from apisynth import (
    Api,
    Declaration,
    KnowledgeGraph,
    Parameter,
    ParamValue,
    add_sample_expression,
    find_apis_by_terms,
    load_kg,
    save_kg,
)

graph = KnowledgeGraph()
graph.add_api(Api(
    id="books",
    name="BookFinder",
    description="Search books by title, author or genre",
    tags=["books", "reading"],
    base_uri="api.bookfinder.test",
))
graph.add_declaration(Declaration(
    id="books.search",
    api_id="books",
    method="GET",
    path_template="/search?genre=[genre]",
    sample_expressions=["find me a good mystery novel"],
    parameters=[
        Parameter("genre", required=True, values=[
            ParamValue("mystery"), ParamValue("romance"),
        ]),
        Parameter("author", required=False),
    ],
))

add_sample_expression(graph, "books.search", "any thrillers you would recommend")
add_sample_expression(graph, "books.search", "any thrillers you would recommend")  # dedup

declaration = graph.declaration("books.search")
print("declaration:", declaration.id, declaration.method, declaration.path_template)
print("samples:", declaration.sample_expressions)
print("placeholders:", declaration.placeholders())

document = save_kg(graph)
print("\nserialized document:\n")
print(document.decode("utf-8"))

reloaded = load_kg(io.BytesIO(document))
print("round-trip equal:", reloaded == graph)

print("\nterm search:")
for terms in (["books"], ["mystery"], ["genre"], ["cooking"]):
    hits = [api.id for api in find_apis_by_terms(graph, terms)]
    print(f"  {terms} -> {hits}")
