#!/usr/bin/env python3
"""Load the bundled word vectors and poke at the embedding space:
lookups, expression vectors, cosine similarity and nearest neighbors."""

from apisynth import cosine, load_embeddings
from apisynth.fixtures import DEMO_VECTORS, fixture_path

model = load_embeddings(fixture_path(DEMO_VECTORS))
print(f"loaded {len(model)} tokens of dimension {model.dimension}\n")

print("vector_of('Paris') ->", model.vector_of("Paris"))
print("vector_of('Sydney Opera House') ->", model.vector_of("Sydney Opera House"))
print("vector_of('zzqx') ->", model.vector_of("zzqx"))

expression = ["what", "is", "the", "weather", "like", "tomorrow"]
vec = model.expression_vector(expression)
print("\nexpression vector for", expression)
print("  (out-of-vocabulary words are skipped):", vec)

pairs = [
    ("chinese", "french"),
    ("chinese", "paris"),
    ("sydney", "melbourne"),
    ("weather", "pizza"),
]
print("\ncosine similarities:")
for a, b in pairs:
    sim = cosine(model.vector_of(a), model.vector_of(b))
    print(f"  {a:10s} ~ {b:10s} = {sim:+.4f}")

print("\nnearest neighbors:")
for token in ("paris", "restaurant", "weather"):
    neighbors = model.nearest_neighbors(token, 3)
    rendered = ", ".join(f"{t} ({s:.3f})" for t, s in neighbors)
    print(f"  {token:10s} -> {rendered}")
