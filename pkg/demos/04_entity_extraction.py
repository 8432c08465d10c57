#!/usr/bin/env python3
"""Entity extraction: tokenization, part-of-speech filtering and merging of
adjacent words into vocabulary n-grams."""

from apisynth import LexiconTagger, extract_entities, load_embeddings, tokenize
from apisynth.fixtures import DEMO_VECTORS, fixture_path

model = load_embeddings(fixture_path(DEMO_VECTORS))
tagger = LexiconTagger()

expressions = [
    "Is there any Chinese restaurant near Sydney Opera House",
    "what is the weather like tomorrow",
    "find me a good french restaurant in paris",
    "will it rain in London tomorrow",
]

for expression in expressions:
    print(f"expression: {expression!r}")
    tokens = tokenize(expression)
    tags = tagger.tag(tokens)
    tagged = ", ".join(f"{t.normalized}/{tag.value}" for t, tag in zip(tokens, tags))
    print(f"  tagged : {tagged}")
    entities = extract_entities(expression, model, tagger)
    for entity in entities:
        print(f"  entity : {entity.text} ({entity.kind}, span {entity.span})")
    print()
