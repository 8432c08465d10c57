"""Entity extraction: tokenize an expression, keep content words, merge
adjacent tokens into vocabulary n-grams.

The tagger is pluggable.  The bundled default is a small lexicon tagger
(function words, common adjectives and verbs); unknown tokens default to
noun, and capitalized tokens that are not expression-initial are treated as
proper nouns.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional, Protocol, Sequence, Union

from .embedding import EmbeddingModel
from .errors import EmptyExpression, NoEntities

# underscores survive: vocabulary n-grams are underscore-joined
_STRIP_CHARS = string.punctuation.replace("_", "") + "…“”‘’—–¿¡"
_STRIP_TABLE = str.maketrans("", "", _STRIP_CHARS)

MAX_NGRAM = 3


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    position: int


class PosTag(str, Enum):
    NOUN = "noun"
    PROPER_NOUN = "proper_noun"
    ADJECTIVE = "adjective"
    VERB = "verb"
    OTHER = "other"


CONTENT_TAGS = frozenset({PosTag.NOUN, PosTag.PROPER_NOUN, PosTag.ADJECTIVE})


@dataclass(frozen=True)
class ExtractedEntity:
    """A retained content token or merged vocabulary n-gram."""

    text: str
    kind: str  # "unigram" | "ngram"
    tags: tuple[PosTag, ...]
    span: tuple[int, int]  # (start position, token count)


class Tagger(Protocol):
    def tag(self, tokens: Sequence[Token]) -> list[PosTag]:
        """Return one tag per token, same length as the input."""


def tokenize(expression: str) -> list[Token]:
    """Whitespace-split, punctuation-stripped, lowercased tokens.

    Positions are indices into the whitespace split, so a dropped
    punctuation-only chunk leaves a gap.  Raises EmptyExpression when no
    token survives.
    """
    tokens = []
    for position, chunk in enumerate(expression.split()):
        normalized = chunk.lower().translate(_STRIP_TABLE)
        if normalized:
            tokens.append(Token(chunk, normalized, position))
    if not tokens:
        raise EmptyExpression("expression contains no tokens")
    return tokens


def load_stopwords(source: Union[str, Path, Iterable[str]]) -> frozenset[str]:
    """Stopword file: UTF-8, one token per line, '#' starts a comment line."""
    if isinstance(source, (str, Path)):
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    else:
        lines = list(source)
    words = set()
    for line in lines:
        word = line.strip()
        if word and not word.startswith("#"):
            words.add(word.lower())
    return frozenset(words)


def load_lexicon(source: Union[str, Path, Iterable[str]]) -> dict[str, PosTag]:
    """Lexicon file: 'token<TAB>tag' lines, '#' starts a comment line."""
    if isinstance(source, (str, Path)):
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    else:
        lines = list(source)
    lexicon: dict[str, PosTag] = {}
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        token, _, tag = line.partition("\t")
        lexicon[token.strip().lower()] = PosTag(tag.strip())
    return lexicon


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    text = resources.files("apisynth").joinpath("data/stopwords.txt").read_text("utf-8")
    return load_stopwords(text.splitlines())


@lru_cache(maxsize=1)
def default_lexicon() -> Mapping[str, PosTag]:
    text = resources.files("apisynth").joinpath("data/lexicon.txt").read_text("utf-8")
    return load_lexicon(text.splitlines())


class LexiconTagger:
    """Dictionary tagger: lexicon lookup, noun fallback for unknown tokens,
    proper-noun upgrade for capitalized tokens past position 0."""

    def __init__(self, lexicon: Optional[Mapping[str, PosTag]] = None):
        self._lexicon = default_lexicon() if lexicon is None else dict(lexicon)

    def tag(self, tokens: Sequence[Token]) -> list[PosTag]:
        tags = []
        for token in tokens:
            if token.position > 0 and token.surface[:1].isupper():
                tags.append(PosTag.PROPER_NOUN)
            else:
                tags.append(self._lexicon.get(token.normalized, PosTag.NOUN))
        return tags


def lexicon_tag(tokens: Sequence[Token], lexicon: Optional[Mapping[str, PosTag]] = None) -> list[PosTag]:
    """Tag with the bundled (or a supplied) lexicon."""
    return LexiconTagger(lexicon).tag(tokens)


def extract_entities(
    expression: str,
    model: EmbeddingModel,
    tagger: Optional[Tagger] = None,
    stopwords: Optional[frozenset[str]] = None,
) -> list[ExtractedEntity]:
    """Extract content entities from an expression.

    Pipeline: tokenize, tag, drop stopwords and non-content tags, then
    greedily merge adjacent retained tokens (left to right, longest first,
    up to three tokens) whenever their underscore-joined form is in the
    embedding vocabulary.  Remaining tokens become unigram entities, which
    may be out-of-vocabulary.
    """
    tagger = tagger or LexiconTagger()
    stopwords = default_stopwords() if stopwords is None else stopwords

    tokens = tokenize(expression)
    tags = tagger.tag(tokens)
    if len(tags) != len(tokens):
        raise ValueError("tagger returned a tag list of the wrong length")

    retained = [
        (token, tag)
        for token, tag in zip(tokens, tags)
        if tag in CONTENT_TAGS and token.normalized not in stopwords
    ]
    if not retained:
        raise NoEntities(f"no content token in {expression!r}")

    entities: list[ExtractedEntity] = []
    i = 0
    while i < len(retained):
        merged = None
        for length in range(min(MAX_NGRAM, len(retained) - i), 1, -1):
            window = retained[i : i + length]
            positions = [token.position for token, _ in window]
            if positions != list(range(positions[0], positions[0] + length)):
                continue  # a dropped token separates them in the expression
            joined = "_".join(token.normalized for token, _ in window)
            if joined in model:
                merged = ExtractedEntity(
                    text=joined,
                    kind="ngram",
                    tags=tuple(tag for _, tag in window),
                    span=(positions[0], length),
                )
                break
        if merged is not None:
            entities.append(merged)
            i += merged.span[1]
        else:
            token, tag = retained[i]
            entities.append(
                ExtractedEntity(
                    text=token.normalized,
                    kind="unigram",
                    tags=(tag,),
                    span=(token.position, 1),
                )
            )
            i += 1
    return entities
