"""The API knowledge graph: storage, persistence, querying and enrichment.

A graph holds APIs, their declarations (method + path template + parameters)
and stored parameter values.  Values carry links to semantically similar
vocabulary words, and new values arrive through two paths: embedding-neighbor
enrichment and confidence-gated learning from live conversations.

Persisted as a single UTF-8 JSON document so fixtures stay diffable.
"""

from __future__ import annotations

import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .embedding import EmbeddingModel, normalize_token
from .errors import (
    DanglingReference,
    PlaceholderWithoutParameter,
    SchemaViolation,
    UnknownDeclaration,
    UnknownParameter,
)

FORMAT_VERSION = 1
METHODS = ("GET", "POST", "PUT", "DELETE", "PATCH")
VALUE_SOURCES = ("seed", "enriched", "learned")

# Confidence gate below which conversation-observed values are discarded.
LEARNED_VALUE_THRESHOLD = 0.40

_PLACEHOLDER = re.compile(r"\[([^\[\]]+)\]")

Source = Union[str, Path, bytes, io.IOBase]


@dataclass
class ValueNeighbor:
    """Link from a stored value to a semantically similar vocabulary word."""

    literal: str
    similarity: float


@dataclass
class ParamValue:
    """One stored value of a parameter, with provenance and neighbor links."""

    literal: str
    source: str = "seed"
    neighbors: list[ValueNeighbor] = field(default_factory=list)


@dataclass
class Parameter:
    name: str
    required: bool = False
    values: list[ParamValue] = field(default_factory=list)

    def literals(self) -> list[str]:
        return [v.literal for v in self.values]

    def normalized_literals(self) -> set[str]:
        return {normalize_token(v.literal) for v in self.values}


@dataclass
class Declaration:
    """One invocable operation of an API."""

    id: str
    api_id: str
    method: str
    path_template: str
    sample_expressions: list[str] = field(default_factory=list)
    parameters: list[Parameter] = field(default_factory=list)

    def placeholders(self) -> list[str]:
        return _PLACEHOLDER.findall(self.path_template)

    def parameter(self, name: str) -> Optional[Parameter]:
        for param in self.parameters:
            if param.name == name:
                return param
        return None

    def required_parameters(self) -> list[Parameter]:
        return [p for p in self.parameters if p.required]


@dataclass
class Api:
    id: str
    name: str
    description: str = ""
    tags: list[str] = field(default_factory=list)
    base_uri: str = ""


@dataclass
class EnrichedValue:
    declaration_id: str
    parameter: str
    source_literal: str
    literal: str
    similarity: float


@dataclass
class NeighborLink:
    declaration_id: str
    parameter: str
    value_literal: str
    neighbor_literal: str
    similarity: float


@dataclass
class EnrichmentReport:
    """Every addition (and every skipped out-of-vocabulary literal) of one
    enrichment run."""

    added_values: list[EnrichedValue] = field(default_factory=list)
    added_links: list[NeighborLink] = field(default_factory=list)
    skipped_oov: list[tuple[str, str, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "added_values": [vars(v).copy() for v in self.added_values],
            "added_links": [vars(l).copy() for l in self.added_links],
            "skipped_oov": [
                {"declaration_id": d, "parameter": p, "literal": lit}
                for d, p, lit in self.skipped_oov
            ],
        }


class KnowledgeGraph:
    """APIs and declarations with referential integrity enforced on every
    mutation.  Single-writer / multi-reader: callers serialize writes."""

    def __init__(self, apis: Iterable[Api] = (), declarations: Iterable[Declaration] = ()):
        self._apis: dict[str, Api] = {}
        self._declarations: dict[str, Declaration] = {}
        for api in apis:
            self.add_api(api)
        for declaration in declarations:
            self.add_declaration(declaration)

    @property
    def format_version(self) -> int:
        return FORMAT_VERSION

    def apis(self) -> tuple[Api, ...]:
        return tuple(self._apis.values())

    def declarations(self) -> tuple[Declaration, ...]:
        return tuple(self._declarations.values())

    def api(self, api_id: str) -> Api:
        try:
            return self._apis[api_id]
        except KeyError:
            raise DanglingReference(f"unknown api {api_id!r}") from None

    def declaration(self, declaration_id: str) -> Declaration:
        try:
            return self._declarations[declaration_id]
        except KeyError:
            raise UnknownDeclaration(declaration_id) from None

    def declarations_of(self, api_id: str) -> list[Declaration]:
        return [d for d in self._declarations.values() if d.api_id == api_id]

    def add_api(self, api: Api) -> None:
        if api.id in self._apis:
            raise SchemaViolation(f"duplicate api id {api.id!r}")
        if not api.base_uri:
            raise SchemaViolation(f"api {api.id!r} has an empty base_uri")
        normalized_tags: list[str] = []
        for tag in api.tags:
            tag = normalize_token(tag)
            if tag and tag not in normalized_tags:
                normalized_tags.append(tag)
        api.tags = normalized_tags
        self._apis[api.id] = api

    def add_declaration(self, declaration: Declaration) -> None:
        if declaration.id in self._declarations:
            raise SchemaViolation(f"duplicate declaration id {declaration.id!r}")
        if declaration.api_id not in self._apis:
            raise DanglingReference(
                f"declaration {declaration.id!r} references unknown api "
                f"{declaration.api_id!r}"
            )
        if declaration.method not in METHODS:
            raise SchemaViolation(
                f"declaration {declaration.id!r} has unknown method "
                f"{declaration.method!r}"
            )
        names = [p.name for p in declaration.parameters]
        if len(names) != len(set(names)):
            raise SchemaViolation(
                f"declaration {declaration.id!r} repeats a parameter name"
            )
        for param in declaration.parameters:
            if not param.name:
                raise SchemaViolation(
                    f"declaration {declaration.id!r} has a parameter with an empty name"
                )
            literals = [v.literal for v in param.values]
            if len(literals) != len(set(literals)):
                raise SchemaViolation(
                    f"parameter {param.name!r} of {declaration.id!r} repeats a value literal"
                )
            for value in param.values:
                if value.source not in VALUE_SOURCES:
                    raise SchemaViolation(
                        f"value {value.literal!r} has unknown source {value.source!r}"
                    )
                for neighbor in value.neighbors:
                    if not 0.0 <= neighbor.similarity <= 1.0:
                        raise SchemaViolation(
                            f"neighbor {neighbor.literal!r} of value {value.literal!r} "
                            f"has similarity outside [0, 1]"
                        )
        for placeholder in declaration.placeholders():
            if declaration.parameter(placeholder) is None:
                raise PlaceholderWithoutParameter(declaration.id, placeholder)
        self._declarations[declaration.id] = declaration

    def validate(self) -> None:
        """Re-check every structural invariant of the stored content."""
        rebuilt = KnowledgeGraph()
        for api in self._apis.values():
            rebuilt.add_api(api)
        for declaration in self._declarations.values():
            rebuilt.add_declaration(declaration)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        return self._apis == other._apis and self._declarations == other._declarations


# -- persistence -------------------------------------------------------------

_API_KEYS = {"id", "name", "description", "tags", "base_uri"}
_DECL_KEYS = {"id", "api_id", "method", "path_template", "sample_expressions", "parameters"}
_PARAM_KEYS = {"name", "required", "values"}
_VALUE_KEYS = {"literal", "source", "neighbors"}
_NEIGHBOR_KEYS = {"literal", "similarity"}
_TOP_KEYS = {"format_version", "apis", "declarations"}


def _check_keys(obj: dict, allowed: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise SchemaViolation(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise SchemaViolation(f"{where}: unknown key(s) {sorted(unknown)}")


def _get(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise SchemaViolation(f"{where}: missing field {key!r}")
    value = obj[key]
    if not isinstance(value, kind):
        raise SchemaViolation(f"{where}: field {key!r} has the wrong type")
    return value


def _str_list(obj: dict, key: str, where: str) -> list[str]:
    items = _get(obj, key, list, where)
    if not all(isinstance(item, str) for item in items):
        raise SchemaViolation(f"{where}: field {key!r} must hold strings")
    return list(items)


def _parse_neighbor(raw: dict, where: str) -> ValueNeighbor:
    _check_keys(raw, _NEIGHBOR_KEYS, where)
    literal = _get(raw, "literal", str, where)
    similarity = _get(raw, "similarity", (int, float), where)
    if isinstance(similarity, bool):
        raise SchemaViolation(f"{where}: similarity must be a number")
    return ValueNeighbor(literal, float(similarity))


def _parse_value(raw: dict, where: str) -> ParamValue:
    _check_keys(raw, _VALUE_KEYS, where)
    literal = _get(raw, "literal", str, where)
    source = _get(raw, "source", str, where)
    neighbors_raw = _get(raw, "neighbors", list, where)
    neighbors = [
        _parse_neighbor(n, f"{where}.neighbors[{i}]") for i, n in enumerate(neighbors_raw)
    ]
    return ParamValue(literal, source, neighbors)


def _parse_parameter(raw: dict, where: str) -> Parameter:
    _check_keys(raw, _PARAM_KEYS, where)
    name = _get(raw, "name", str, where)
    required = _get(raw, "required", bool, where)
    values_raw = _get(raw, "values", list, where)
    values = [_parse_value(v, f"{where}.values[{i}]") for i, v in enumerate(values_raw)]
    return Parameter(name, required, values)


def _parse_declaration(raw: dict, where: str) -> Declaration:
    _check_keys(raw, _DECL_KEYS, where)
    params_raw = _get(raw, "parameters", list, where)
    parameters = [
        _parse_parameter(p, f"{where}.parameters[{i}]") for i, p in enumerate(params_raw)
    ]
    return Declaration(
        id=_get(raw, "id", str, where),
        api_id=_get(raw, "api_id", str, where),
        method=_get(raw, "method", str, where),
        path_template=_get(raw, "path_template", str, where),
        sample_expressions=_str_list(raw, "sample_expressions", where),
        parameters=parameters,
    )


def _parse_api(raw: dict, where: str) -> Api:
    _check_keys(raw, _API_KEYS, where)
    return Api(
        id=_get(raw, "id", str, where),
        name=_get(raw, "name", str, where),
        description=_get(raw, "description", str, where),
        tags=_str_list(raw, "tags", where),
        base_uri=_get(raw, "base_uri", str, where),
    )


def load_kg(source: Source) -> KnowledgeGraph:
    """Load and validate a graph document from a path, bytes or stream."""
    if isinstance(source, (str, Path)):
        data = Path(source).read_bytes()
    elif isinstance(source, bytes):
        data = source
    else:
        data = source.read()
        if isinstance(data, str):
            data = data.encode("utf-8")
    try:
        document = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaViolation(f"not a valid UTF-8 JSON document: {exc}") from None

    _check_keys(document, _TOP_KEYS, "document")
    version = _get(document, "format_version", int, "document")
    if isinstance(version, bool) or version != FORMAT_VERSION:
        raise SchemaViolation(f"unsupported format_version {version!r}")
    apis_raw = _get(document, "apis", list, "document")
    decls_raw = _get(document, "declarations", list, "document")
    apis = [_parse_api(a, f"apis[{i}]") for i, a in enumerate(apis_raw)]
    declarations = [
        _parse_declaration(d, f"declarations[{i}]") for i, d in enumerate(decls_raw)
    ]
    return KnowledgeGraph(apis, declarations)


def graph_to_dict(graph: KnowledgeGraph) -> dict:
    return {
        "format_version": graph.format_version,
        "apis": [
            {
                "id": api.id,
                "name": api.name,
                "description": api.description,
                "tags": list(api.tags),
                "base_uri": api.base_uri,
            }
            for api in graph.apis()
        ],
        "declarations": [
            {
                "id": decl.id,
                "api_id": decl.api_id,
                "method": decl.method,
                "path_template": decl.path_template,
                "sample_expressions": list(decl.sample_expressions),
                "parameters": [
                    {
                        "name": param.name,
                        "required": param.required,
                        "values": [
                            {
                                "literal": value.literal,
                                "source": value.source,
                                "neighbors": [
                                    {"literal": n.literal, "similarity": n.similarity}
                                    for n in value.neighbors
                                ],
                            }
                            for value in param.values
                        ],
                    }
                    for param in decl.parameters
                ],
            }
            for decl in graph.declarations()
        ],
    }


def save_kg(graph: KnowledgeGraph) -> bytes:
    """Serialize to the canonical UTF-8 JSON document (deterministic bytes)."""
    text = json.dumps(graph_to_dict(graph), indent=2, ensure_ascii=False)
    return (text + "\n").encode("utf-8")


# -- enrichment and learning --------------------------------------------------

def add_sample_expression(graph: KnowledgeGraph, declaration_id: str, expression: str) -> bool:
    """Append a sample expression to a declaration; exact duplicates are a no-op.

    Returns whether the expression was added.
    """
    declaration = graph.declaration(declaration_id)
    if expression in declaration.sample_expressions:
        return False
    declaration.sample_expressions.append(expression)
    return True


def _display_form(token: str) -> str:
    # vocabulary n-grams use underscores; stored literals read as plain text
    return token.replace("_", " ")


def enrich_values(
    graph: KnowledgeGraph,
    model: EmbeddingModel,
    k: int,
    min_sim: float,
) -> EnrichmentReport:
    """Expand stored values with their embedding neighbors.

    For every seed or learned value whose literal is in the vocabulary, the
    top-k neighbors with similarity >= min_sim are linked to that value and
    added as new values with source="enriched" (literals already present are
    skipped).  Values that are themselves enriched are not expanded again,
    which keeps a re-run with identical inputs a no-op and stops the graph
    drifting transitively away from curated values.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if not 0.0 <= min_sim <= 1.0:
        raise ValueError("min_sim must be within [0, 1]")
    report = EnrichmentReport()
    for declaration in graph.declarations():
        for param in declaration.parameters:
            present = param.normalized_literals()
            for value in [v for v in param.values if v.source != "enriched"]:
                token = normalize_token(value.literal)
                if token not in model:
                    report.skipped_oov.append((declaration.id, param.name, value.literal))
                    continue
                linked = {normalize_token(n.literal) for n in value.neighbors}
                for neighbor_token, similarity in model.nearest_neighbors(token, k):
                    if similarity < min_sim:
                        break  # neighbors come best-first
                    display = _display_form(neighbor_token)
                    if neighbor_token not in linked:
                        value.neighbors.append(ValueNeighbor(display, similarity))
                        linked.add(neighbor_token)
                        report.added_links.append(
                            NeighborLink(
                                declaration.id, param.name, value.literal, display, similarity
                            )
                        )
                    if neighbor_token not in present:
                        param.values.append(ParamValue(display, "enriched", []))
                        present.add(neighbor_token)
                        report.added_values.append(
                            EnrichedValue(
                                declaration.id, param.name, value.literal, display, similarity
                            )
                        )
    return report


def record_learned_value(
    graph: KnowledgeGraph,
    declaration_id: str,
    param_name: str,
    literal: str,
    confidence: float,
    threshold: float = LEARNED_VALUE_THRESHOLD,
) -> bool:
    """Store a conversation-observed value when confidence clears the gate.

    The threshold is inclusive (confidence >= threshold stores).  Literals
    already stored (compared in normalized form) are never duplicated.
    Returns whether the value was stored.
    """
    declaration = graph.declaration(declaration_id)
    param = declaration.parameter(param_name)
    if param is None:
        raise UnknownParameter(declaration_id, param_name)
    if confidence < threshold:
        return False
    if normalize_token(literal) in param.normalized_literals():
        return False
    param.values.append(ParamValue(literal, "learned", []))
    return True


def find_apis_by_terms(graph: KnowledgeGraph, terms: Sequence[str]) -> list[Api]:
    """APIs whose tags, parameter names or stored values match any term
    (exact comparison after normalization)."""
    wanted = {normalize_token(t) for t in terms if normalize_token(t)}
    if not wanted:
        return []
    hits = []
    for api in graph.apis():
        searchable = set(api.tags)
        for declaration in graph.declarations_of(api.id):
            for param in declaration.parameters:
                searchable.add(normalize_token(param.name))
                searchable.update(param.normalized_literals())
        if wanted & searchable:
            hits.append(api)
    return sorted(hits, key=lambda api: api.id)
