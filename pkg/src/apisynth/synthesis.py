"""The synthesis pipeline: rank APIs for the extracted entities, pick the
declaration whose sample expressions best match the user expression, map
entities onto parameters, check required-parameter coverage, and either
construct the concrete call or report which parameters the user still has
to supply.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union
from urllib.parse import quote

from .embedding import EmbeddingModel, cosine, normalize_token
from .errors import (
    AllTokensOOV,
    EmptyExpression,
    EmptyGraph,
    EmptyList,
    MissingRequiredParameter,
    NoCandidates,
    NoEntities,
    NoSampleExpressions,
    UnboundPlaceholder,
    UnknownParameterInBindings,
)
from .extractor import ExtractedEntity, Tagger, extract_entities, tokenize
from .kg import Declaration, KnowledgeGraph, record_learned_value

READY = "ready"
NEEDS_INPUT = "needs_input"
NO_MATCH = "no_match"

# Declarations whose best-sample similarity falls within this window of the
# maximum compete on potential coverage instead of similarity alone.
TIE_WINDOW = 1e-6


@dataclass(frozen=True)
class SynthesisConfig:
    """Pipeline thresholds; all overridable through service configuration."""

    top_k: int = 5
    api_min_score: float = 0.30
    declaration_floor: float = 0.25
    kg_update_threshold: float = 0.40


@dataclass
class ApiScore:
    api_id: str
    score: float
    matched_evidence: list[tuple[str, str, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "api_id": self.api_id,
            "score": self.score,
            "matched_evidence": [
                {"entity": e, "term": t, "similarity": s}
                for e, t, s in self.matched_evidence
            ],
        }


@dataclass
class DeclarationMatch:
    declaration_id: str
    best_sample_expression: str
    similarity: float

    def to_dict(self) -> dict:
        return {
            "declaration_id": self.declaration_id,
            "best_sample_expression": self.best_sample_expression,
            "similarity": self.similarity,
        }


@dataclass
class MatrixEntry:
    param_name: str
    entity_text: str
    confidence: float


@dataclass
class ParamValueMatrix:
    """Parameter-to-entity bindings with confidence, one row per parameter."""

    entries: list[MatrixEntry] = field(default_factory=list)

    def entry(self, param_name: str) -> Optional[MatrixEntry]:
        for entry in self.entries:
            if entry.param_name == param_name:
                return entry
        return None

    def to_dict(self) -> list[dict]:
        return [
            {"param": e.param_name, "entity": e.entity_text, "confidence": e.confidence}
            for e in self.entries
        ]


@dataclass
class CoverageReport:
    declaration_id: str
    required_total: int
    required_bound: int
    coverage: float
    missing_required: list[str] = field(default_factory=list)
    bound_optional: list[tuple[str, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "declaration_id": self.declaration_id,
            "required_total": self.required_total,
            "required_bound": self.required_bound,
            "coverage": self.coverage,
            "missing_required": list(self.missing_required),
            "bound_optional": [{"param": p, "value": v} for p, v in self.bound_optional],
        }


@dataclass
class ApiCall:
    method: str
    url: str
    bindings: dict[str, str] = field(default_factory=dict)
    body: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "url": self.url,
            "bindings": dict(self.bindings),
            "body": dict(self.body),
        }


@dataclass
class LearnedValue:
    param_name: str
    literal: str
    confidence: float
    accepted: bool

    def to_dict(self) -> dict:
        return {
            "param": self.param_name,
            "literal": self.literal,
            "confidence": self.confidence,
            "accepted": self.accepted,
        }


@dataclass
class SynthesisResult:
    status: str
    reason: Optional[str] = None
    api_score: Optional[ApiScore] = None
    declaration_match: Optional[DeclarationMatch] = None
    matrix: Optional[ParamValueMatrix] = None
    coverage_report: Optional[CoverageReport] = None
    call: Optional[ApiCall] = None
    learned: list[LearnedValue] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "reason": self.reason,
            "api": self.api_score.to_dict() if self.api_score else None,
            "declaration": self.declaration_match.to_dict() if self.declaration_match else None,
            "matrix": self.matrix.to_dict() if self.matrix else [],
            "coverage": self.coverage_report.to_dict() if self.coverage_report else None,
            "call": self.call.to_dict() if self.call else None,
            "learned": [lv.to_dict() for lv in self.learned],
        }


Entity = Union[ExtractedEntity, str]


def _entity_text(entity: Entity) -> str:
    if isinstance(entity, ExtractedEntity):
        return entity.text
    return normalize_token(entity)


def _similarity(model: EmbeddingModel, a: str, b: str) -> float:
    """Exact normalized match counts 1.0, otherwise embedding cosine; pairs
    that cannot be compared (either side out of vocabulary) score 0."""
    if a == b:
        return 1.0
    va = model.vector_of(a)
    vb = model.vector_of(b)
    if va is None or vb is None:
        return 0.0
    return max(0.0, cosine(va, vb))


def _api_terms(graph: KnowledgeGraph, api_id: str) -> set[str]:
    api = graph.api(api_id)
    terms = set(api.tags)
    for declaration in graph.declarations_of(api_id):
        for param in declaration.parameters:
            terms.add(normalize_token(param.name))
            terms.update(param.normalized_literals())
    return terms


def select_apis(
    entities: Sequence[Entity],
    graph: KnowledgeGraph,
    model: EmbeddingModel,
    top_k: int = 5,
    min_score: float = 0.30,
) -> list[ApiScore]:
    """Rank APIs by the mean, over entities, of each entity's best similarity
    against the API's tags, parameter names and stored values.

    Returns at most top_k APIs scoring at least min_score, best first, ties
    broken by api id.
    """
    if not graph.apis():
        raise EmptyGraph("the graph holds no APIs")
    if not entities:
        raise NoEntities("no entities to match against the graph")

    scores = []
    for api in graph.apis():
        terms = _api_terms(graph, api.id)
        evidence = []
        bests = []
        for entity in entities:
            text = _entity_text(entity)
            best_sim = 0.0
            best_term = None
            for term in sorted(terms):
                sim = _similarity(model, text, term)
                if sim > best_sim:
                    best_sim, best_term = sim, term
            bests.append(best_sim)
            if best_term is not None:
                evidence.append((text, best_term, best_sim))
        scores.append(ApiScore(api.id, sum(bests) / len(bests), evidence))

    scores.sort(key=lambda s: (-s.score, s.api_id))
    candidates = [s for s in scores if s.score >= min_score][: max(top_k, 0)]
    if not candidates:
        raise NoCandidates(f"no API scored at least {min_score}")
    return candidates


def _candidate_ids(candidate_apis: Sequence[Union[ApiScore, str]]) -> list[str]:
    ids = []
    for candidate in candidate_apis:
        api_id = candidate.api_id if isinstance(candidate, ApiScore) else candidate
        if api_id not in ids:
            ids.append(api_id)
    return ids


def declaration_matches(
    expression_tokens: Sequence[str],
    candidate_apis: Sequence[Union[ApiScore, str]],
    graph: KnowledgeGraph,
    model: EmbeddingModel,
) -> list[DeclarationMatch]:
    """Best-sample similarity for every candidate declaration.

    The user expression and each stored sample are embedded as the sum of
    their in-vocabulary token vectors and compared by cosine.  Samples that
    cannot be embedded are skipped; declarations with no embeddable sample
    are omitted.
    """
    expression_vec = model.expression_vector(list(expression_tokens))
    matches = []
    saw_sample = False
    for api_id in _candidate_ids(candidate_apis):
        for declaration in graph.declarations_of(api_id):
            best: Optional[tuple[float, str]] = None
            for sample in declaration.sample_expressions:
                saw_sample = True
                try:
                    sample_tokens = [t.normalized for t in tokenize(sample)]
                    sample_vec = model.expression_vector(sample_tokens)
                except (AllTokensOOV, EmptyExpression):
                    continue
                similarity = cosine(expression_vec, sample_vec)
                if best is None or similarity > best[0]:
                    best = (similarity, sample)
            if best is not None:
                matches.append(DeclarationMatch(declaration.id, best[1], best[0]))
    if not matches:
        detail = "no embeddable sample expression" if saw_sample else "no sample expressions"
        raise NoSampleExpressions(f"{detail} among candidate APIs")
    return matches


def select_declaration(
    expression_tokens: Sequence[str],
    candidate_apis: Sequence[Union[ApiScore, str]],
    graph: KnowledgeGraph,
    model: EmbeddingModel,
    entities: Optional[Sequence[Entity]] = None,
) -> DeclarationMatch:
    """The declaration owning the sample most similar to the expression.

    When entities are supplied, declarations within TIE_WINDOW of the best
    similarity compete on potential coverage (how many required parameters
    the entities could bind); remaining ties fall back to declaration id.
    User bindings deliberately play no part, so the chosen declaration is
    stable while the user answers follow-up questions.
    """
    matches = declaration_matches(expression_tokens, candidate_apis, graph, model)
    matches.sort(key=lambda m: (-m.similarity, m.declaration_id))
    top = matches[0]
    if entities is None:
        return top
    tied = [m for m in matches if top.similarity - m.similarity <= TIE_WINDOW]
    if len(tied) == 1:
        return top
    reports = []
    for match in tied:
        declaration = graph.declaration(match.declaration_id)
        matrix = map_entities_to_params(entities, declaration, graph, model)
        reports.append(check_coverage(declaration, matrix, {}))
    winner = pick_best_declaration(
        reports, similarities={m.declaration_id: m.similarity for m in tied}
    )
    return next(m for m in tied if m.declaration_id == winner.declaration_id)


def map_entities_to_params(
    entities: Sequence[Entity],
    declaration: Declaration,
    graph: KnowledgeGraph,
    model: EmbeddingModel,
) -> ParamValueMatrix:
    """Assign entities to parameters greedily by affinity.

    An entity's affinity for a parameter is its best similarity against the
    parameter's stored values.  Each entity and each parameter is used at
    most once; only strictly positive affinities produce a binding, and the
    winning affinity is kept as the row's confidence.
    """
    pairs = []
    for param in declaration.parameters:
        literals = sorted(param.normalized_literals())
        for entity in entities:
            text = _entity_text(entity)
            affinity = 0.0
            for literal in literals:
                affinity = max(affinity, _similarity(model, text, literal))
            if affinity > 0.0:
                pairs.append((affinity, param.name, text))

    pairs.sort(key=lambda p: (-p[0], p[1], p[2]))
    assigned: dict[str, tuple[str, float]] = {}
    used_entities: set[str] = set()
    for affinity, param_name, text in pairs:
        if param_name in assigned or text in used_entities:
            continue
        assigned[param_name] = (text, affinity)
        used_entities.add(text)

    entries = [
        MatrixEntry(param.name, *assigned[param.name])
        for param in declaration.parameters
        if param.name in assigned
    ]
    return ParamValueMatrix(entries)


def check_coverage(
    declaration: Declaration,
    matrix: ParamValueMatrix,
    user_bindings: Mapping[str, str],
) -> CoverageReport:
    """Coverage = bound required parameters / required parameters.

    A parameter counts as bound when the matrix maps it or the user supplied
    a value (user values win conflicts).  A declaration without required
    parameters has coverage 1.
    """
    declared = {p.name for p in declaration.parameters}
    for name in user_bindings:
        if name not in declared:
            raise UnknownParameterInBindings(name)

    def bound_value(name: str) -> Optional[str]:
        if name in user_bindings:
            return str(user_bindings[name])
        entry = matrix.entry(name)
        return entry.entity_text if entry else None

    required = [p.name for p in declaration.parameters if p.required]
    bound = [name for name in required if bound_value(name) is not None]
    missing = [name for name in required if bound_value(name) is None]
    coverage = len(bound) / len(required) if required else 1.0
    bound_optional = [
        (p.name, bound_value(p.name))
        for p in declaration.parameters
        if not p.required and bound_value(p.name) is not None
    ]
    return CoverageReport(
        declaration_id=declaration.id,
        required_total=len(required),
        required_bound=len(bound),
        coverage=coverage,
        missing_required=missing,
        bound_optional=bound_optional,  # type: ignore[arg-type]
    )


def pick_best_declaration(
    reports: Sequence[CoverageReport],
    similarities: Optional[Mapping[str, float]] = None,
) -> CoverageReport:
    """The report with the highest coverage; ties prefer the higher
    declaration-match similarity, then the smaller declaration id."""
    if not reports:
        raise EmptyList("no coverage reports to choose from")
    sims = similarities or {}
    return min(
        reports,
        key=lambda r: (-r.coverage, -sims.get(r.declaration_id, 0.0), r.declaration_id),
    )


def build_call(
    graph: KnowledgeGraph,
    declaration: Declaration,
    bindings: Mapping[str, str],
) -> ApiCall:
    """Expand the path template into a full URL.

    Underscores in values are rendered as spaces, then percent-encoded
    (space -> %20).  Bound parameters that do not appear in the template are
    appended as query pairs for GET and carried as body fields otherwise.
    """
    api = graph.api(declaration.api_id)
    rendered = {name: str(value).replace("_", " ") for name, value in bindings.items()}

    for param in declaration.required_parameters():
        if param.name not in rendered:
            raise MissingRequiredParameter(param.name)

    placeholders = declaration.placeholders()
    path = declaration.path_template
    for placeholder in placeholders:
        if placeholder not in rendered:
            raise UnboundPlaceholder(placeholder)
        path = path.replace(f"[{placeholder}]", quote(rendered[placeholder], safe=""))

    url = "https://" + api.base_uri + path

    declared_order = [p.name for p in declaration.parameters]
    extras = [n for n in declared_order if n in rendered and n not in placeholders]
    extras += sorted(n for n in rendered if n not in declared_order and n not in placeholders)

    body: dict[str, str] = {}
    if declaration.method == "GET":
        for name in extras:
            separator = "&" if "?" in url else "?"
            url += f"{separator}{quote(name, safe='')}={quote(rendered[name], safe='')}"
    else:
        body = {name: rendered[name] for name in extras}

    return ApiCall(declaration.method, url, bindings=rendered, body=body)


def synthesize(
    expression: str,
    graph: KnowledgeGraph,
    model: EmbeddingModel,
    user_bindings: Optional[Mapping[str, str]] = None,
    config: Optional[SynthesisConfig] = None,
    tagger: Optional[Tagger] = None,
    stopwords: Optional[frozenset[str]] = None,
    learn: bool = True,
) -> SynthesisResult:
    """Run the full pipeline for one expression.

    Returns status "ready" with a constructed call when every required
    parameter is bound, "needs_input" with the missing parameter names
    otherwise, and "no_match" (with a machine-readable reason) when no API
    or declaration clears the configured thresholds.  On "ready", matrix
    bindings are submitted to the knowledge-graph updater, which stores them
    when their confidence clears the threshold; the caller decides whether
    the mutated graph is persisted.
    """
    config = config or SynthesisConfig()
    user_bindings = dict(user_bindings or {})

    try:
        entities = extract_entities(expression, model, tagger, stopwords)
    except NoEntities as exc:
        return SynthesisResult(status=NO_MATCH, reason=exc.code)

    try:
        api_scores = select_apis(
            entities, graph, model, top_k=config.top_k, min_score=config.api_min_score
        )
    except (EmptyGraph, NoCandidates) as exc:
        return SynthesisResult(status=NO_MATCH, reason=exc.code)

    expression_tokens = [t.normalized for t in tokenize(expression)]
    try:
        match = select_declaration(
            expression_tokens, api_scores, graph, model, entities=entities
        )
    except (AllTokensOOV, NoSampleExpressions) as exc:
        return SynthesisResult(status=NO_MATCH, reason=exc.code, api_score=api_scores[0])

    declaration = graph.declaration(match.declaration_id)
    api_score = next(
        (s for s in api_scores if s.api_id == declaration.api_id), api_scores[0]
    )
    if match.similarity < config.declaration_floor:
        return SynthesisResult(
            status=NO_MATCH,
            reason="low_declaration_similarity",
            api_score=api_score,
            declaration_match=match,
        )

    matrix = map_entities_to_params(entities, declaration, graph, model)
    try:
        report = check_coverage(declaration, matrix, user_bindings)
    except UnknownParameterInBindings as exc:
        return SynthesisResult(
            status=NO_MATCH, reason=exc.code, api_score=api_score, declaration_match=match
        )

    if report.coverage < 1.0:
        return SynthesisResult(
            status=NEEDS_INPUT,
            api_score=api_score,
            declaration_match=match,
            matrix=matrix,
            coverage_report=report,
        )

    bindings: dict[str, str] = {}
    for param in declaration.parameters:
        if param.name in user_bindings:
            bindings[param.name] = str(user_bindings[param.name])
        else:
            entry = matrix.entry(param.name)
            if entry is not None:
                bindings[param.name] = entry.entity_text
    try:
        call = build_call(graph, declaration, bindings)
    except (MissingRequiredParameter, UnboundPlaceholder) as exc:
        return SynthesisResult(
            status=NO_MATCH, reason=exc.code, api_score=api_score, declaration_match=match
        )

    learned: list[LearnedValue] = []
    if learn:
        for entry in matrix.entries:
            literal = entry.entity_text.replace("_", " ")
            accepted = record_learned_value(
                graph,
                declaration.id,
                entry.param_name,
                literal,
                entry.confidence,
                threshold=config.kg_update_threshold,
            )
            learned.append(
                LearnedValue(entry.param_name, literal, entry.confidence, accepted)
            )

    return SynthesisResult(
        status=READY,
        api_score=api_score,
        declaration_match=match,
        matrix=matrix,
        coverage_report=report,
        call=call,
        learned=learned,
    )
