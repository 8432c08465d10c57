"""apisynth: synthesize natural-language expressions into API invocations.

The pipeline extracts content entities from an expression, ranks the APIs of
a knowledge graph against them with a word-embedding model, picks the
declaration whose stored sample expressions are most similar, maps entities
onto parameters, and constructs the call once every required parameter is
bound, asking for the rest otherwise.
"""

from .embedding import EmbeddingModel, cosine, load_embeddings, normalize_token
from .errors import ApisynthError
from .extractor import (
    ExtractedEntity,
    LexiconTagger,
    PosTag,
    Token,
    extract_entities,
    lexicon_tag,
    tokenize,
)
from .kg import (
    Api,
    Declaration,
    KnowledgeGraph,
    Parameter,
    ParamValue,
    ValueNeighbor,
    add_sample_expression,
    enrich_values,
    find_apis_by_terms,
    load_kg,
    record_learned_value,
    save_kg,
)
from .service import ServiceConfig, SynthesisEngine, create_app, invoke
from .synthesis import (
    ApiCall,
    ApiScore,
    CoverageReport,
    DeclarationMatch,
    ParamValueMatrix,
    SynthesisConfig,
    SynthesisResult,
    build_call,
    check_coverage,
    map_entities_to_params,
    pick_best_declaration,
    select_apis,
    select_declaration,
    synthesize,
)

__version__ = "0.1.0"

__all__ = [
    "Api",
    "ApiCall",
    "ApiScore",
    "ApisynthError",
    "CoverageReport",
    "Declaration",
    "DeclarationMatch",
    "EmbeddingModel",
    "ExtractedEntity",
    "KnowledgeGraph",
    "LexiconTagger",
    "ParamValue",
    "ParamValueMatrix",
    "Parameter",
    "PosTag",
    "ServiceConfig",
    "SynthesisConfig",
    "SynthesisEngine",
    "SynthesisResult",
    "Token",
    "ValueNeighbor",
    "add_sample_expression",
    "build_call",
    "check_coverage",
    "cosine",
    "create_app",
    "enrich_values",
    "extract_entities",
    "find_apis_by_terms",
    "invoke",
    "lexicon_tag",
    "load_embeddings",
    "load_kg",
    "map_entities_to_params",
    "normalize_token",
    "pick_best_declaration",
    "record_learned_value",
    "save_kg",
    "select_apis",
    "select_declaration",
    "synthesize",
    "tokenize",
]
