"""Exception hierarchy shared by all apisynth modules.

Every error raised by the library derives from :class:`ApisynthError`; each
subclass corresponds to one failure condition a caller may want to handle
separately.  Machine-readable ``code`` strings are stable and used by the
service layer to fold pipeline failures into ``no_match`` responses.
"""


class ApisynthError(Exception):
    """Base class for all apisynth errors."""

    code = "error"


# -- embedding -------------------------------------------------------------

class MalformedLine(ApisynthError):
    """A vector-file line could not be parsed (bad count, bad number)."""

    code = "malformed_line"

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class DuplicateToken(ApisynthError):
    code = "duplicate_token"

    def __init__(self, token: str):
        super().__init__(f"duplicate token {token!r}")
        self.token = token


class EmptyModel(ApisynthError):
    code = "empty_model"


class AllTokensOOV(ApisynthError):
    """No token of the expression is in the embedding vocabulary."""

    code = "expression_oov"


class DimensionMismatch(ApisynthError):
    code = "dimension_mismatch"


class ZeroVector(ApisynthError):
    code = "zero_vector"


class TokenOOV(ApisynthError):
    code = "token_oov"

    def __init__(self, token: str):
        super().__init__(f"token {token!r} is not in the vocabulary")
        self.token = token


# -- knowledge graph -------------------------------------------------------

class SchemaViolation(ApisynthError):
    code = "schema_violation"


class DanglingReference(ApisynthError):
    code = "dangling_reference"


class PlaceholderWithoutParameter(ApisynthError):
    code = "placeholder_without_parameter"

    def __init__(self, declaration_id: str, placeholder: str):
        super().__init__(
            f"declaration {declaration_id!r}: path placeholder [{placeholder}] "
            f"names no declared parameter"
        )
        self.declaration_id = declaration_id
        self.placeholder = placeholder


class UnknownDeclaration(ApisynthError):
    code = "unknown_declaration"

    def __init__(self, declaration_id: str):
        super().__init__(f"unknown declaration {declaration_id!r}")
        self.declaration_id = declaration_id


class UnknownParameter(ApisynthError):
    code = "unknown_parameter"

    def __init__(self, declaration_id: str, param_name: str):
        super().__init__(
            f"declaration {declaration_id!r} has no parameter {param_name!r}"
        )
        self.declaration_id = declaration_id
        self.param_name = param_name


# -- extractor ---------------------------------------------------------------

class EmptyExpression(ApisynthError):
    code = "empty_expression"


class NoEntities(ApisynthError):
    """Every token was filtered out (stopword or non-content tag)."""

    code = "no_entities"


# -- synthesis ---------------------------------------------------------------

class EmptyGraph(ApisynthError):
    code = "empty_graph"


class NoCandidates(ApisynthError):
    """No API scored at or above the selector's minimum score."""

    code = "no_api_candidates"


class NoSampleExpressions(ApisynthError):
    """No candidate declaration has an embeddable sample expression."""

    code = "no_sample_expressions"


class UnknownParameterInBindings(ApisynthError):
    code = "unknown_parameter_in_bindings"

    def __init__(self, param_name: str):
        super().__init__(f"binding names unknown parameter {param_name!r}")
        self.param_name = param_name


class MissingRequiredParameter(ApisynthError):
    code = "missing_required_parameter"

    def __init__(self, param_name: str):
        super().__init__(f"required parameter {param_name!r} is not bound")
        self.param_name = param_name


class UnboundPlaceholder(ApisynthError):
    code = "unbound_placeholder"

    def __init__(self, placeholder: str):
        super().__init__(f"no binding for path placeholder [{placeholder}]")
        self.placeholder = placeholder


class EmptyList(ApisynthError):
    code = "empty_list"
