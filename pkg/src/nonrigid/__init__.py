"""Egocentric epistemic logic with nonrigid names.

Model checking for de re (``R[n]``) and de dicto (``D[n]``) knowledge
and the agent-change modality ``@[n]``, plus a truth-set closure engine
that decides definability of one modality from others on a given model.
"""

from .algebra import (
    Certificate,
    ClosureFamily,
    certificate_problems,
    close,
    decide_definability,
    oracle_family,
    verify_certificate,
)
from .errors import EvaluationError, ModelError, NonrigidError, ParseError
from .model import Model, ModelParams, fixture, load_model, random_model, validate_model
from .search import SearchResult, search_agent_specific_counterexample
from .semantics import PointedQuery, TruthSet, apply_op, equivalent_on, satisfies, truth_set
from .syntax import Signature, enumerate_formulas, parse_formula, parse_signature, print_formula

__all__ = [
    "Certificate",
    "ClosureFamily",
    "EvaluationError",
    "Model",
    "ModelError",
    "ModelParams",
    "NonrigidError",
    "ParseError",
    "PointedQuery",
    "SearchResult",
    "Signature",
    "TruthSet",
    "apply_op",
    "certificate_problems",
    "close",
    "decide_definability",
    "enumerate_formulas",
    "equivalent_on",
    "fixture",
    "load_model",
    "oracle_family",
    "parse_formula",
    "parse_signature",
    "print_formula",
    "random_model",
    "satisfies",
    "search_agent_specific_counterexample",
    "truth_set",
    "validate_model",
    "verify_certificate",
]
