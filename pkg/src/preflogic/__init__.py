"""Workbench for quantified reason-based preference logic.

Parse formulas, evaluate them against explicit finite models under three
semantics (utility, preorder, generalized), search bounded model spaces
for countermodels and witnesses, and compile sentences to first-order
logic for external provers.
"""

from .syntax import (
    And,
    Atom,
    Bottom,
    Equals,
    Equiv,
    Exists,
    Forall,
    Formula,
    FormulaError,
    Geq,
    Gt,
    Iff,
    Implies,
    Leq,
    Lt,
    Not,
    Or,
    ParseError,
    Signature,
    App,
    Top,
    Var,
    expand,
    format_formula,
    free_variables,
    is_closed,
    is_core,
    kripke_embed,
    modal_depth,
    parse,
)
from .model import (
    Assignment,
    GeneralizedModel,
    Model,
    ModelError,
    PreorderModel,
    Proposition,
    Selector,
    UtilityModel,
    are_isomorphic,
    is_metric,
    is_order_rationalizable,
    is_reflexive,
    is_transitive,
    is_utility_invariant,
    load_model,
    model_from_dict,
    model_to_dict,
    preorder_from_utility,
    realize_preorder,
    save_model,
    validate,
)
from .semantics import (
    EvalError,
    GlobalModalityReport,
    box,
    check_global_modality,
    denote_closed,
    diamond,
    evaluate,
)

__version__ = "0.1.0"
