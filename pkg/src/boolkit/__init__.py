"""boolkit: a desk-scale workbench for Boolean-valued semantics of
finitely-indexed infinitary logic — models, proofs, consistency properties,
and the compactness pipeline."""

__version__ = "0.1.0"

from .syntax import (  # noqa: F401
    And,
    Atom,
    Eq,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    Signature,
    parse,
    render,
)
