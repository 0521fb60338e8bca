"""Reductive proof search: operators, spaces, tactics, and checkers.

The heart is reduction: applying inference rules backwards to a list of
goals until nothing is left.  Around it sit the possibly infinite
reduction space of a goal, a tactic language over operator bindings,
validity checking for tactics against procedure registries, an
independent decision procedure used as an oracle, strategy-driven
search, and journalled interactive sessions with an HTTP face.
"""

from .control import Strategy, io_prove, naive_split_prove, search
from .lang import (
    And,
    Atom,
    Bot,
    Formula,
    FragmentError,
    Imp,
    Or,
    ParseError,
    Sequent,
    Star,
    Top,
    parse,
    parse_sequent,
    render,
    render_sequent,
)
from .oracle import decide_ipl, kripke_countermodel
from .reduction import (
    NotApplicableError,
    OperatorBinding,
    applicable_bindings,
    apply_operator,
    box,
    classify,
    destruct,
    red_set,
    state,
    step_interleave,
    step_sync,
)
from .sessions import Session, SessionStore
from .space import coherence_check, extract_trees, replay_tree, unfold, unfold_iterative
from .tactical import (
    check_operator_validity,
    check_tactic_validity,
    compose_tactics,
    meeting_instance,
    meeting_tactic,
    milner_instance,
)
from .tactics import check_pentagon, parse_tactic, reaches_box, transitions

__version__ = "0.1.0"
