"""asmprop: property toolkit for a finite-domain ASM modeling language.

Parse specifications and scenarios, type-check temporal properties against
the signature, model-check CTL (and bounded LTL) natively at desk scale,
emit SMV models, export counterexamples as executable scenarios, and drive
an LLM assistant through property elicitation, formalization, explanation,
and checker-feedback repair.
"""

__version__ = "0.1.0"

from .lang import (  # noqa: F401
    AsmSpecification,
    AvallaScenario,
    Logic,
    ParseError,
    parse_asm,
    parse_avalla,
    parse_property,
    print_asm,
    print_avalla,
    print_formula,
)
from .diagnostics import Diagnostic, Diagnostics, Severity, render_diagnostics  # noqa: F401
from .signature import (  # noqa: F401
    SignatureError,
    TypedFormula,
    extract_signature,
    signature_summary,
    typecheck_formula,
    typecheck_scenario,
    typecheck_spec,
)
from .interpreter import (  # noqa: F401
    Interpreter,
    ScenarioResult,
    State,
    UpdateSet,
    compute_update_set,
    initial_states,
    run_scenario,
    successors,
)
