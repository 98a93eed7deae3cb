"""Python front end for the magicsim C++ core.

Report-producing calls return plain dicts decoded from the core's JSON.
"""

import json

from . import _magicsim
from ._magicsim import (
    InvariantError,
    ValidationError,
    activation_fidelity,
    asymptotic_fidelity_printed,
    asymptotic_fidelity_recurrence,
    classify_phase,
    constants,
    daisy_limit,
    daisy_recurrence,
    ins_region_csv,
    lambda_star,
    phase_diagram_csv,
    q_max,
    q_min,
    single_qubit_reduction_fidelity,
    st_norm,
    stabilizer_count,
    state_matrix,
    tan2_pi8,
    twirl,
)

__all__ = [
    "InvariantError",
    "ValidationError",
    "activation_fidelity",
    "asymptotic_fidelity_printed",
    "asymptotic_fidelity_recurrence",
    "classify_phase",
    "constants",
    "daisy_limit",
    "daisy_recurrence",
    "dump_stabilizers",
    "hull_check",
    "ins_region_csv",
    "lambda_star",
    "phase_diagram_csv",
    "q_max",
    "q_min",
    "ratios",
    "reduction_survey_activator",
    "run_activation",
    "run_asymptotic",
    "run_catalysis",
    "run_daisy_chain",
    "single_qubit_reduction_fidelity",
    "st_norm",
    "stabilizer_count",
    "state_matrix",
    "tan2_pi8",
    "twirl",
    "verify",
]


def run_catalysis(variant="pure"):
    return json.loads(_magicsim.run_catalysis(variant))


def run_activation(q, f):
    return json.loads(_magicsim.run_activation(q, f))


def run_asymptotic(f, n):
    return json.loads(_magicsim.run_asymptotic(f, n))


def run_daisy_chain(q, r, n):
    return json.loads(_magicsim.run_daisy_chain(q, r, n))


def reduction_survey_activator(q):
    return json.loads(_magicsim.reduction_survey_activator(q))


def hull_check(spec):
    return json.loads(_magicsim.hull_check(spec))


def dump_stabilizers(n):
    return json.loads(_magicsim.dump_stabilizers(n))


def ratios(p, target=None):
    """Closest feasible ratio to `target` (default tan^2(pi/8))."""
    return json.loads(_magicsim.ratios(p, tan2_pi8() if target is None else target))


def verify(only=(), seed=0):
    return json.loads(_magicsim.verify(list(only), seed))
