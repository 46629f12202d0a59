"""Model-based test generation from Pickles (Gherkin-style) specifications.

The pipeline: parse a suite, translate each scenario to a symbolic
transition system, compose them into a master model, prune it, generate a
switch-covering test suite, and render the tests back to Pickles text.
"""

from importlib import resources

from .compose import choice, master, prune, sequential
from .conformance import ReferenceSut, Verdict, mutant, run_test
from .io_json import export_sts, export_tests, import_sts, import_tests
from .parser import PicklesError, PicklesSemanticError, PicklesSyntaxError, parse_spec, parse_testcase
from .printer import pretty_print
from .render import render_test, render_value
from .sts import Sts, Switch, evaluate, sink_locations, validate
from .symbolic import count_satisfying_inputs, path_condition, solve
from .testgen import FormalTestCase, coverage_of, generate_switch_coverage
from .translate import build_context, map_guard_block, translate_scenario, translate_suite
from .values import SamplingPlan, enumerate_domain

__version__ = "0.1.0"


def case_study_text() -> str:
    """The bundled traffic-availability suite."""
    return resources.files(__name__).joinpath("data/traffic.pickles").read_text(encoding="utf-8")


__all__ = [
    "FormalTestCase", "PicklesError", "PicklesSemanticError", "PicklesSyntaxError", "ReferenceSut",
    "SamplingPlan", "Sts", "Switch", "Verdict", "build_context", "case_study_text", "choice",
    "count_satisfying_inputs", "coverage_of", "enumerate_domain", "evaluate", "export_sts",
    "export_tests", "generate_switch_coverage", "import_sts", "import_tests", "map_guard_block",
    "master", "mutant", "parse_spec", "parse_testcase", "path_condition", "pretty_print", "prune",
    "render_test", "render_value", "run_test", "sequential", "sink_locations", "solve",
    "translate_scenario", "translate_suite", "validate",
]
