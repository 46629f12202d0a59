"""Command-line driver: ``pickles <command> ...``.

Exit status is 0 on success, 1 for user errors (bad input files, failing
tests) and 2 for internal errors.
"""

from __future__ import annotations

import argparse
import sys
import traceback
import warnings
from pathlib import Path

from .compose import DEFAULT_DEPTH, CompositionError, master, prune
from .conformance import MUTANTS, ReferenceSut, mutant, run_test
from .io_json import (
    SchemaError,
    dumps,
    export_sts,
    export_tests,
    import_sts,
    import_tests,
    load_fixed,
    load_plan,
)
from .parser import PicklesError, parse_spec
from .render import RenderError, render_test, rendered_file_name
from .symbolic import count_satisfying_inputs
from .testgen import GenerationError, coverage_of, generate_switch_coverage
from .translate import translate_suite
from .values import DomainError, SamplingError, SamplingPlan

USER_ERRORS = (PicklesError, SchemaError, CompositionError, GenerationError, RenderError,
               SamplingError, DomainError, OSError, KeyError)


def _plan(args) -> SamplingPlan:
    if args.samples:
        return load_plan(Path(args.samples).read_bytes())
    return SamplingPlan()


def _write(path, data: bytes):
    if path in (None, "-"):
        sys.stdout.write(data.decode("utf-8"))
    else:
        Path(path).write_bytes(data)


def cmd_translate_spec(args) -> int:
    text = Path(args.spec).read_text(encoding="utf-8")
    result = translate_suite(parse_spec(text, args.spec))
    if args.per_scenario:
        out = Path(args.per_scenario)
        out.mkdir(parents=True, exist_ok=True)
        for i, sts in enumerate(result.all, start=1):
            (out / f"scenario_{i}.json").write_bytes(export_sts(sts, result.context))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        model = master(result.primary, result.all, args.depth)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    pruned, report = prune(model, result.context, _plan(args))
    _write(args.out, export_sts(pruned, result.context))
    print(f"master model: {len(model.switches)} switches before pruning", file=sys.stderr)
    for line in report.lines():
        print(line, file=sys.stderr)
    if args.report:
        Path(args.report).write_bytes(dumps(report.as_dict()))
    return 0


def cmd_generate(args) -> int:
    model, ctx = import_sts(Path(args.model).read_bytes())
    if not model.switches:
        print("warning: the model has no switches; writing an empty suite", file=sys.stderr)
        tests = []
    else:
        tests = generate_switch_coverage(model, ctx, _plan(args), args.depth)
    _write(args.out, export_tests(tests))
    cov = coverage_of(tests, model)
    print(f"{len(tests)} tests, switch coverage {len(cov.covered)}/{len(cov.total)}", file=sys.stderr)
    return 0


def cmd_render_tests(args) -> int:
    model, ctx = import_sts(Path(args.model).read_bytes())
    tests = import_tests(Path(args.tests).read_bytes(), model, ctx)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    name = args.suite_name or Path(args.model).stem
    for k, tc in enumerate(tests, start=1):
        (out / rendered_file_name(name, k)).write_text(render_test(tc, model, ctx), encoding="utf-8")
    print(f"wrote {len(tests)} test files to {out}", file=sys.stderr)
    return 0


def cmd_count_inputs(args) -> int:
    model, ctx = import_sts(Path(args.model).read_bytes())
    switch = model.switch(args.switch)
    fixed = load_fixed(Path(args.fixed).read_bytes(), ctx)
    print(count_satisfying_inputs(switch, fixed, ctx, _plan(args)))
    return 0


def cmd_run(args) -> int:
    _, ctx = import_sts(Path(args.model).read_bytes())
    suite = parse_spec(Path(args.spec).read_text(encoding="utf-8"), args.spec) if args.spec else None
    files = []
    for p in map(Path, args.tests):
        files += sorted(p.glob("*.pickles")) if p.is_dir() else [p]
    failures = 0
    for f in files:
        sut = mutant(args.mutant) if args.mutant else ReferenceSut()
        verdict = run_test(f.read_text(encoding="utf-8"), sut, ctx, suite)
        failures += not verdict.passed
        print(f"{f.name}: {verdict}")
    label = f"mutant {args.mutant} ({MUTANTS[args.mutant]})" if args.mutant else "reference SUT"
    print(f"{len(files) - failures}/{len(files)} passed against the {label}")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--samples", help="JSON sample plan: variable path -> list of decimal strings")
    common.add_argument("--depth", type=int, default=DEFAULT_DEPTH,
                        help="number of scenarios chained in the master model (default 3)")
    common.add_argument("--out", help="output file or directory (default: stdout / current directory)")

    parser = argparse.ArgumentParser(prog="pickles", description="Model-based testing from Pickles specifications.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("translate-spec", parents=[common], help="build and prune the master model of a suite")
    p.add_argument("spec")
    p.add_argument("--per-scenario", metavar="DIR", help="also write one JSON model per scenario")
    p.add_argument("--report", metavar="FILE", help="write the pruning report as JSON")
    p.set_defaults(func=cmd_translate_spec)

    p = sub.add_parser("generate", parents=[common], help="generate a switch-covering test suite")
    p.add_argument("model")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("render-tests", parents=[common], help="write test cases as Pickles text files")
    p.add_argument("model")
    p.add_argument("tests")
    p.add_argument("--suite-name", help="file name prefix (default: model file stem)")
    p.set_defaults(func=cmd_render_tests)

    p = sub.add_parser("count-inputs", parents=[common], help="count satisfying inputs of a switch")
    p.add_argument("model")
    p.add_argument("switch")
    p.add_argument("fixed", help="JSON file fixing the location variables")
    p.set_defaults(func=cmd_count_inputs)

    p = sub.add_parser("run", parents=[common], help="run rendered tests against the bundled reference SUT")
    p.add_argument("model")
    p.add_argument("tests", nargs="+", help="test files or directories of .pickles files")
    p.add_argument("--spec", help="specification suite, used to resolve nested guards while parsing")
    p.add_argument("--mutant", type=int, choices=sorted(MUTANTS), help="run against a faulty variant")
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except USER_ERRORS as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return 1
    except Exception:  # pragma: no cover - defensive
        traceback.print_exc()
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
