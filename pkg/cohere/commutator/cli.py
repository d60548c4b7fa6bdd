# Python imports
import argparse
import json
import logging
import sys
from collections.abc import Sequence
from typing import Any, Callable, Optional

# Local imports
from cohere.commutator.clients.calculator import AlgebraCalculator
from cohere.commutator.constants import (
    EXIT_INPUT_ERROR,
    EXIT_NEGATIVE,
    EXIT_OK,
    EXIT_UNDECIDED,
)
from cohere.commutator.exceptions import (
    AlgebraParseError,
    AlgebraValidationError,
    CapExceededError,
    NotAbelianError,
    NotACongruenceError,
    NotAffineError,
    NotModularError,
    NotRelatedError,
    PartitionParseError,
    TermError,
    UnknownBuiltinError,
)
from cohere.commutator.formats import (
    emit_dot,
    emit_report,
    parse_algebra,
    parse_pair,
    parse_partition,
    parse_partition_with_log,
    validation_message,
)
from cohere.commutator.models import (
    CommutatorMethod,
    ComputationConfig,
    SearchOutcome,
    TermFamily,
)
from cohere.commutator.ops.congruence import maltsev_chain
from cohere.commutator.utils import write_text

logger = logging.getLogger(__name__)

INPUT_ERRORS = (
    AlgebraParseError,
    AlgebraValidationError,
    UnknownBuiltinError,
    PartitionParseError,
    TermError,
    NotRelatedError,
    NotACongruenceError,
)


def _print(args: argparse.Namespace, text: str, document: Any) -> None:
    if args.json:
        print(json.dumps(document, sort_keys=True))
    else:
        print(text)


def _run_con(calc: AlgebraCalculator, args: argparse.Namespace) -> int:
    lattice = calc.congruences()
    properties = calc.lattice_properties()
    texts = [p.to_text() for p in lattice.partitions]
    if args.dot:
        write_text(args.dot, emit_dot(lattice))
        logger.info(f"Wrote Con({calc.algebra.name}) to {args.dot}")
    _print(
        args,
        "\n".join(texts),
        {
            "congruences": texts,
            "modular": properties.modular,
            "distributive": properties.distributive,
        },
    )
    return EXIT_OK


def _run_cg(calc: AlgebraCalculator, args: argparse.Namespace) -> int:
    request = "cg:" + ",".join(args.pairs)
    partition, log = parse_partition_with_log(request, calc.size, calc.algebra)
    document: dict[str, Any] = {"congruence": partition.to_text()}
    lines = [partition.to_text()]
    if args.chain and log is not None:
        a, b = parse_pair(args.chain, calc.size)
        steps = maltsev_chain(calc.algebra, log, a, b)
        document["chain"] = [
            {
                "polynomial": step.polynomial.to_text(),
                "pair": list(step.pair),
                "start": step.start,
                "end": step.end,
            }
            for step in steps
        ]
        lines.extend(
            f"{step.start} -> {step.end}: {step.polynomial.to_text()} on {step.pair}"
            for step in steps
        )
    _print(args, "\n".join(lines), document)
    return EXIT_OK


def _run_commutator(calc: AlgebraCalculator, args: argparse.Namespace) -> int:
    alpha = parse_partition(args.alpha, calc.size, calc.algebra)
    beta = parse_partition(args.beta, calc.size, calc.algebra)
    value = calc.commutator(alpha, beta, CommutatorMethod(args.method))
    _print(
        args,
        value.to_text(),
        {
            "alpha": alpha.to_text(),
            "beta": beta.to_text(),
            "method": args.method,
            "commutator": value.to_text(),
        },
    )
    return EXIT_OK


def _run_center(calc: AlgebraCalculator, args: argparse.Namespace) -> int:
    zeta = calc.center()
    _print(args, zeta.to_text(), {"center": zeta.to_text()})
    return EXIT_OK


def _run_abelian(calc: AlgebraCalculator, args: argparse.Namespace) -> int:
    analysis = calc.abelian()
    text = (
        "abelian"
        if analysis.abelian
        else f"not abelian: [1,1] = {analysis.derived.to_text()}"
    )
    _print(
        args,
        text,
        {
            "abelian": analysis.abelian,
            "derived": analysis.derived.to_text(),
            "abelianization_size": analysis.abelianization.size,
        },
    )
    return EXIT_OK if analysis.abelian else EXIT_NEGATIVE


def _run_maltsev(calc: AlgebraCalculator, args: argparse.Namespace) -> int:
    result = calc.terms(TermFamily(args.which))
    terms = result.chain.to_text() if result.chain is not None else []
    text = "\n".join([f"{result.family.value}: {result.outcome.value}"] + terms)
    if result.reason:
        text += f"\n({result.reason})"
    _print(
        args,
        text,
        {
            "family": result.family.value,
            "outcome": result.outcome.value,
            "terms": terms,
            "reason": result.reason,
        },
    )
    if result.outcome == SearchOutcome.Found:
        return EXIT_OK
    if result.outcome == SearchOutcome.NoTerms:
        return EXIT_NEGATIVE
    return EXIT_UNDECIDED


def _run_affine(calc: AlgebraCalculator, args: argparse.Namespace) -> int:
    try:
        representation = calc.affine(zero=args.zero)
    except (NotAbelianError, NotAffineError) as e:
        logger.error(f"{calc.algebra.name} has no affine representation: {e.message}")
        _print(args, f"not affine: {e.message}", {"affine": False, "error": e.message})
        return EXIT_NEGATIVE
    lines = [
        f"zero {representation.zero}, ring of {representation.ring_size} elements",
        *(
            f"{d.symbol} = {' + '.join(f'r{c}' for c in d.coefficients)}"
            f" + {d.constant}"
            for d in representation.decompositions
        ),
    ]
    _print(
        args,
        "\n".join(lines),
        {
            "affine": True,
            **calc.affine_report(representation).model_dump(mode="json"),
        },
    )
    return EXIT_OK


def _run_report(calc: AlgebraCalculator, args: argparse.Namespace) -> int:
    report = calc.report()
    if args.dot:
        write_text(args.dot, emit_dot(calc.congruences()))
    sys.stdout.write(emit_report(report))
    return EXIT_OK


_VERBS: dict[str, Callable[[AlgebraCalculator, argparse.Namespace], int]] = {
    "con": _run_con,
    "cg": _run_cg,
    "commutator": _run_commutator,
    "center": _run_center,
    "abelian": _run_abelian,
    "maltsev": _run_maltsev,
    "affine": _run_affine,
    "report": _run_report,
}


def build_parser() -> argparse.ArgumentParser:
    """The argument parser of the ``commutator`` command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "algebra", help="Algebra document path or builtin:<name>, e.g. builtin:S3."
    )
    common.add_argument("--cap", type=int, default=None, help="Override every cap.")
    common.add_argument("--dot", default=None, help="Write the Hasse diagram here.")
    common.add_argument("--json", action="store_true", help="Print JSON output.")
    common.add_argument("--jobs", type=int, default=None, help="Number of threads.")
    common.add_argument(
        "--timing", action="store_true", help="Add timings to the report."
    )
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v info, -vv debug."
    )

    parser = argparse.ArgumentParser(
        prog="commutator",
        description="Congruences, commutators and Mal'tsev conditions of finite "
        "algebras.",
    )
    verbs = parser.add_subparsers(dest="verb", required=True)
    verbs.add_parser("con", parents=[common], help="List Con(A).")

    cg_parser = verbs.add_parser(
        "cg", parents=[common], help="Generate a congruence from pairs a-b."
    )
    cg_parser.add_argument("pairs", nargs="+", help="Generating pairs, e.g. 0-2.")
    cg_parser.add_argument(
        "--chain", default=None, help="Print a Mal'tsev chain for the pair a-b."
    )

    commutator_parser = verbs.add_parser(
        "commutator", parents=[common], help="Compute [alpha, beta]."
    )
    commutator_parser.add_argument("--alpha", default="1", help="Partition text.")
    commutator_parser.add_argument("--beta", default="1", help="Partition text.")
    commutator_parser.add_argument(
        "--method",
        choices=[m.value for m in CommutatorMethod],
        default=CommutatorMethod.TermCondition.value,
    )

    verbs.add_parser("center", parents=[common], help="Compute the center.")
    verbs.add_parser("abelian", parents=[common], help="Decide whether A is Abelian.")

    maltsev_parser = verbs.add_parser(
        "maltsev", parents=[common], help="Search for a term chain."
    )
    maltsev_parser.add_argument(
        "--which",
        choices=[f.value for f in TermFamily],
        default=TermFamily.Maltsev.value,
    )

    affine_parser = verbs.add_parser(
        "affine", parents=[common], help="Reconstruct the module of an affine algebra."
    )
    affine_parser.add_argument("--zero", type=int, default=None)

    verbs.add_parser("report", parents=[common], help="Print the full JSON report.")
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )


def _config(args: argparse.Namespace) -> ComputationConfig:
    config = ComputationConfig(include_timing=args.timing)
    if args.cap is not None:
        config = config.with_cap(args.cap)
    if args.jobs is not None:
        config = config.model_copy(update={"num_jobs": args.jobs})
    return config


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the ``commutator`` command.

    :returns: 0 on success, 1 for a negative answer, 2 for an input error and 3 when
        a cap left the question undecided.
    """
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    if (args.cap is not None and args.cap < 1) or (
        args.jobs is not None and args.jobs < 1
    ):
        logger.error("--cap and --jobs must be positive")
        return EXIT_INPUT_ERROR

    try:
        algebra = parse_algebra(args.algebra)
        calc = AlgebraCalculator(algebra=algebra, config=_config(args))
        if args.verb == "affine" and args.zero is not None and not (
            0 <= args.zero < algebra.size
        ):
            raise PartitionParseError(f"zero {args.zero} is not an element")
        return _VERBS[args.verb](calc, args)
    except INPUT_ERRORS as e:
        logger.error(f"Invalid input: {validation_message(e)}")
        return EXIT_INPUT_ERROR
    except NotModularError as e:
        logger.error(f"Needs Day terms: {e.message}")
        return EXIT_NEGATIVE
    except CapExceededError as e:
        logger.error(f"Cap reached, the answer is undecided: {e.message}")
        return EXIT_UNDECIDED


if __name__ == "__main__":
    raise SystemExit(main())
