"""Command line interface: `python -m affinetrees VERB [options]`.

Every verb builds a report dictionary. Reports are printed as sorted JSON
carrying the `affine-trees/1` schema tag, or as plain `key: value` lines with
`--format text`. Exit status is 0 for positive verdicts, 1 for negative ones
and 2 for input errors.
"""
import argparse
import json
import logging
import os
import re
import sys

from affinetrees import SCHEMA
from affinetrees.affine import (
    AffineAutomorphism,
    PowerSeriesAffine,
    affine_to_automaton,
    detect_affine,
    from_power_series,
    normalizer_certificate,
)
from affinetrees.exceptions import AffineTreesError, UndefinedStateError
from affinetrees.lamplighter_g import (
    PQState,
    build_G,
    nontriviality_scan,
    pq_step,
    pq_to_automorphism,
    rank_evidence,
    t_affine_data,
    verify_relations,
)
from affinetrees.mealy import (
    act_word,
    compose,
    distinguishing_word,
    equal,
    format_wreath,
    is_spherically_homogeneous,
    machine_to_dict,
    minimize,
    order_bounded,
    parse_wreath,
    portrait,
    power,
    section,
    sh_signature,
)
from affinetrees.utils import format_word, load_config, parse_word
from affinetrees.virtual_endo import (
    LamplighterElement,
    SimilarityPair,
    act_word_rep,
    base_sh_check,
    faithfulness_sample,
    portrait_rep,
    wreath_decompose,
)
from affinetrees.zd_algebra import LaurentPoly, Poly, RationalSeries

logger = logging.getLogger(__name__)

VERBS = (
    "parse",
    "act",
    "section",
    "equal",
    "sh-test",
    "sh-signature",
    "detect-affine",
    "affine-convert",
    "normalizer",
    "order",
    "portrait",
    "g-demo",
    "pq-trace",
    "scan-nontrivial",
    "vrep",
)

_FACTOR = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_']*)\s*(?:\^\s*(-?\d+))?\s*")


def build_parser() -> argparse.ArgumentParser:
    """The argument parser shared by every verb."""
    parser = argparse.ArgumentParser(
        prog="affinetrees",
        description="Exact computations with automorphisms of rooted trees given as Mealy automata",
    )
    parser.add_argument("verb", choices=VERBS, help="operation to run")
    parser.add_argument("--input", help="wreath DSL file, '-' for stdin (default: the group G)")
    parser.add_argument("--element", default="a", help="product of names, e.g. 'a*b^-1*t^2'")
    parser.add_argument("--other", help="second element for 'equal'")
    parser.add_argument("--word", default="", help="finite word as a digit string")
    parser.add_argument("--depth", type=int, help="portrait depth / number of levels / steps")
    parser.add_argument("--deg", type=int, help="polynomial degree bound for scans")
    parser.add_argument("--budget", type=int, help="state budget for automaton constructions")
    parser.add_argument("--bound", type=int, help="largest order tried by 'order'")
    parser.add_argument("--format", choices=("json", "text"), default="json")
    parser.add_argument("--config", help="YAML configuration file (default: $AFFINETREES_CONFIG)")
    parser.add_argument("--modulus", type=int, default=2, help="ring Z_d for 'affine-convert'")
    parser.add_argument("--factor", help="power series f for 'affine-convert', e.g. '1+t' or '1/1+t'")
    parser.add_argument("--offset", default="0", help="power series b for 'affine-convert'")
    parser.add_argument("--p", default="1", help="polynomial p(t) for 'pq-trace'")
    parser.add_argument("--q", default="0", help="polynomial q(t) for 'pq-trace'")
    parser.add_argument("--sign", choices=("+", "-"), default="+", help="sign for 'pq-trace'")
    parser.add_argument("--u", default="1", help="Laurent polynomial u(x) for 'vrep'")
    parser.add_argument("--fx-lamp", default="0", help="lamp of f(x) for 'vrep'")
    parser.add_argument("--fx-shift", type=int, default=1, help="shift of f(x) for 'vrep'")
    parser.add_argument("--lamp", default="1", help="lamp of the element unfolded by 'vrep'")
    parser.add_argument("--shift", type=int, default=0, help="shift of the element unfolded by 'vrep'")
    parser.add_argument("--support", type=int, help="lamp support bound for 'vrep'")
    return parser


def read_text(path: str) -> str:
    """Contents of a file, or of stdin for '-'."""
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def named_elements(args) -> dict:
    """Named automorphisms from `--input`, or the generators of G with x, y, t."""
    if args.input is None:
        return build_G().elements()
    return parse_wreath(read_text(args.input))


def resolve_element(expression: str, named: dict, state_budget: int = None):
    """Evaluates a product such as `a*b^-1*t^2` of named automorphisms.

    Raises:
        UndefinedStateError: A name is not defined.
        ValueError: The expression is malformed.
    """
    result = None
    for factor in expression.split("*"):
        match = _FACTOR.fullmatch(factor)
        if not match:
            raise ValueError(f"Cannot parse factor '{factor}' of '{expression}'")
        name, exponent = match.group(1), int(match.group(2) or 1)
        if name not in named:
            raise UndefinedStateError(f"Unknown element '{name}'")
        term = power(named[name], exponent, state_budget)
        result = term if result is None else compose(result, term, state_budget)
    return minimize(result)


def _series(text: str, modulus: int) -> RationalSeries:
    numerator, _, denominator = text.partition("/")
    return RationalSeries(
        Poly.parse(numerator, modulus, "t"), Poly.parse(denominator or "1", modulus, "t")
    )


def _machine(g) -> dict:
    return {**machine_to_dict(g), "size": g.size, "wreath": format_wreath(g)}


def _verdict(report: dict, holds: bool):
    return report, 0 if holds else 1


def run_parse(args, config):  # pylint: disable=W0613
    named = named_elements(args)
    report = {
        "degree": next(iter(named.values())).degree,
        "elements": {
            name: {
                "canonical_size": minimize(g).size,
                "permutation": str(g.permutation),
                "homogeneous": is_spherically_homogeneous(g).homogeneous,
            }
            for name, g in named.items()
        },
    }
    if args.input is not None:
        machine = next(iter(named.values())).machine
        report["states"] = [
            {
                "name": machine.name(state),
                "transitions": [machine.name(target) for target in targets],
                "output": str(machine.outputs[state]),
            }
            for state, targets in enumerate(machine.transitions)
        ]
    return report, 0


def run_act(args, config):
    g = resolve_element(args.element, named_elements(args), config["state_budget"])
    word = parse_word(args.word, g.degree)
    return {"element": args.element, "word": args.word, "image": format_word(act_word(g, word))}, 0


def run_section(args, config):
    g = resolve_element(args.element, named_elements(args), config["state_budget"])
    state = minimize(section(g, parse_word(args.word, g.degree)))
    return {"element": args.element, "word": args.word, "section": _machine(state)}, 0


def run_equal(args, config):
    if args.other is None:
        raise ValueError("'equal' needs --other")
    named = named_elements(args)
    g = resolve_element(args.element, named, config["state_budget"])
    h = resolve_element(args.other, named, config["state_budget"])
    same = equal(g, h, config["state_budget"])
    witness = None if same else format_word(distinguishing_word(g, h))
    return _verdict({"element": args.element, "other": args.other, "equal": same, "witness": witness}, same)


def run_sh_test(args, config):
    g = resolve_element(args.element, named_elements(args), config["state_budget"])
    verdict = is_spherically_homogeneous(g)
    report = {
        "element": args.element,
        "homogeneous": verdict.homogeneous,
        "witness": None if verdict else format_word(verdict.witness),
        "reference": None if verdict else format_word(verdict.reference),
    }
    return _verdict(report, verdict.homogeneous)


def run_sh_signature(args, config):
    g = resolve_element(args.element, named_elements(args), config["state_budget"])
    verdict = is_spherically_homogeneous(g)
    if not verdict:
        report = {
            "element": args.element,
            "homogeneous": False,
            "witness": format_word(verdict.witness),
            "reference": format_word(verdict.reference),
        }
        return report, 1
    signature = sh_signature(g)
    report = {
        "element": args.element,
        "homogeneous": True,
        "preperiod": [str(p) for p in signature.preperiod],
        "period": [str(p) for p in signature.period],
        "signature": str(signature),
    }
    return report, 0


def run_detect_affine(args, config):
    g = resolve_element(args.element, named_elements(args), config["state_budget"])
    result = detect_affine(g, config["state_budget"])
    affine = isinstance(result, AffineAutomorphism)
    report = {
        "element": args.element,
        "affine": affine,
        "data": result.to_dict() if affine else None,
        "refutation": None if affine else result.to_dict(),
    }
    return _verdict(report, affine)


def run_affine_convert(args, config):
    if args.factor is not None:
        tau = PowerSeriesAffine(_series(args.factor, args.modulus), _series(args.offset, args.modulus))
        automorphism = from_power_series(tau)
    elif args.input is not None:
        automorphism = AffineAutomorphism.from_dict(json.loads(read_text(args.input)))
    else:
        raise ValueError("'affine-convert' needs --factor or a JSON --input")
    g = affine_to_automaton(automorphism, config["state_budget"])
    return {"affine": automorphism.to_dict(), "machine": _machine(g)}, 0


_NORMALIZER_EXIT = {"affine": 0, "not-affine": 1, "inconclusive": 1, "defect": 2}


def run_normalizer(args, config):
    g = resolve_element(args.element, named_elements(args), config["state_budget"])
    depth = config["normalizer_depth"] if args.depth is None else args.depth
    result = normalizer_certificate(g, depth, config["state_budget"])
    report = {
        "element": args.element,
        "status": result.status,
        "depth": result.depth,
        "bounded_pass": result.bounded_pass,
        "failed_level": result.failed_level,
        "detection": result.detection.to_dict(),
    }
    return report, _NORMALIZER_EXIT[result.status]


def run_order(args, config):
    g = resolve_element(args.element, named_elements(args), config["state_budget"])
    bound = config["order_bound"] if args.bound is None else args.bound
    order = order_bounded(g, bound, config["state_budget"])
    report = {"element": args.element, "bound": bound, "order": "exceeds bound" if order is None else order}
    return _verdict(report, order is not None)


def run_portrait(args, config):
    g = resolve_element(args.element, named_elements(args), config["state_budget"])
    depth = config["portrait_depth"] if args.depth is None else args.depth
    return {"element": args.element, "portrait": portrait(g, depth).to_dict()}, 0


def run_g_demo(args, config):
    depth = config["relation_depth"] if args.depth is None else args.depth
    degree = config["scan_degree"] if args.deg is None else args.deg
    relations = verify_relations(depth, config["relation_samples"])
    t_data = t_affine_data(config["render_size"])
    normalizer = normalizer_certificate(build_G().t, config["normalizer_depth"], config["state_budget"])
    scan = nontriviality_scan(degree, min(degree, config["scan_direct_degree"]))
    rank = rank_evidence(3)
    checks = {
        "relations": all(check.holds for check in relations),
        "t_affine": t_data.matches,
        "t_normalizes": normalizer.status == "affine",
        "nontrivial": scan.all_nontrivial,
        "rank": rank.independent,
    }
    report = {
        "relations": [check.to_dict() for check in relations],
        "t_affine": {
            "data": None if t_data.data is None else t_data.data.to_dict(),
            "vector_matches": t_data.vector_matches,
            "row_mismatches": t_data.row_mismatches,
            "shift_invariant": t_data.shift_invariant,
            "corner": ["".join(str(v) for v in row) for row in t_data.corner],
        },
        "normalizer": normalizer.status,
        "scan": {
            "degree": scan.degree,
            "pairs": scan.pairs,
            "direct_checked": scan.direct_checked,
            "automaton_trivial": scan.automaton_trivial,
            "dynamics_trivial": scan.dynamics_trivial,
            "disagreements": scan.disagreements,
        },
        "rank": {
            "generators": rank.generators,
            "involutions": rank.involutions,
            "commuting": rank.commuting,
            "distinct_small_products": rank.distinct_small_products,
        },
        "checks": checks,
        "rendering": t_data.rendering,
    }
    return _verdict(report, all(checks.values()))


def run_pq_trace(args, config):
    state = PQState(Poly.parse(args.p, 2, "t"), Poly.parse(args.q, 2, "t"), 1 if args.sign == "+" else -1)
    steps = 6 if args.depth is None else args.depth
    bound = config["max_conj_power"]
    trail = []
    for _ in range(steps):
        following = pq_step(state)
        element = pq_to_automorphism(state, bound)
        target = pq_to_automorphism(following, bound)
        trail.append(
            {
                "state": str(state),
                "swaps_root": state.swaps_root,
                "root_matches": (not element.permutation.is_identity()) == state.swaps_root,
                "coherent": section(element, (0,)) == target and section(element, (1,)) == target,
            }
        )
        state = following
    holds = all(step["root_matches"] and step["coherent"] for step in trail)
    return _verdict({"trail": trail, "final": str(state), "consistent": holds}, holds)


def run_scan_nontrivial(args, config):
    degree = config["scan_degree"] if args.deg is None else args.deg
    scan = nontriviality_scan(degree, min(degree, config["scan_direct_degree"]))
    report = {
        "degree": scan.degree,
        "pairs": scan.pairs,
        "direct_checked": scan.direct_checked,
        "automaton_trivial": scan.automaton_trivial,
        "dynamics_trivial": scan.dynamics_trivial,
        "disagreements": scan.disagreements,
        "all_nontrivial": scan.all_nontrivial,
    }
    return _verdict(report, scan.all_nontrivial)


def _first_level(pair, element):
    first, second, swap = wreath_decompose(pair, element)
    return {"sections": [str(first), str(second)], "swap": swap}


def run_vrep(args, config):
    fx = LamplighterElement(LaurentPoly.parse(args.fx_lamp, 2, "x"), args.fx_shift)
    pair = SimilarityPair(LaurentPoly.parse(args.u, 2, "x"), fx)
    depth = config["vrep_depth"] if args.depth is None else args.depth
    support = config["vrep_support"] if args.support is None else args.support
    budget = config["vrep_state_budget"] if args.budget is None else args.budget
    element = LamplighterElement(LaurentPoly.parse(args.lamp, 2, "x"), args.shift)
    unfolded = portrait_rep(pair, element, depth, budget)
    base = base_sh_check(pair, depth, support, budget)
    faithful = faithfulness_sample(
        pair,
        config["faithfulness_depth"] if args.depth is None else args.depth,
        config["faithfulness_support"] if args.support is None else args.support,
        config["faithfulness_shift"],
    )
    a = LamplighterElement.generator_a()
    x = LamplighterElement.generator_x()
    report = {
        "u": pair.u.format("x"),
        "fx": str(pair.fx),
        "element": str(element),
        "first_level": {
            "a": _first_level(pair, a),
            "x": _first_level(pair, x),
            "a^x": _first_level(pair, LamplighterElement.lamps("x")),
        },
        "image": format_word(act_word_rep(pair, element, parse_word(args.word, 2))),
        "portrait": unfolded.portrait.to_dict(),
        "states": unfolded.states,
        "base_homogeneity": {
            "depth": base.depth,
            "support": base.support,
            "checked": base.checked,
            "failures": base.failures,
            "incomplete": base.incomplete,
        },
        "faithfulness": {
            "depth": faithful.depth,
            "support": faithful.support,
            "shift": faithful.max_shift,
            "sampled": faithful.sampled,
            "collisions": [list(collision) for collision in faithful.collisions],
        },
    }
    return _verdict(report, base.passed and faithful.faithful)


HANDLERS = {
    "parse": run_parse,
    "act": run_act,
    "section": run_section,
    "equal": run_equal,
    "sh-test": run_sh_test,
    "sh-signature": run_sh_signature,
    "detect-affine": run_detect_affine,
    "affine-convert": run_affine_convert,
    "normalizer": run_normalizer,
    "order": run_order,
    "portrait": run_portrait,
    "g-demo": run_g_demo,
    "pq-trace": run_pq_trace,
    "scan-nontrivial": run_scan_nontrivial,
    "vrep": run_vrep,
}


def render(verb: str, report: dict, fmt: str) -> str:
    """Serialises a report; JSON output is sorted and byte-stable."""
    if fmt == "json":
        document = {key: value for key, value in report.items() if key != "rendering"}
        return json.dumps({"schema": SCHEMA, "verb": verb, **document}, sort_keys=True, indent=2)
    lines = [f"{verb} ({SCHEMA})"]
    for key in sorted(report):
        if key == "rendering":
            continue
        value = report[key]
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True)
        lines.append(f"{key}: {value}")
    if "rendering" in report:
        lines.append(report["rendering"])
    return "\n".join(lines)


def main(argv=None) -> int:
    """Runs one verb and prints its report.

    Returns:
        int: 0 for a positive verdict, 1 for a negative one, 2 on errors.
    """
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config or os.environ.get("AFFINETREES_CONFIG"))
        if args.budget is not None:
            config["state_budget"] = args.budget
        report, status = HANDLERS[args.verb](args, config)
    except (AffineTreesError, OSError, ValueError) as error:
        logger.error("%s: %s", args.verb, error)
        return 2
    print(render(args.verb, report, args.format))
    return status


if __name__ == "__main__":
    sys.exit(main())
