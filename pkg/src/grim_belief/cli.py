"""Command-line front end.

Exit codes: 0 success or equilibrium, 1 not-equilibrium or a failed
condition, 2 input or usage error. ``--json`` prints a machine-readable
report instead of the text summary. Model arguments take a file path or the
name of a bundled example (``examples/pd_grid_uniform.json`` also works).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from . import corpus
from .almost_complete import (coverage_bounds, high_discount_nature, is_almost_complete_prior,
                              is_almost_complete_strong, strong_eps_profile)
from .belief_operators import ThresholdFunction, common_f_belief, iterated_pair, lower_endpoint
from .belief_space import validate_model
from .equilibrium import exhaustive_search, maximal_cooperation, verify_formula
from .errors import ConfigError, DomainError, ModelError, PreconditionError
from .events import describe, evaluate
from .model_io import DocumentError, ModelDocument, read_model
from .oracle import EXPECTATION, JOINT, PAYOFF_MODES, TypeValuer, verify_oracle
from .rational import as_rational, format_rational
from .reports import DEVIATION_CLASSES, CooperationPair, DeviationDescriptor
from .simulate import SimConfig, course_of, crosscheck, simulate_payoff, thread_count
from .stage_game import grim_trigger_threshold
from .thresholds import expectation_thresholds, thresholds

OK, FAILED, INPUT_ERROR = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(INPUT_ERROR)


def _rational(text):
    try:
        return as_rational(text)
    except (TypeError, ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _fmt(x):
    return format_rational(x)


def _load(args) -> ModelDocument:
    return read_model(corpus.resolve(args.model))


def _names(doc: ModelDocument):
    return corpus.event_names(doc)


def _event(doc, text, names):
    return evaluate(text, doc.model, names)


def _pair(doc, args, names) -> CooperationPair:
    return CooperationPair.of(doc.model, _event(doc, args.K1, names), _event(doc, args.K2, names))


def _emit(args, payload: dict, lines: List[str]):
    if args.json:
        print(json.dumps(payload, indent=2, default=str))
    else:
        print("\n".join(lines))


def _pair_text(pair, model):
    return f"({describe(pair[0], model, 0)}, {describe(pair[1], model, 1)})"


def _pair_json(pair, model):
    return [list(model.types_in(i, pair[i])) for i in range(2)]


def _report_lines(report, game) -> List[str]:
    lines = [f"{report.route}: {report.verdict}"]
    for note in report.notes:
        lines.append(f"  note: {note}")
    seen = set()
    for r in report.failures():
        key = (r.player, r.condition, r.lhs, r.rhs)
        if key in seen:
            continue
        seen.add(key)
        lines.append(f"  player {r.player + 1} world {r.world}: {r.condition} fails, {_fmt(r.lhs)} vs {_fmt(r.rhs)}")
    for w in report.witnesses:
        lines.append(f"  witness: player {w.player + 1} at world {w.world} gains {_fmt(w.gain)} "
                     f"by {w.describe(game)}")
    return lines


# ---- subcommands ---------------------------------------------------------

def cmd_validate(args) -> int:
    try:
        doc = _load(args)
    except (DocumentError, ModelError) as exc:
        path = getattr(exc, "path", "$")
        _emit(args, {"valid": False, "path": path, "error": str(exc)}, [f"invalid: {exc}"])
        return FAILED
    rep = validate_model(doc.model, args.require_own_discount)
    payload = {
        "valid": rep.valid,
        "worlds": doc.model.n,
        "types": [doc.model.type_count(i) for i in range(doc.model.players)],
        "violations": [{"code": v.code, "message": v.message, "player": v.player, "type": v.type,
                        "world": v.world} for v in rep.violations],
        "metadata": doc.metadata,
    }
    lines = [f"{'valid' if rep.valid else 'invalid'}: {doc.model.n} worlds, types {payload['types']}"]
    lines += [f"  {v.code}: {v.message}" for v in rep.violations]
    _emit(args, payload, lines)
    return OK if rep.valid else FAILED


def cmd_thresholds(args) -> int:
    doc = _load(args)
    game, setup, model = doc.game, doc.setup, doc.model
    if args.expectation:
        et = expectation_thresholds(game, setup, model, args.eps)
        bundle, lam = et.bundle, et.lambda_events
    else:
        bundle, lam = thresholds(game, setup, model, args.eps), None
    payload: Dict[str, object] = {"epsilon": _fmt(args.eps), "players": []}
    lines = [f"epsilon = {_fmt(args.eps)}"]
    for i in range(model.players):
        lam0 = grim_trigger_threshold(game, setup, i)
        rows = []
        lines.append(f"player {i + 1}: lambda0 = {_fmt(lam0)}")
        for t in range(model.type_count(i)):
            tt = bundle.type_values(i, t)
            row = {"type": model.type_label(i, t), "discount": _fmt(model.type_discount(i, t)),
                   "f": _fmt(tt.f), "g1": _fmt(tt.g1), "g2": _fmt(tt.g2), "g3": _fmt(tt.g3),
                   "g": _fmt(tt.g), "g_component": tt.g_component}
            if lam is not None:
                row["high_discount"] = bool(lam[i].mask[model.type_members(i, t)[0]])
            rows.append(row)
            if len(rows) <= args.limit:
                lines.append(f"  type {row['type']}: f = {row['f']}, g = {row['g']} ({row['g_component']}), "
                             f"g1 = {row['g1']}, g2 = {row['g2']}, g3 = {row['g3']}")
        if len(rows) > args.limit:
            lines.append(f"  ... {len(rows) - args.limit} more types (use --json or --limit)")
        payload["players"].append({"player": i + 1, "lambda0": _fmt(lam0), "types": rows})
    _emit(args, payload, lines)
    return OK


def cmd_operators(args) -> int:
    doc = _load(args)
    model, names = doc.model, _names(doc)
    C1, C2 = _event(doc, args.C1, names), _event(doc, args.C2, names)
    if args.p is not None:
        f = ThresholdFunction.constant(model, args.p)
        source = f"constant {_fmt(args.p)}"
    else:
        f = thresholds(doc.game, doc.setup, model, args.eps).f_function()
        source = f"f at epsilon {_fmt(args.eps)}"
    it = iterated_pair(model, f, C1, C2)
    cb = common_f_belief(model, f, C1 & C2)
    trace = []
    lines = [f"threshold: {source}", "iteration (lower endpoints of own discount):"]
    for n, step in enumerate(it.trace):
        ends = [lower_endpoint(model, i, step[i]) for i in range(2)]
        trace.append({"step": n, "sizes": [len(step[0]), len(step[1])],
                      "lower_endpoints": [None if e is None else _fmt(e) for e in ends],
                      "types": _pair_json(step, model)})
        lines.append(f"  {n}: {_pair_text(step, model)}  endpoints {[None if e is None else _fmt(e) for e in ends]}")
    payload = {
        "threshold": source,
        "iteration": trace,
        "fixed_point": _pair_json(it.pair, model),
        "common_belief": {"event": list(cb.event), "beliefs": _pair_json(cb.beliefs, model),
                          "trace_sizes": [len(e) for e in cb.trace]},
    }
    lines.append(f"fixed point: {_pair_text(it.pair, model)}")
    lines.append(f"common belief of C1 & C2: {describe(cb.event, model)}")
    _emit(args, payload, lines)
    return OK


def cmd_verify(args) -> int:
    doc = _load(args)
    game, setup, model = doc.game, doc.setup, doc.model
    pair = _pair(doc, args, _names(doc))
    reports = []
    if args.route in ("formula", "both"):
        reports.append(verify_formula(game, setup, model, pair, args.eps, expectation=args.payoffs == EXPECTATION))
    if args.route in ("oracle", "both"):
        reports.append(verify_oracle(game, setup, model, pair, args.eps, args.max_delay, args.payoffs))
    payload = {"pair": _pair_json(pair, model), "reports": [r.to_json(game) for r in reports]}
    lines = [f"K = {_pair_text(pair, model)}"]
    for r in reports:
        lines += _report_lines(r, game)
    _emit(args, payload, lines)
    return OK if all(r.is_equilibrium for r in reports) else FAILED


def cmd_maximal(args) -> int:
    doc = _load(args)
    names = _names(doc)
    C1, C2 = _event(doc, args.C1, names), _event(doc, args.C2, names)
    pair, report = maximal_cooperation(doc.game, doc.setup, doc.model, C1, C2, args.eps)
    it = report.details["iteration"]
    payload = {"pair": _pair_json(pair, doc.model), "steps": it.steps, "report": report.to_json(doc.game)}
    lines = [f"maximal K = {_pair_text(pair, doc.model)} after {it.steps} steps"] + _report_lines(report, doc.game)
    lines += [f"  {k}: {v}" for k, v in report.flags.items() if k in ("common_belief_agrees",
                                                                     "punishers_believe_punishment")]
    _emit(args, payload, lines)
    return OK if report.is_equilibrium else FAILED


def cmd_search(args) -> int:
    doc = _load(args)
    result = exhaustive_search(doc.game, doc.setup, doc.model, args.eps, args.cap, args.max_delay, args.payoffs)
    payload = {"candidates": result.candidates, "pairs": [_pair_json(p, doc.model) for p in result]}
    lines = [f"{len(result)} of {result.candidates} pairs are equilibria:"]
    lines += [f"  {_pair_text(p, doc.model)}" for p in result]
    _emit(args, payload, lines)
    return OK


def cmd_almost(args) -> int:
    doc = _load(args)
    game, setup, model = doc.game, doc.setup, doc.model
    eps = args.eps
    if args.mode == "prior":
        if args.delta is None:
            raise ConfigError("--mode prior needs --delta")
        holds, mass = is_almost_complete_prior(model, eps, args.delta)
        cov = coverage_bounds(model, high_discount_nature(game, setup, model), eps, args.delta)
        payload = {"mode": "prior", "holds": holds, "common_nature_mass": _fmt(mass),
                   "gap": _fmt(cov.gap), "conditional_gap": None if cov.conditional_gap is None
                   else _fmt(cov.conditional_gap), "gap_below_delta": cov.gap_bound}
        lines = [f"prior-based: {'holds' if holds else 'fails'} (mass {_fmt(mass)} vs {_fmt(1 - args.delta)})",
                 f"  lost cooperation mass {_fmt(cov.gap)}, given Lambda {_fmt(cov.conditional_gap)}"]
        _emit(args, payload, lines)
        return OK if holds and cov.consistent() else FAILED
    holds, failing = is_almost_complete_strong(model, eps)
    payload = {"mode": "strong", "holds": holds, "failing": [[w, i + 1] for w, i in failing[:50]]}
    lines = [f"strong: {'holds' if holds else 'fails'}"]
    if not holds:
        lines += [f"  world {w}, player {i + 1}" for w, i in failing[:10]]
        _emit(args, payload, lines)
        return FAILED
    prof = strong_eps_profile(game, setup, model, eps)
    payload.update({"pair": _pair_json(prof.pair, model), "M": _fmt(prof.M), "epsilon_prime": _fmt(prof.epsilon_prime),
                    "report": prof.report.to_json(game), "notes": prof.notes})
    lines.append(f"  profile K = {_pair_text(prof.pair, model)}, M = {_fmt(prof.M)}, eps' = {_fmt(prof.epsilon_prime)}")
    lines += ["  " + x for x in _report_lines(prof.report, game)] + [f"  note: {n}" for n in prof.notes]
    if model.prior is not None and args.delta is not None:
        cov = coverage_bounds(model, high_discount_nature(game, setup, model), eps, args.delta)
        payload["gap"], payload["conditional_gap"] = _fmt(cov.gap), _fmt(cov.conditional_gap)
        lines.append(f"  lost cooperation mass {_fmt(cov.gap)}, given Lambda {_fmt(cov.conditional_gap)}")
    _emit(args, payload, lines)
    return OK if prof.report.is_equilibrium else FAILED


_DEVIATION_RE = re.compile(r"^\s*([a-z0-9-]+)\s*(?:\(\s*([^)]*?)\s*\))?\s*(?:\[\s*delay\s*=\s*(\d+)\s*\])?\s*$")


def parse_deviation(text: Optional[str], game, player: int, world: int) -> Optional[DeviationDescriptor]:
    """``stage2-defect(D)``, ``adopt-grim-trigger``, ``cooperate-once-then-defect(D)[delay=2]``."""
    if text is None or text in ("none", "conform"):
        return None
    m = _DEVIATION_RE.match(text)
    if not m or m.group(1) not in DEVIATION_CLASSES:
        raise ConfigError(f"bad deviation {text!r}; expected one of {', '.join(DEVIATION_CLASSES)}")
    action = None
    if m.group(2):
        try:
            action = game.action_index(player, m.group(2))
        except (KeyError, ValueError, IndexError):
            raise ConfigError(f"player {player + 1} has no action {m.group(2)!r}") from None
    return DeviationDescriptor(m.group(1), action, world, player, Fraction(0), int(m.group(3) or 1))


def _sim_config(args, doc, enumerate_mode):
    if args.horizon is None:
        return SimConfig.for_tolerance(doc.game, doc.model, args.tolerance, args.samples, args.seed, enumerate_mode)
    cfg = SimConfig(args.horizon, args.samples, args.seed, args.tolerance, enumerate_mode)
    cfg.check(doc.game, doc.model)
    return cfg


def cmd_simulate(args) -> int:
    doc = _load(args)
    game, setup, model = doc.game, doc.setup, doc.model
    pair = _pair(doc, args, _names(doc))
    cfg = _sim_config(args, doc, args.enumerate)
    if args.crosscheck:
        rep = crosscheck(game, setup, model, pair, cfg)
        lines = [f"crosscheck: {'pass' if rep.passed else 'FAIL'} over {len(rep.cells)} cells, "
                 f"worst z {rep.worst_z:.3f} (T = {cfg.horizon}, {cfg.samples} samples)"]
        lines += [f"  world {c.world} player {c.player + 1} {c.kind}: estimate {c.estimate:.6f}, "
                  f"analytic {float(c.analytic):.6f}, s.e. {c.stderr:.2e}" for c in rep.failures()]
        _emit(args, rep.to_json(game), lines)
        return OK if rep.passed else FAILED
    if args.world is None or args.player is None:
        raise ConfigError("simulate needs --world and --player (or --crosscheck)")
    i = args.player - 1
    if i not in (0, 1):
        raise ConfigError("--player must be 1 or 2")
    if not 0 <= args.world < model.n:
        raise ConfigError(f"--world must lie in 0..{model.n - 1}")
    dev = parse_deviation(args.deviation, game, i, args.world)
    est = simulate_payoff(game, setup, model, pair, args.world, i, dev, cfg)
    cooperating = bool(pair[i].mask[args.world])
    course, action, delay = course_of(dev, cooperating)
    t = int(model.type_of(i, args.world))
    analytic = TypeValuer(setup.view(i), model, i, t, pair[1 - i], JOINT).value(course, action, delay)
    payload = {"mean": est.mean, "stderr": est.stderr, "samples": est.samples, "horizon": est.horizon,
               "seed": cfg.seed, "analytic": _fmt(analytic), "analytic_float": float(analytic),
               "course": course if dev is None else dev.describe(game)}
    if est.exact is not None:
        payload["exact_truncated"] = _fmt(est.exact)
        payload["tail"] = est.tail
    lines = [f"player {args.player} at world {args.world}, {payload['course']}: "
             f"{est.mean:.6f} +/- {est.stderr:.2e} (analytic {_fmt(analytic)} = {float(analytic):.6f})"]
    _emit(args, payload, lines)
    return OK


def cmd_examples(args) -> int:
    names = args.name or corpus.corpus_names()
    if not args.run_all and not args.name:
        payload = {"examples": []}
        lines = []
        for name in names:
            doc = corpus.load(name)
            title = doc.metadata.get("title", "")
            payload["examples"].append({"name": name, "title": title, "checks": len(doc.expected)})
            lines.append(f"{name}: {title} ({len(doc.expected)} checks)")
        _emit(args, payload, lines)
        return OK
    results, lines, failed = {}, [], 0
    for name in names:
        doc = corpus.load(name)
        checks = corpus.run_checks(doc)
        results[name] = [{"index": c.index, "check": c.check, "pass": c.passed, "detail": c.detail} for c in checks]
        bad = [c for c in checks if not c.passed]
        failed += len(bad)
        lines.append(f"{'ok  ' if not bad else 'FAIL'} {name}: {len(checks) - len(bad)}/{len(checks)} checks")
        lines += [f"       [{c.index}] {c.check}: {c.detail}" for c in bad]
    _emit(args, {"failed": failed, "results": results}, lines)
    return OK if not failed else FAILED


# ---- parser --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="grim-belief", description="Conditional grim-trigger equilibria under uncertain discounts.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, fn, help_text, model=True):
        s = sub.add_parser(name, help=help_text)
        s.set_defaults(func=fn)
        s.add_argument("--json", action="store_true", help="print a JSON report")
        if model:
            s.add_argument("--model", required=True, help="model file or bundled example name")
        return s

    s = cmd("validate", cmd_validate, "parse and validate a model")
    s.add_argument("--require-own-discount", action="store_true")

    s = cmd("thresholds", cmd_thresholds, "threshold functions per type")
    s.add_argument("--eps", type=_rational, default=Fraction(0))
    s.add_argument("--expectation", action="store_true", help="use belief-expected own discounts")
    s.add_argument("--limit", type=int, default=40, help="types shown per player in text mode")

    s = cmd("operators", cmd_operators, "belief-operator iteration and common belief")
    s.add_argument("--C1", default="Lambda1")
    s.add_argument("--C2", default="Lambda2")
    s.add_argument("--p", type=_rational, default=None, help="constant threshold instead of f")
    s.add_argument("--eps", type=_rational, default=Fraction(0))

    for name, fn, text in (("verify", cmd_verify, "verify a cooperation pair"),
                           ("search", cmd_search, "enumerate every equilibrium pair")):
        s = cmd(name, fn, text)
        if name == "verify":
            s.add_argument("--K1", required=True)
            s.add_argument("--K2", required=True)
            s.add_argument("--route", choices=("formula", "oracle", "both"), default="both")
        else:
            s.add_argument("--cap", type=int, default=20, help="largest type count per player")
        s.add_argument("--eps", type=_rational, default=Fraction(0))
        s.add_argument("--payoffs", choices=PAYOFF_MODES, default=JOINT)
        s.add_argument("--max-delay", type=int, default=1)

    s = cmd("maximal", cmd_maximal, "largest cooperation pair inside C1, C2")
    s.add_argument("--C1", default="Lambda1")
    s.add_argument("--C2", default="Lambda2")
    s.add_argument("--eps", type=_rational, default=Fraction(0))

    s = cmd("almost", cmd_almost, "almost complete information checks")
    s.add_argument("--eps", type=_rational, required=True)
    s.add_argument("--delta", type=_rational, default=None)
    s.add_argument("--mode", choices=("prior", "strong"), default="strong")

    s = cmd("simulate", cmd_simulate, "Monte Carlo payoff estimates")
    s.add_argument("--K1", default="Lambda1")
    s.add_argument("--K2", default="Lambda2")
    s.add_argument("--world", type=int)
    s.add_argument("--player", type=int, help="1 or 2")
    s.add_argument("--deviation", default=None, help="e.g. stage2-defect(D); omit to conform")
    s.add_argument("--samples", type=int, default=10_000)
    s.add_argument("--horizon", type=int, default=None, help="default: shortest horizon meeting --tolerance")
    s.add_argument("--tolerance", type=_rational, default=Fraction(1, 10 ** 6))
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--enumerate", action="store_true", help="exact sum over the belief instead of sampling")
    s.add_argument("--crosscheck", action="store_true", help="compare every world, player and deviation")

    s = cmd("examples", cmd_examples, "list or run the bundled examples", model=False)
    s.add_argument("--run-all", action="store_true")
    s.add_argument("--name", action="append", help="run only this example (repeatable)")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        thread_count()
        return args.func(args)
    except (DocumentError, ModelError, DomainError, ConfigError, PreconditionError, FileNotFoundError) as exc:
        if getattr(args, "json", False):
            print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


def run(command: str, flags: Sequence[str] = ()) -> int:
    """Run one subcommand; returns the exit code."""
    return main([command, *flags])


if __name__ == "__main__":
    sys.exit(main())
