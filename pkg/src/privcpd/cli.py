"""Command-line frontend.

Subcommands: detect-offline, detect-online, bounds (with a formula chooser),
threshold-range (empirical quantile search), simulate-offline, and
simulate-online.  Numeric data arrives as newline-delimited decimals on
stdin or via --in.  Every run is a pure function of (argv, input bytes,
--seed): seeds are explicit flags, never wall-clock derived.

Exit codes: 0 success, 1 usage error, 2 data or model error.  Errors print
a single machine-parsable line to stderr of the form ``error=<code>: ...``.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import simulation as sim
from .errors import InvalidObservationError, PrivcpdError
from .hypotheses import BernoulliPair, GaussianPair, HypothesisPair
from .mechanisms import PrivacyParams
from .offline import detect_offline
from .online import OnlineConfig, detect_online


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are exit 1
        raise _UsageError(message)


def _positive_eps(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if math.isnan(value) or value <= 0.0:
        raise argparse.ArgumentTypeError(f"epsilon must be positive (or inf), got {text!r}")
    return value


def _epsilon_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(_positive_eps(tok) for tok in text.split(",") if tok != "")
    except argparse.ArgumentTypeError as exc:
        raise argparse.ArgumentTypeError(f"bad epsilon list {text!r}: {exc}")
    if not values:
        raise argparse.ArgumentTypeError("epsilon list is empty")
    return values


def _nonneg_seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be nonnegative")
    return value


def _add_model_flags(parser: argparse.ArgumentParser, with_true: bool = False) -> None:
    parser.add_argument("--model", required=True, choices=["bernoulli", "gaussian"])
    parser.add_argument("--p0", type=float)
    parser.add_argument("--p1", type=float)
    parser.add_argument("--mu0", type=float)
    parser.add_argument("--mu1", type=float)
    if with_true:
        parser.add_argument("--true-p0", type=float, dest="true_p0")
        parser.add_argument("--true-p1", type=float, dest="true_p1")
        parser.add_argument("--true-mu0", type=float, dest="true_mu0")
        parser.add_argument("--true-mu1", type=float, dest="true_mu1")


def _build_pair(model: str, p0, p1, mu0, mu1) -> HypothesisPair:
    if model == "bernoulli":
        if p0 is None or p1 is None:
            raise _UsageError("--model bernoulli requires --p0 and --p1")
        return BernoulliPair(p0, p1)
    if mu0 is None or mu1 is None:
        raise _UsageError("--model gaussian requires --mu0 and --mu1")
    return GaussianPair(mu0, mu1)


def _pair_from_args(args) -> HypothesisPair:
    return _build_pair(args.model, args.p0, args.p1, args.mu0, args.mu1)


def _true_pair_from_args(args) -> HypothesisPair:
    def pick(override, base):
        return base if override is None else override

    if args.model == "bernoulli":
        return _build_pair(
            "bernoulli", pick(args.true_p0, args.p0), pick(args.true_p1, args.p1), None, None
        )
    return _build_pair(
        "gaussian", None, None, pick(args.true_mu0, args.mu0), pick(args.true_mu1, args.mu1)
    )


def _default_tail_delta(args) -> float:
    # The Gaussian ratio spread is unbounded, so its experiments default to
    # the tail-calibrated mode; a flag overrides.
    if args.tail_delta is not None:
        return args.tail_delta
    return 0.05 if args.model == "gaussian" else 0.0


def _read_values(args) -> tuple[np.ndarray, list[int]]:
    """Parse newline-delimited decimals, keeping 1-based line numbers so
    model errors can point at the offending input line."""
    if args.infile is not None:
        text = Path(args.infile).read_text(encoding="utf-8")
    else:
        text = sys.stdin.read()
    values: list[float] = []
    linenos: list[int] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        token = raw.strip()
        if not token:
            continue
        try:
            values.append(float(token))
        except ValueError:
            raise InvalidObservationError(
                f"line {lineno}: not a decimal value: {token!r}", index=lineno
            )
        linenos.append(lineno)
    if not values:
        raise InvalidObservationError("no input values")
    return np.asarray(values, dtype=np.float64), linenos


def _remap_observation_line(exc: InvalidObservationError, linenos: list[int]):
    if exc.index is not None and 1 <= exc.index <= len(linenos):
        line = linenos[exc.index - 1]
        return InvalidObservationError(f"line {line}: {exc}", index=line)
    return exc


def _fmt(x: float) -> str:
    return format(x, ".6g")


def _cmd_detect_offline(args) -> int:
    pair = _pair_from_args(args)
    data, linenos = _read_values(args)
    rng = np.random.default_rng(args.seed)
    try:
        result = detect_offline(pair, data, PrivacyParams(args.epsilon, args.delta), rng)
    except InvalidObservationError as exc:
        raise _remap_observation_line(exc, linenos) from None
    print(
        f"k_tilde={result.k_tilde} noise_scale={_fmt(result.noise_scale_used)} "
        f"mode={result.mode.value}"
    )
    return 0


def _cmd_detect_online(args) -> int:
    pair = _pair_from_args(args)
    data, linenos = _read_values(args)
    rng = np.random.default_rng(args.seed)
    config = OnlineConfig(
        window_n=args.window_n,
        threshold_t=args.threshold,
        privacy=PrivacyParams(args.epsilon),
        tail_delta=_default_tail_delta(args),
    )
    try:
        result = detect_online(pair, iter(data), config, rng)
    except InvalidObservationError as exc:
        raise _remap_observation_line(exc, linenos) from None
    if result.alarmed:
        print(
            f"alarm_time={result.alarm_time_j} window_start={result.window_start} "
            f"k_tilde={result.k_tilde_global}"
        )
    else:
        print("no_alarm=true")
    return 0


def _cmd_bounds(args) -> int:
    kind = args.bound_kind
    if kind == "offline-mle":
        print(f"alpha={_fmt(bounds_mod.alpha_mle_bounded(args.A, args.C, args.beta))}")
    elif kind == "offline-private":
        print(
            f"alpha={_fmt(bounds_mod.alpha_private_bounded(args.A, args.C, args.beta, args.epsilon))}"
        )
    elif kind == "offline-mle-relaxed":
        print(f"alpha={_fmt(bounds_mod.alpha_mle_relaxed(args.C_M, args.beta))}")
    elif kind == "offline-private-relaxed":
        print(
            f"alpha={_fmt(bounds_mod.alpha_private_relaxed(args.A, args.C_M, args.beta, args.epsilon))}"
        )
    elif kind == "online-alpha":
        print(
            f"alpha={_fmt(bounds_mod.online_alpha(args.A, args.C, args.n, args.beta, args.epsilon))}"
        )
    else:  # online-threshold
        rng_range = bounds_mod.online_threshold_range(
            args.A, args.C, args.n, args.k_star, args.beta, args.epsilon
        )
        print(
            f"t_low={_fmt(rng_range.t_low)} t_high={_fmt(rng_range.t_high)} "
            f"feasible={'true' if rng_range.feasible else 'false'}"
        )
    return 0


def _cmd_threshold_range(args) -> int:
    pair = _pair_from_args(args)
    rng = np.random.default_rng(args.seed)
    result = sim.empirical_threshold_range(
        pair,
        args.epsilon,
        args.n,
        args.k_star,
        args.fa_rate,
        args.miss_rate,
        args.realizations,
        rng,
        tail_delta=_default_tail_delta(args),
    )
    print(
        f"t_low={_fmt(result.t_low)} t_high={_fmt(result.t_high)} "
        f"feasible={'true' if result.feasible else 'false'}"
    )
    return 0


def _cmd_simulate_offline(args) -> int:
    scenario = sim.OfflineScenario(
        true_pair=_true_pair_from_args(args),
        hypothesized_pair=_pair_from_args(args),
        n=args.n,
        k_star=args.k_star,
        epsilons=args.epsilons,
        trials=args.trials,
        tail_delta=_default_tail_delta(args),
        master_seed=args.seed,
        scenario_id=args.scenario,
    )
    curves = sim.run_offline(scenario)
    sim.write_offline_csv(curves, args.out)
    print(f"wrote={args.out}")
    return 0


def _cmd_simulate_online(args) -> int:
    max_len = args.max_stream_len
    if max_len is None:
        max_len = args.k_star + args.window_n
    scenario = sim.OnlineScenario(
        true_pair=_true_pair_from_args(args),
        hypothesized_pair=_pair_from_args(args),
        window_n=args.window_n,
        k_star=args.k_star,
        threshold_t=args.threshold,
        epsilons=args.epsilons,
        trials=args.trials,
        max_stream_len=max_len,
        tail_delta=_default_tail_delta(args),
        master_seed=args.seed,
        scenario_id=args.scenario,
    )
    marginal, conditional = sim.run_online(scenario)
    sim.write_online_csv(marginal, conditional, args.out)
    print(f"wrote={args.out}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="privcpd", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("detect-offline", help="private change-point estimate on a full sample")
    _add_model_flags(p)
    p.add_argument("--epsilon", type=_positive_eps, required=True)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--seed", type=_nonneg_seed, default=0)
    p.add_argument("--in", dest="infile", default=None, help="input path (default: stdin)")
    p.set_defaults(func=_cmd_detect_offline)

    p = commands.add_parser("detect-online", help="streaming detection with a noisy threshold")
    _add_model_flags(p)
    p.add_argument("--epsilon", type=_positive_eps, required=True)
    p.add_argument("--window-n", dest="window_n", type=int, required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--tail-delta", dest="tail_delta", type=float, default=None,
                   help="tail-mode delta (default: 0.05 for gaussian, 0 for bernoulli)")
    p.add_argument("--seed", type=_nonneg_seed, default=0)
    p.add_argument("--in", dest="infile", default=None)
    p.set_defaults(func=_cmd_detect_online)

    p = commands.add_parser("bounds", help="closed-form accuracy and threshold formulas")
    kinds = p.add_subparsers(dest="bound_kind", required=True)
    for kind in (
        "offline-mle",
        "offline-private",
        "offline-mle-relaxed",
        "offline-private-relaxed",
        "online-alpha",
        "online-threshold",
    ):
        k = kinds.add_parser(kind)
        if kind != "offline-mle-relaxed":
            k.add_argument("--A", type=float, required=True)
        if kind in ("offline-mle", "offline-private", "online-alpha", "online-threshold"):
            k.add_argument("--C", type=float, required=True)
        if kind in ("offline-mle-relaxed", "offline-private-relaxed"):
            k.add_argument("--C-M", dest="C_M", type=float, required=True)
        k.add_argument("--beta", type=float, required=True)
        if kind not in ("offline-mle", "offline-mle-relaxed"):
            k.add_argument("--epsilon", type=_positive_eps, required=True)
        if kind in ("online-alpha", "online-threshold"):
            k.add_argument("--n", type=int, required=True)
        if kind == "online-threshold":
            k.add_argument("--k-star", dest="k_star", type=int, required=True)
        k.set_defaults(func=_cmd_bounds)

    p = commands.add_parser("threshold-range", help="empirical quantile search for the alarm threshold")
    _add_model_flags(p)
    p.add_argument("--epsilon", type=_positive_eps, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k-star", dest="k_star", type=int, required=True)
    p.add_argument("--fa-rate", dest="fa_rate", type=float, default=0.1)
    p.add_argument("--miss-rate", dest="miss_rate", type=float, default=0.1)
    p.add_argument("--realizations", type=int, default=10000)
    p.add_argument("--tail-delta", dest="tail_delta", type=float, default=None,
                   help="tail-mode delta (default: 0.05 for gaussian, 0 for bernoulli)")
    p.add_argument("--seed", type=_nonneg_seed, default=0)
    p.set_defaults(func=_cmd_threshold_range)

    p = commands.add_parser("simulate-offline", help="offline accuracy curves to CSV")
    _add_model_flags(p, with_true=True)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--k-star", dest="k_star", type=int, default=100)
    p.add_argument("--epsilons", type=_epsilon_list, default=(0.1, 0.5, 1.0, math.inf))
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--tail-delta", dest="tail_delta", type=float, default=None,
                   help="tail-mode delta (default: 0.05 for gaussian, 0 for bernoulli)")
    p.add_argument("--seed", type=_nonneg_seed, default=0)
    p.add_argument("--scenario", default="offline")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate_offline)

    p = commands.add_parser("simulate-online", help="online accuracy curves to CSV")
    _add_model_flags(p, with_true=True)
    p.add_argument("--window-n", dest="window_n", type=int, default=700)
    p.add_argument("--k-star", dest="k_star", type=int, default=5000)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--max-stream-len", dest="max_stream_len", type=int, default=None)
    p.add_argument("--epsilons", type=_epsilon_list, default=(0.5, 1.0, math.inf))
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--tail-delta", dest="tail_delta", type=float, default=None,
                   help="tail-mode delta (default: 0.05 for gaussian, 0 for bernoulli)")
    p.add_argument("--seed", type=_nonneg_seed, default=0)
    p.add_argument("--scenario", default="online")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate_online)

    return parser


def _oneline(text: str) -> str:
    return " ".join(str(text).split())


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {_oneline(str(exc))}", file=sys.stderr)
        return 1
    except PrivcpdError as exc:
        print(f"error={exc.code}: {_oneline(str(exc))}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
