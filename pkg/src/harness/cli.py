#!/usr/bin/env python3
"""
cli.py

Purpose:
  Command-line surface of the renewable energy allocation simulator:
  simulate, sweep, compare, verify, oracle and gen.

Version: 1.0.0
Usage:
  energy-sim simulate --policy lyapunov --slots 26496 --seed 0
  energy-sim sweep --axis V --values 20,50,100,200 --seeds 5
  energy-sim compare --generator spike
  energy-sim verify --frame-T 1,10,100
  energy-sim oracle --trace trace.csv --start 0 --T 10
  energy-sim gen --generator markov --slots 1000 --output trace.csv

Exit codes: 0 success, 1 a requested verification failed, 2 usage or
input error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from colorama import Fore, Style, init

from analysis.oracle import solve_frame
from analysis.verification import verify
from core.errors import EnergySimError
from core.models import Params
from core.queue_dynamics import derived_bounds
from harness.reporting import (
    write_comparison,
    write_frame_solution,
    write_histogram,
    write_json,
    write_sweep,
    write_trajectory,
    write_verification,
)
from harness.runner import PolicyKind, RunOptions, run_policy
from harness.sweeps import SweepAxis, average_sweeps, compare, sweep
from policies.pricing import (
    DemandModel,
    LinearDemand,
    RealizationMode,
    constant_demand,
    scaled_exponential_demand,
    scaled_linear_demand,
)
from traces.generators import generate
from traces.models import GeneratorKind, GeneratorSpec, Trace
from traces.trace_io import load_csv, write_csv
from utils.config import Config, get_config
from utils.performance_metrics import save_run_metrics

init(autoreset=True)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_ERROR = 2

DEMAND_CHOICES = ["linear", "scaled-linear", "scaled-exp", "constant"]


def _float_list(raw: str) -> List[float]:
    try:
        return [float(value) for value in raw.split(",") if value.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {raw!r}")


def _int_list(raw: str) -> List[int]:
    try:
        return [int(value) for value in raw.split(",") if value.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {raw!r}")


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='Plain-text key=value config file (flags override it)')
    common.add_argument('--verbose', '-v', action='store_true', help='Debug logging')
    common.add_argument('--trace', help='Trace CSV (slot,s,a,gamma[,y]); generated when omitted')
    common.add_argument('--generator', choices=[k.value for k in GeneratorKind],
                        help='Synthetic trace family (default: iid)')
    common.add_argument('--slots', type=int, help='Generated trace length (default: 26496)')
    common.add_argument('--seed', type=int, help='Seed for trace generation and demand noise (default: 0)')
    common.add_argument('--spike-prob', type=float, help='Price spike probability for the spike generator')
    common.add_argument('--V', type=float, help='Tradeoff weight (default: 100)')
    common.add_argument('--epsilon', type=float, help='Virtual queue rate (default: a_max/2)')
    common.add_argument('--x-max', type=float, help='Purchase cap per slot (default: 400)')
    common.add_argument('--a-max', type=float, help='Arrival bound (default: 175)')
    common.add_argument('--s-max', type=float, help='Supply bound (default: 90)')
    common.add_argument('--gamma-max', type=float, help='Price bound (default: 180)')
    common.add_argument('--p-max', type=float, help='Largest posted price, pricing only (default: 200)')
    common.add_argument('--out-dir', help='Output directory (default: ./results)')
    common.add_argument('--check-drift', dest='check_drift', action='store_const', const=True,
                        help='Check the one-slot drift inequality every slot (default)')
    common.add_argument('--no-check-drift', dest='check_drift', action='store_const', const=False,
                        help='Skip the per-slot drift check')
    common.add_argument('--demand', choices=DEMAND_CHOICES, help='Demand model for pricing runs')
    common.add_argument('--realization', choices=[m.value for m in RealizationMode],
                        help='Demand realisation for pricing runs')
    common.add_argument('--grid-step', type=float, help='Price grid step (default: p_max/10^4)')
    common.add_argument('--deadline', type=int, help='Greedy deadline in slots (default: D_max)')
    common.add_argument('--frame-T', type=_int_list, help='Frame sizes for the universal bound (default: 1,10,100)')
    return common


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per operation."""
    parser = argparse.ArgumentParser(
        prog='energy-sim',
        description="Renewable energy allocation: threshold purchasing, pricing and delay guarantees",
    )
    common = _common_parser()
    commands = parser.add_subparsers(dest='command', required=True)

    simulate = commands.add_parser('simulate', parents=[common], help='Run one policy over a trace')
    simulate.add_argument('--policy', choices=[k.value for k in PolicyKind], help='Policy (default: lyapunov)')

    sweep_cmd = commands.add_parser('sweep', parents=[common], help='Sweep V or epsilon')
    sweep_cmd.add_argument('--axis', choices=[a.value for a in SweepAxis], default='V')
    sweep_cmd.add_argument('--values', type=_float_list, required=True, help='Comma-separated sweep values')
    sweep_cmd.add_argument('--seeds', type=int, default=1,
                           help='Average over this many generated traces (seed, seed+1, ...)')
    sweep_cmd.add_argument('--policy', choices=[k.value for k in PolicyKind], help='Policy (default: lyapunov)')
    sweep_cmd.add_argument('--max-workers', type=int, help='Concurrent sweep runs (default: 4)')

    commands.add_parser('compare', parents=[common], help='Lyapunov against purchase-at-deadline')

    verify_cmd = commands.add_parser('verify', parents=[common], help='Run a policy and check every guarantee')
    verify_cmd.add_argument('--policy', choices=[k.value for k in PolicyKind], help='Policy (default: lyapunov)')
    verify_cmd.add_argument('--c-star', type=float, help='Optimal average cost; enables the cost-gap check')
    verify_cmd.add_argument('--cost-tolerance', type=float, default=0.0,
                            help='Statistical slack added to the cost-gap bound')

    oracle = commands.add_parser('oracle', parents=[common], help='Solve the lookahead problem on a trace slice')
    oracle.add_argument('--start', type=int, default=0, help='First slot of the frame')
    oracle.add_argument('--T', type=int, required=True, help='Frame length in slots')

    gen = commands.add_parser('gen', parents=[common], help='Generate a synthetic trace CSV')
    gen.add_argument('--output', help='Output CSV (default: <out-dir>/trace.csv)')
    gen.add_argument('--demand-state', action='store_true', help='Emit the demand state column y')
    return parser


# -- assembly ----------------------------------------------------------------

def resolve_params(args: argparse.Namespace, config: Config) -> Params:
    return config.to_params(
        V=args.V,
        epsilon=args.epsilon,
        x_max=args.x_max,
        a_max=args.a_max,
        s_max=args.s_max,
        gamma_max=args.gamma_max,
        p_max=args.p_max,
    )


def _pick(value, fallback):
    return fallback if value is None else value


def generator_spec(args: argparse.Namespace, config: Config, p: Params, seed: int,
                   demand_state: bool = False) -> GeneratorSpec:
    kind = GeneratorKind(_pick(args.generator, config.generator))
    extra = {}
    if args.spike_prob is not None:
        extra["spike_prob"] = args.spike_prob
    return GeneratorSpec(
        kind=kind,
        seed=seed,
        a_max=p.a_max,
        s_high=p.s_max,
        gamma_high=p.gamma_max,
        spike_price=p.gamma_max,
        demand_state=demand_state,
        **extra,
    )


def load_trace(args: argparse.Namespace, config: Config, p: Params, seed: Optional[int] = None,
               demand_state: bool = False) -> Trace:
    if args.trace:
        return load_csv(args.trace, p, slot_minutes=config.slot_minutes)
    seed = _pick(seed, _pick(args.seed, config.seed))
    slots = _pick(args.slots, config.slots)
    return generate(generator_spec(args, config, p, seed, demand_state), slots)


def build_demand(name: str, p: Params) -> DemandModel:
    if name == "linear":
        return LinearDemand(p.a_max, p.p_max)
    if name == "scaled-linear":
        return scaled_linear_demand(p.a_max, p.p_max)
    if name == "scaled-exp":
        return scaled_exponential_demand(p.a_max, p.p_max)
    return constant_demand(p.a_max, p.a_max / 2.0)


def run_options(args: argparse.Namespace, config: Config, p: Params, policy: PolicyKind) -> RunOptions:
    demand = None
    if policy is PolicyKind.PRICING:
        demand = build_demand(_pick(args.demand, config.demand), p)
    return RunOptions(
        seed=_pick(args.seed, config.seed),
        check_drift=_pick(args.check_drift, config.check_drift),
        demand=demand,
        realization=RealizationMode(_pick(args.realization, config.realization)),
        grid_step=args.grid_step,
        greedy_deadline=args.deadline,
    )


def _policy(args: argparse.Namespace, config: Config) -> PolicyKind:
    return PolicyKind(_pick(getattr(args, 'policy', None), config.policy))


def _out_dir(args: argparse.Namespace, config: Config) -> Path:
    path = Path(_pick(args.out_dir, config.out_dir))
    path.mkdir(parents=True, exist_ok=True)
    return path


# -- subcommands -------------------------------------------------------------

def cmd_simulate(args: argparse.Namespace, config: Config) -> int:
    p = resolve_params(args, config)
    policy = _policy(args, config)
    trace = load_trace(args, config, p, demand_state=policy is PolicyKind.PRICING)
    out_dir = _out_dir(args, config)

    print(f"{Fore.CYAN}🚀 Simulating {policy.value} over {len(trace)} slots ({trace.meta.source})")
    run = run_policy(trace, policy, p, run_options(args, config, p, policy))

    write_trajectory(run, out_dir / "trajectory.csv")
    write_histogram(run, out_dir / "delay_histogram.csv")
    write_json(run.summary(), out_dir / "summary.json")
    if run.metrics:
        save_run_metrics(run.metrics, out_dir / "run_metrics.json")

    summary = run.summary()
    print(f"{Fore.GREEN}✅ Total cost {summary['total_cost']:.6g} (decision cost {summary['total_cost_x']:.6g})")
    print(f"   max Q {summary['max_Q']:g} / {summary['Q_max']:g}, max Z {summary['max_Z']:g} / {summary['Z_max']:g}")
    print(f"   max delay {summary['max_delay']} slots (D_max {summary['D_max']}), "
          f"mean {summary['mean_delay']} slots, {trace.duration_hours(summary['max_delay']):.1f} hours")
    if policy is PolicyKind.PRICING:
        print(f"   average profit {summary['average_profit']:.6g} (actual {summary['average_profit_actual']:.6g})")
    print(f"{Fore.CYAN}📄 Results in {out_dir}")

    if run.drift_violations:
        print(f"{Fore.RED}❌ Drift inequality failed on {len(run.drift_violations)} slots")
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, config: Config) -> int:
    p = resolve_params(args, config)
    policy = _policy(args, config)
    axis = SweepAxis(args.axis)
    base_seed = _pick(args.seed, config.seed)
    workers = _pick(args.max_workers, config.max_workers)
    seeds = 1 if args.trace else max(1, args.seeds)

    tables = []
    for offset in range(seeds):
        trace = load_trace(args, config, p, seed=base_seed + offset,
                           demand_state=policy is PolicyKind.PRICING)
        options = run_options(args, config, p, policy)
        tables.append(sweep(trace, p, axis, args.values, policy, options, max_workers=workers))
    rows = average_sweeps(tables)

    out_dir = _out_dir(args, config)
    path = write_sweep(rows, out_dir / f"sweep_{axis.value}.csv")
    print(f"{Fore.GREEN}✅ Swept {axis.value} over {len(rows)} values ({seeds} trace(s))")
    for row in rows:
        print(f"   {axis.value}={row.value:g}: cost {row.cum_cost:.6g}, max delay {row.max_delay:g}, "
              f"max Q {row.max_Q:g}, D_max {row.D_max}")
    print(f"{Fore.CYAN}📄 {path}")
    return EXIT_OK


def cmd_compare(args: argparse.Namespace, config: Config) -> int:
    p = resolve_params(args, config)
    trace = load_trace(args, config, p)
    options = run_options(args, config, p, PolicyKind.LYAPUNOV)
    comparison = compare(trace, p, options)

    out_dir = _out_dir(args, config)
    write_comparison(comparison, out_dir / "comparison.csv")
    write_json(comparison.summary(), out_dir / "comparison.json")
    summary = comparison.summary()
    print(f"{Fore.GREEN}✅ Lyapunov cost {summary['lyapunov_cost']:.6g} "
          f"(decision cost {summary['lyapunov_cost_x']:.6g})")
    print(f"   greedy cost {summary['greedy_cost']:.6g} with deadline {summary['deadline']} slots")
    print(f"   cost ratio greedy/Lyapunov {summary['cost_ratio']:.3f}")
    print(f"{Fore.CYAN}📄 Results in {out_dir}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: Config) -> int:
    p = resolve_params(args, config)
    policy = _policy(args, config)
    trace = load_trace(args, config, p, demand_state=policy is PolicyKind.PRICING)
    run = run_policy(trace, policy, p, run_options(args, config, p, policy))
    T_values = _pick(args.frame_T, config.frame_T)
    report = verify(run, p, T_values, c_star=args.c_star, cost_tolerance=args.cost_tolerance)

    out_dir = _out_dir(args, config)
    write_verification(report, out_dir / "verification.csv")
    colors = {"pass": Fore.GREEN, "fail": Fore.RED, "warn": Fore.YELLOW, "skipped": Style.DIM}
    for check in report.checks:
        measured = "" if check.measured is None else f" measured={check.measured:.6g}"
        bound = "" if check.bound is None else f" bound={check.bound:.6g}"
        print(f"{colors[check.status]}  [{check.status:>7}] {check.name}{measured}{bound} {check.detail}")

    if report.passed:
        print(f"{Fore.GREEN}✅ All applicable checks passed")
        return EXIT_OK
    print(f"{Fore.RED}❌ {len(report.failures)} check(s) failed")
    return EXIT_VERIFICATION_FAILED


def cmd_oracle(args: argparse.Namespace, config: Config) -> int:
    p = resolve_params(args, config)
    trace = load_trace(args, config, p)
    if args.T < 1 or args.start < 0 or args.start + args.T > len(trace):
        print(f"{Fore.RED}❌ Frame [{args.start}, {args.start + args.T}) is outside the trace (length {len(trace)})")
        return EXIT_ERROR
    frame = trace[args.start:args.start + args.T]
    result = solve_frame(frame.slots, p.epsilon, p.x_max)

    path = write_frame_solution(frame, result, _out_dir(args, config) / "frame_solution.csv", offset=args.start)
    bounds = derived_bounds(p)
    print(f"{Fore.GREEN}✅ c* = {result.c_star:.6g} per slot (binding: {result.binding}, "
          f"purchase {result.required:g})")
    print(f"   B*T/V = {bounds.B * args.T / p.V:.6g}")
    print(f"{Fore.CYAN}📄 {path}")
    return EXIT_OK


def cmd_gen(args: argparse.Namespace, config: Config) -> int:
    p = resolve_params(args, config)
    seed = _pick(args.seed, config.seed)
    trace = generate(generator_spec(args, config, p, seed, args.demand_state), _pick(args.slots, config.slots))
    output = Path(args.output) if args.output else _out_dir(args, config) / "trace.csv"
    write_csv(trace, output)
    print(f"{Fore.GREEN}✅ Wrote {len(trace)} slots to {output}")
    return EXIT_OK


COMMANDS = {
    'simulate': cmd_simulate,
    'sweep': cmd_sweep,
    'compare': cmd_compare,
    'verify': cmd_verify,
    'oracle': cmd_oracle,
    'gen': cmd_gen,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main function with CLI argument parsing"""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = get_config(args.config)
    except FileNotFoundError as e:
        print(f"{Fore.RED}❌ {e}")
        return EXIT_ERROR

    level = logging.DEBUG if args.verbose else getattr(logging, config.log_level.upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    try:
        return COMMANDS[args.command](args, config)
    except EnergySimError as e:
        print(f"{Fore.RED}❌ {e}")
        return EXIT_ERROR
    except (FileNotFoundError, ValueError) as e:
        print(f"{Fore.RED}❌ {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
