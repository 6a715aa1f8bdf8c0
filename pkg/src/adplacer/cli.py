"""Command-line front end: solve a single instance or sweep a benchmark grid.

Exit codes:
    0  success
    1  unreadable or malformed input, bad configuration
    2  infeasible instance (odd k, k > slots, unbalanced inventory)
    3  brute force refused: candidate count over the cap
    4  internal invariant violation
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io
from .baselines import trivial_schedule
from .core import (
    REWARD_ATOL,
    RelevanceMatrix,
    RewardParams,
    reward,
    validate_schedule,
)
from .errors import (
    AdPlacerError,
    InfeasibleInventory,
    InfeasibleK,
    InstanceTooLarge,
    MissingEntity,
    ParseError,
)
from .instances import random_instance
from .profile import build_profile
from .relevance import build_relevance_matrix, features_for
from .solvers import (
    DEFAULT_CANDIDATE_CAP,
    solve_branch_and_bound,
    solve_brute_force,
    solve_lp_relax,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_TOO_LARGE = 3
EXIT_INTERNAL = 4

_CONFIG_ERRORS = (ParseError, MissingEntity, FileNotFoundError, IsADirectoryError, ValueError)
_INFEASIBLE_ERRORS = (InfeasibleK, InfeasibleInventory)


@dataclass(frozen=True)
class RunConfig:
    """Everything one solve run needs; mirrors the CLI flags."""

    program_path: str
    inventory_path: str
    k: int
    alpha: float = 0.5
    beta: float = 0.5
    solver: str = "brute"  # brute | bnb | lp | trivial
    features_dir: str | None = None
    rel_file: str | None = None
    pairing: str = "aligned"
    scale: str = "unit"
    seed: int = 0
    out_dir: str = "out"
    cap: int = DEFAULT_CANDIDATE_CAP
    threads: int = 1


def _err(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def _resolve_relevance(config: RunConfig, program, inventory) -> RelevanceMatrix:
    if config.rel_file:
        rel = io.load_relevance(config.rel_file)
    elif config.features_dir:
        feats = io.load_features_dir(config.features_dir)
        scene_feats = features_for([s.id for s in program.scenes], feats)
        ad_feats = features_for([a.id for a in inventory.ads], feats)
        rel = build_relevance_matrix(scene_feats, ad_feats, pairing=config.pairing)
    elif config.beta == 0.0:
        # the matching term is switched off, so relevance never matters
        rel = RelevanceMatrix(np.zeros((program.n_scenes, len(inventory))))
    else:
        raise ParseError("beta > 0 requires --rel-file or --features")
    if rel.values.shape != (program.n_scenes, len(inventory)):
        raise ParseError(
            f"relevance matrix shape {rel.values.shape} does not match "
            f"{program.n_scenes} scenes x {len(inventory)} ads"
        )
    return rel


def run(config: RunConfig) -> int:
    """Load the instance, solve it, and write schedule/report/profile files."""
    try:
        program = io.load_program(config.program_path, config.scale)
        inventory = io.load_inventory(config.inventory_path, config.scale)
        params = RewardParams(config.alpha, config.beta, config.k)

        out_dir = Path(config.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)

        if config.solver == "trivial":
            started = time.perf_counter()
            schedule = trivial_schedule(program, inventory, config.k, config.seed)
            wall = time.perf_counter() - started
            check = validate_schedule(schedule, program, inventory, params, "baseline")
            if not check:
                raise AdPlacerError(f"baseline emitted an invalid schedule: {check.message}")
            io.save_schedule(schedule, out_dir / "schedule.json", mode="baseline")
            io.save_report(
                {
                    "format": io.REPORT_FORMAT,
                    "solver": "trivial",
                    "reward": None,
                    "seed": config.seed,
                    "candidates_evaluated": 1,
                    "nodes_pruned": None,
                    "upper_bound": None,
                    "wall_time": wall,
                    "schedule": io.schedule_dict(schedule, "baseline"),
                },
                out_dir / "report.json",
            )
            io.save_profile(
                build_profile(schedule, program, inventory), out_dir / "profile.json"
            )
            print(f"trivial baseline: {config.k} ads placed, outputs in {out_dir}")
            return EXIT_OK

        rel = _resolve_relevance(config, program, inventory)
        if config.solver == "brute":
            report = solve_brute_force(
                program, inventory, rel, params, cap=config.cap, threads=config.threads
            )
        elif config.solver == "bnb":
            report = solve_branch_and_bound(program, inventory, rel, params)
        elif config.solver == "lp":
            report = solve_lp_relax(program, inventory, rel, params)
        else:
            raise ParseError(f"unknown solver {config.solver!r}")

        check = validate_schedule(report.schedule, program, inventory, params)
        recomputed = reward(report.schedule, program, inventory, rel, params)
        if not check or abs(recomputed - report.reward) > REWARD_ATOL:
            raise AdPlacerError("solver emitted a schedule violating its own contract")

        io.save_schedule(report.schedule, out_dir / "schedule.json", mode="strict")
        io.save_report(io.report_dict(report), out_dir / "report.json")
        io.save_profile(
            build_profile(report.schedule, program, inventory),
            out_dir / "profile.json",
        )
        print(
            f"{report.solver}: reward={report.reward:.12g} "
            f"candidates={report.candidates_evaluated} "
            f"time={report.wall_time:.3f}s outputs in {out_dir}"
        )
        return EXIT_OK
    except _INFEASIBLE_ERRORS as exc:
        _err(str(exc))
        return EXIT_INFEASIBLE
    except InstanceTooLarge as exc:
        _err(str(exc))
        return EXIT_TOO_LARGE
    except _CONFIG_ERRORS as exc:
        _err(str(exc))
        return EXIT_CONFIG
    except Exception as exc:  # anything else means a broken internal invariant
        _err(f"internal error: {exc}")
        return EXIT_INTERNAL


def benchmark(
    cells: list[tuple[int, int, int]],
    seed: int = 0,
    alpha: float = 0.5,
    cap: int = DEFAULT_CANDIDATE_CAP,
) -> list[dict]:
    """Run brute force (under the cap) and branch-and-bound over a (P, M, K) grid.

    Cell i uses the seeded instance ``random_instance(P, M, seed + i)``.
    """
    rows: list[dict] = []
    for idx, (p, m, k) in enumerate(cells):
        program, inventory, rel = random_instance(p, m, seed + idx)
        params = RewardParams(alpha, 1.0 - alpha, k)
        row: dict = {"p": p, "m": m, "k": k, "seed": seed + idx}
        brute_reward = None
        try:
            bf = solve_brute_force(program, inventory, rel, params, cap=cap)
            brute_reward = bf.reward
            row["brute_force"] = {
                "skipped": False,
                "reward": bf.reward,
                "candidates_evaluated": bf.candidates_evaluated,
                "wall_time": bf.wall_time,
            }
        except InstanceTooLarge as exc:
            row["brute_force"] = {"skipped": True, "reason": str(exc)}
        bb = solve_branch_and_bound(program, inventory, rel, params)
        row["branch_and_bound"] = {
            "reward": bb.reward,
            "candidates_evaluated": bb.candidates_evaluated,
            "nodes_pruned": bb.nodes_pruned,
            "wall_time": bb.wall_time,
        }
        row["rewards_match"] = (
            None if brute_reward is None else abs(bb.reward - brute_reward) <= REWARD_ATOL
        )
        rows.append(row)
    return rows


def _parse_cell(text: str) -> tuple[int, int, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected P,M,K - got {text!r}")
    try:
        p, m, k = (int(x) for x in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers P,M,K - got {text!r}")
    return (p, m, k)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adplacer",
        description="Select and place inventory ads into program ad slots.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="solve one instance and write artifacts")
    runp.add_argument("--program", required=True, help="program JSON file")
    runp.add_argument("--inventory", required=True, help="ad inventory JSON file")
    runp.add_argument("--k", type=int, required=True, help="number of ads to embed (even)")
    runp.add_argument("--alpha", type=float, default=0.5,
                      help="late-placement weight; beta = 1 - alpha (default 0.5)")
    runp.add_argument("--solver", choices=["brute", "bnb", "lp", "trivial"],
                      default="brute", help="solver to use (default brute)")
    runp.add_argument("--features", default=None, metavar="DIR",
                      help="directory of per-entity keyframe feature grids")
    runp.add_argument("--rel-file", default=None, metavar="FILE",
                      help="precomputed N x P relevance grid (overrides --features)")
    runp.add_argument("--pairing", choices=["aligned", "all_pairs"], default="aligned",
                      help="frame pairing for relevance from features (default aligned)")
    runp.add_argument("--scale", choices=["unit", "hundred"], default="unit",
                      help="valence scale of the input files (default unit)")
    runp.add_argument("--seed", type=int, default=0, help="RNG seed for the trivial baseline")
    runp.add_argument("--cap", type=int, default=DEFAULT_CANDIDATE_CAP,
                      help="brute-force candidate cap (default %(default)s)")
    runp.add_argument("--threads", type=int, default=1,
                      help="worker threads for brute-force scoring; never changes results")
    runp.add_argument("--out", default="out", metavar="DIR",
                      help="output directory (default ./out)")

    bench = sub.add_parser("benchmark", help="compare solvers over a (P,M,K) grid")
    bench.add_argument("--cell", dest="cells", action="append", type=_parse_cell,
                       default=[], metavar="P,M,K",
                       help="grid cell; repeat for more cells")
    bench.add_argument("--seed", type=int, default=0, help="base instance seed")
    bench.add_argument("--alpha", type=float, default=0.5)
    bench.add_argument("--cap", type=int, default=DEFAULT_CANDIDATE_CAP)
    bench.add_argument("--out", default=None, metavar="FILE",
                       help="also write the JSON table to this file")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        config = RunConfig(
            program_path=args.program,
            inventory_path=args.inventory,
            k=args.k,
            alpha=args.alpha,
            beta=1.0 - args.alpha,
            solver=args.solver,
            features_dir=args.features,
            rel_file=args.rel_file,
            pairing=args.pairing,
            scale=args.scale,
            seed=args.seed,
            out_dir=args.out,
            cap=args.cap,
            threads=args.threads,
        )
        return run(config)
    if args.command == "benchmark":
        try:
            rows = benchmark(args.cells, seed=args.seed, alpha=args.alpha, cap=args.cap)
        except _INFEASIBLE_ERRORS as exc:
            _err(str(exc))
            return EXIT_INFEASIBLE
        except _CONFIG_ERRORS as exc:
            _err(str(exc))
            return EXIT_CONFIG
        text = json.dumps(rows, indent=2, sort_keys=True)
        print(text)
        if args.out:
            Path(args.out).write_text(text + "\n")
        return EXIT_OK
    raise AssertionError(f"unhandled command {args.command!r}")


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
