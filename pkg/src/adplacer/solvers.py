"""Solvers maximizing the placement reward under the strict constraints.

Three routes: exhaustive enumeration over balanced ad subsets and their
block-respecting placements (exact), depth-first branch-and-bound over
block-by-block assignments (exact, usually far cheaper), and a continuous
relaxation solved as an LP whose optimum is an upper bound and whose
solution is rounded to a feasible schedule (approximate).
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment, linprog

from .core import (
    AdInventory,
    Polarity,
    ProgramSpec,
    RelevanceMatrix,
    RewardParams,
    Schedule,
    as_relevance,
    reward,
    slot_blocks,
)
from .errors import (
    DimensionMismatch,
    InfeasibleInventory,
    InfeasibleK,
    InstanceTooLarge,
)

#: Brute force refuses instances with more candidate schedules than this.
DEFAULT_CANDIDATE_CAP = 10**8

BRUTE_FORCE = "brute_force"
BRANCH_AND_BOUND = "branch_and_bound"
LP_RELAX = "lp_relax"


@dataclass(frozen=True)
class SolveReport:
    """A solver's answer plus its work statistics.

    ``candidates_evaluated`` counts fully scored schedules (for the LP route
    that is the single rounded schedule); ``nodes_pruned`` is populated by
    branch-and-bound only and ``upper_bound`` by the LP relaxation only.
    """

    schedule: Schedule
    reward: float
    solver: str
    candidates_evaluated: int
    wall_time: float
    nodes_pruned: int | None = None
    upper_bound: float | None = None


def _check_instance(
    program: ProgramSpec,
    inventory: AdInventory,
    rel: RelevanceMatrix,
    params: RewardParams,
) -> None:
    if rel.values.shape != (program.n_scenes, len(inventory)):
        raise DimensionMismatch(
            f"relevance matrix shape {rel.values.shape} does not match "
            f"{program.n_scenes} scenes x {len(inventory)} ads"
        )
    if params.k > program.slot_count:
        raise InfeasibleK(
            f"k={params.k} exceeds the {program.slot_count} available slots"
        )
    half = params.k // 2
    hv, lv = len(inventory.hv_indices), len(inventory.lv_indices)
    if hv < half or lv < half:
        raise InfeasibleInventory(
            f"need {half} HV and {half} LV ads, inventory has {hv} HV / {lv} LV"
        )


def _contributions(
    program: ProgramSpec,
    inventory: AdInventory,
    rel: RelevanceMatrix,
    params: RewardParams,
) -> np.ndarray:
    """Per-(slot, ad) reward contribution; row i-1 is slot i (1-indexed)."""
    m = program.slot_count
    slots = np.arange(1, m + 1, dtype=float)[:, None]
    ad_vals = inventory.valences[None, :]
    scene_vals = program.valences[:m, None]
    r = rel.values[:m, :]
    return params.alpha * (slots * (1.0 - ad_vals)) + params.beta * (
        np.abs(scene_vals - ad_vals) * r
    )


def _iter_balanced_index_subsets(
    inventory: AdInventory, k: int
) -> Iterator[tuple[int, ...]]:
    """All k-subsets of ad indices with k/2 of each polarity, lexicographic."""
    if k < 0 or k % 2:
        raise InfeasibleK(f"k must be even and non-negative, got {k}")
    half = k // 2
    hv_total, lv_total = len(inventory.hv_indices), len(inventory.lv_indices)
    if hv_total < half or lv_total < half:
        raise InfeasibleInventory(
            f"need {half} HV and {half} LV ads, inventory has "
            f"{hv_total} HV / {lv_total} LV"
        )
    is_hv = [p is Polarity.HV for p in inventory.polarities]
    n = len(is_hv)
    # suffix availability for pruning dead branches early
    hv_left = [0] * (n + 1)
    lv_left = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        hv_left[i] = hv_left[i + 1] + (1 if is_hv[i] else 0)
        lv_left[i] = lv_left[i + 1] + (0 if is_hv[i] else 1)

    acc: list[int] = []

    def rec(start: int, need_hv: int, need_lv: int) -> Iterator[tuple[int, ...]]:
        if need_hv == 0 and need_lv == 0:
            yield tuple(acc)
            return
        if need_hv > hv_left[start] or need_lv > lv_left[start]:
            return
        for i in range(start, n):
            if is_hv[i]:
                if need_hv == 0:
                    continue
                take_hv, take_lv = 1, 0
            else:
                if need_lv == 0:
                    continue
                take_hv, take_lv = 0, 1
            acc.append(i)
            yield from rec(i + 1, need_hv - take_hv, need_lv - take_lv)
            acc.pop()

    yield from rec(0, half, half)


def count_balanced_subsets(inventory: AdInventory, k: int) -> int:
    half = k // 2
    return math.comb(len(inventory.hv_indices), half) * math.comb(
        len(inventory.lv_indices), half
    )


def enumerate_balanced_subsets(
    inventory: AdInventory, k: int
) -> Iterator[tuple[str, ...]]:
    """Every k-subset of ad ids with exactly k/2 HV and k/2 LV ads.

    Yielded exactly once each, lexicographically by inventory ad index.
    """
    for idx_subset in _iter_balanced_index_subsets(inventory, k):
        yield tuple(inventory.ads[i].id for i in idx_subset)


def _iter_placements_idx(
    ad_indices: Sequence[int], blocks: tuple[tuple[int, ...], ...]
) -> Iterator[tuple[tuple[int, int], ...]]:
    """All (slot, ad_index) assignments, one ad per block, deterministic order.

    Orderings of the given ads come first (lexicographic relative to the
    input sequence), then the slot choice within each block, block by block.
    """
    for perm in itertools.permutations(ad_indices):
        for slot_choice in itertools.product(*blocks):
            yield tuple(zip(slot_choice, perm))


def enumerate_placements(
    subset: Iterable[str], program: ProgramSpec, k: int
) -> Iterator[Schedule]:
    """Every strict-feasible placement of the given ads, as schedules.

    Each of the k! ad orderings is combined with each choice of one slot per
    contiguous block.  Sets are sorted for determinism; sequences keep their
    given order as the permutation base.
    """
    ads = sorted(subset) if isinstance(subset, (set, frozenset)) else list(subset)
    if len(set(ads)) != len(ads):
        raise ValueError("subset contains repeated ad ids")
    if len(ads) != k:
        raise ValueError(f"subset has {len(ads)} ads, expected k={k}")
    blocks = slot_blocks(program.slot_count, k)
    for perm in itertools.permutations(ads):
        for slot_choice in itertools.product(*blocks):
            yield Schedule.strict(zip(slot_choice, perm))


def _scan_placements(
    subsets: Iterable[tuple[int, ...]],
    blocks: tuple[tuple[int, ...], ...],
    c_rows: list[list[float]],
    base_index: int,
) -> tuple[float, int, tuple[tuple[int, int], ...] | None, int]:
    """Score every placement of every subset; return (best value, its global
    enumeration index, its placement, number of candidates scored)."""
    best_val = -math.inf
    best_idx = -1
    best_placement = None
    count = 0
    for sub in subsets:
        for placement in _iter_placements_idx(sub, blocks):
            value = 0.0
            for slot, j in placement:
                value += c_rows[slot - 1][j]
            if value > best_val:
                best_val = value
                best_idx = base_index + count
                best_placement = placement
            count += 1
    return best_val, best_idx, best_placement, count


def solve_brute_force(
    program: ProgramSpec,
    inventory: AdInventory,
    rel: RelevanceMatrix,
    params: RewardParams,
    *,
    cap: int = DEFAULT_CANDIDATE_CAP,
    threads: int = 1,
) -> SolveReport:
    """Exhaustively score every feasible schedule and keep the best.

    Ties go to the first schedule in enumeration order (lexicographic in
    subset, ad ordering, then slot choice).  Raises InstanceTooLarge when
    the candidate count exceeds ``cap``.  ``threads`` only fans the scan
    out over workers; the result is identical for any thread count.
    """
    start = time.perf_counter()
    rel = as_relevance(rel)
    _check_instance(program, inventory, rel, params)
    k = params.k
    blocks = slot_blocks(program.slot_count, k)
    n_subsets = count_balanced_subsets(inventory, k)
    per_subset = math.factorial(k) * math.prod(len(b) for b in blocks)
    total = n_subsets * per_subset
    if total > cap:
        raise InstanceTooLarge(
            f"{total} candidate schedules exceed the cap of {cap}; "
            f"use branch-and-bound instead"
        )

    c_rows = _contributions(program, inventory, rel, params).tolist()
    if threads <= 1:
        best_val, best_idx, best_placement, count = _scan_placements(
            _iter_balanced_index_subsets(inventory, k), blocks, c_rows, 0
        )
    else:
        subsets = list(_iter_balanced_index_subsets(inventory, k))
        chunk = max(1, math.ceil(len(subsets) / threads))
        jobs = [
            (subsets[i : i + chunk], i * per_subset)
            for i in range(0, len(subsets), chunk)
        ]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(
                pool.map(lambda a: _scan_placements(a[0], blocks, c_rows, a[1]), jobs)
            )
        best_val, best_idx, best_placement, count = -math.inf, -1, None, 0
        for val, idx, placement, n in results:
            count += n
            # same winner as the sequential scan: value first, then earliest index
            if val > best_val or (val == best_val and idx < best_idx):
                best_val, best_idx, best_placement = val, idx, placement

    assert best_placement is not None and count == total
    schedule = Schedule.strict(
        (slot, inventory.ads[j].id) for slot, j in best_placement
    )
    value = reward(schedule, program, inventory, rel, params)
    return SolveReport(
        schedule=schedule,
        reward=value,
        solver=BRUTE_FORCE,
        candidates_evaluated=count,
        wall_time=time.perf_counter() - start,
    )


def solve_branch_and_bound(
    program: ProgramSpec,
    inventory: AdInventory,
    rel: RelevanceMatrix,
    params: RewardParams,
) -> SolveReport:
    """Exact block-by-block search with admissible pruning.

    Nodes assign one (ad, slot) pair per block in block order.  A node is
    pruned when its bound cannot exceed the incumbent.  Three admissible
    bounds run cheapest-first, each only if the previous failed to prune:
    (1) per remaining block, the best contribution over unused ads and that
    block's slots, ignoring both ad reuse and the polarity quota; (2) the
    same per-block-per-polarity maxima combined under the exact HV/LV
    quota split, still allowing reuse inside a polarity class; (3) a
    max-weight assignment of remaining blocks to unused ads, forbidding
    reuse but ignoring the quota.  Every relaxation only overestimates, so
    the search stays exact.  Children are explored best-contribution-first
    so a strong incumbent appears early.
    """
    start = time.perf_counter()
    rel = as_relevance(rel)
    _check_instance(program, inventory, rel, params)
    k = params.k
    blocks = slot_blocks(program.slot_count, k)
    half = k // 2
    n_ads = len(inventory)
    is_hv = [p is Polarity.HV for p in inventory.polarities]

    c = _contributions(program, inventory, rel, params)
    # children per block, best contribution first (ties: ad index, then slot)
    children: list[list[tuple[float, int, int]]] = []
    for block in blocks:
        cand = [(float(c[i - 1, j]), i, j) for j in range(n_ads) for i in block]
        cand.sort(key=lambda t: (-t[0], t[2], t[1]))
        children.append(cand)
    # per-block best value per ad, and ads ordered by it, for the bounds
    g_matrix = (
        np.stack([c[np.array(block) - 1].max(axis=0) for block in blocks])
        if k
        else np.zeros((0, n_ads))
    )
    g: list[list[float]] = [row.tolist() for row in g_matrix]
    g_order: list[list[int]] = [
        np.argsort(-row, kind="stable").tolist() for row in g_matrix
    ]

    hv_pool = list(inventory.hv_indices)
    lv_pool = list(inventory.lv_indices)
    used = [False] * n_ads
    path: list[tuple[int, int]] = []
    best_val = -math.inf
    best_leaf: tuple[tuple[int, int], ...] | None = None
    leaves = 0
    pruned = 0

    def tail_bound(depth: int, partial: float) -> float:
        value = partial
        for b in range(depth, k):
            for j in g_order[b]:
                if not used[j]:
                    value += g[b][j]
                    break
        return value

    def quota_bound(depth: int, partial: float, hv_used: int) -> float:
        hv_need = half - hv_used
        lv_need = (k - depth) - hv_need
        free_hv = [j for j in hv_pool if not used[j]]
        free_lv = [j for j in lv_pool if not used[j]]
        best_hv = g_matrix[depth:, free_hv].max(axis=1) if free_hv else None
        best_lv = g_matrix[depth:, free_lv].max(axis=1) if free_lv else None
        if hv_need == 0:
            return partial + float(best_lv.sum())
        if lv_need == 0:
            return partial + float(best_hv.sum())
        # give the hv_need blocks with the largest HV advantage to HV ads
        gain = np.sort(best_hv - best_lv)[::-1]
        return partial + float(best_lv.sum() + gain[:hv_need].sum())

    def assignment_bound(depth: int, partial: float) -> float:
        free = [j for j in range(n_ads) if not used[j]]
        weights = g_matrix[depth:, free]
        rows, cols = linear_sum_assignment(weights, maximize=True)
        return partial + float(weights[rows, cols].sum())

    def dfs(depth: int, partial: float, hv_used: int) -> None:
        nonlocal best_val, best_leaf, leaves, pruned
        if depth == k:
            leaves += 1
            if partial > best_val:
                best_val = partial
                best_leaf = tuple(path)
            return
        if tail_bound(depth, partial) <= best_val:
            pruned += 1
            return
        if quota_bound(depth, partial, hv_used) <= best_val:
            pruned += 1
            return
        if assignment_bound(depth, partial) <= best_val:
            pruned += 1
            return
        allow_hv = hv_used < half
        allow_lv = (depth - hv_used) < half
        for value, slot, j in children[depth]:
            if used[j]:
                continue
            hv_j = is_hv[j]
            if hv_j:
                if not allow_hv:
                    continue
            elif not allow_lv:
                continue
            used[j] = True
            path.append((slot, j))
            dfs(depth + 1, partial + value, hv_used + (1 if hv_j else 0))
            path.pop()
            used[j] = False

    dfs(0, 0.0, 0)
    assert best_leaf is not None
    schedule = Schedule.strict((slot, inventory.ads[j].id) for slot, j in best_leaf)
    value = reward(schedule, program, inventory, rel, params)
    return SolveReport(
        schedule=schedule,
        reward=value,
        solver=BRANCH_AND_BOUND,
        candidates_evaluated=leaves,
        wall_time=time.perf_counter() - start,
        nodes_pruned=pruned,
    )


def solve_lp_relax(
    program: ProgramSpec,
    inventory: AdInventory,
    rel: RelevanceMatrix,
    params: RewardParams,
) -> SolveReport:
    """Continuous relaxation plus greedy rounding.

    The relaxation lets every slot-ad indicator range over [0, 1] under the
    linearized constraints (at most one ad per slot, unit mass per block,
    k/2 total mass on each polarity, total mass k); its optimum is recorded
    as ``upper_bound``.  Rounding walks the blocks in order and picks the
    unused (slot, ad) pair with the largest fractional mass whose polarity
    quota is still open, so the result is always strict-feasible.
    """
    start = time.perf_counter()
    rel = as_relevance(rel)
    _check_instance(program, inventory, rel, params)
    k = params.k
    m = program.slot_count
    n_ads = len(inventory)
    blocks = slot_blocks(m, k)
    half = k // 2
    is_hv = [p is Polarity.HV for p in inventory.polarities]

    if k == 0:
        return SolveReport(
            schedule=Schedule.empty(),
            reward=0.0,
            solver=LP_RELAX,
            candidates_evaluated=1,
            wall_time=time.perf_counter() - start,
            upper_bound=0.0,
        )

    c = _contributions(program, inventory, rel, params)
    n_vars = m * n_ads  # variable (i, j) lives at index (i-1)*n_ads + j

    a_ub = np.zeros((m, n_vars))
    for i in range(m):
        a_ub[i, i * n_ads : (i + 1) * n_ads] = 1.0
    b_ub = np.ones(m)

    a_eq = np.zeros((k + 3, n_vars))
    b_eq = np.empty(k + 3)
    for b, block in enumerate(blocks):
        for slot in block:
            a_eq[b, (slot - 1) * n_ads : slot * n_ads] = 1.0
        b_eq[b] = 1.0
    hv_row = a_eq[k].reshape(m, n_ads)
    lv_row = a_eq[k + 1].reshape(m, n_ads)
    for j in range(n_ads):
        (hv_row if is_hv[j] else lv_row)[:, j] = 1.0
    b_eq[k] = half
    b_eq[k + 1] = half
    a_eq[k + 2, :] = 1.0
    b_eq[k + 2] = float(k)

    res = linprog(
        -c.ravel(),
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=(0.0, 1.0),
        method="highs",
    )
    if not res.success:
        raise RuntimeError(f"LP relaxation failed to solve: {res.message}")
    mass = res.x.reshape(m, n_ads)
    upper_bound = float(np.dot(c.ravel(), res.x))

    used: set[int] = set()
    hv_used = 0
    placements: list[tuple[int, int]] = []
    for block in blocks:
        best_mass = -math.inf
        pick: tuple[int, int] | None = None
        for slot in block:
            for j in range(n_ads):
                if j in used:
                    continue
                if is_hv[j]:
                    if hv_used >= half:
                        continue
                elif (len(placements) - hv_used) >= half:
                    continue
                if mass[slot - 1, j] > best_mass:
                    best_mass = mass[slot - 1, j]
                    pick = (slot, j)
        assert pick is not None
        placements.append(pick)
        used.add(pick[1])
        hv_used += 1 if is_hv[pick[1]] else 0

    schedule = Schedule.strict((slot, inventory.ads[j].id) for slot, j in placements)
    value = reward(schedule, program, inventory, rel, params)
    return SolveReport(
        schedule=schedule,
        reward=value,
        solver=LP_RELAX,
        candidates_evaluated=1,
        wall_time=time.perf_counter() - start,
        upper_bound=upper_bound,
    )
