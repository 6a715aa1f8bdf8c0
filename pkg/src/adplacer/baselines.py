"""Naive scheduler used as a comparison point for the exact solvers."""

from __future__ import annotations

import math
import random

from .core import AdInventory, Polarity, ProgramSpec, Schedule, ScheduleEntry
from .errors import InfeasibleInventory, InfeasibleK


def trivial_schedule(
    program: ProgramSpec, inventory: AdInventory, k: int, seed: int
) -> Schedule:
    """Pick a balanced ad set at random and pile it at the head and midpoint.

    After a seeded shuffle the first k/2 ads go to the head insertion point
    (slot 0, before scene 1) and the rest to the slot before scene
    ceil(N/2) + 1; ``rank`` encodes the play order inside each group.  The
    RNG is the stdlib Mersenne Twister, so equal seeds give equal schedules.
    """
    if k < 0 or k % 2:
        raise InfeasibleK(f"k must be even and non-negative, got {k}")
    half = k // 2
    hv_ids = [ad.id for ad in inventory.ads if ad.polarity is Polarity.HV]
    lv_ids = [ad.id for ad in inventory.ads if ad.polarity is Polarity.LV]
    if len(hv_ids) < half or len(lv_ids) < half:
        raise InfeasibleInventory(
            f"need {half} HV and {half} LV ads, inventory has "
            f"{len(hv_ids)} HV / {len(lv_ids)} LV"
        )
    rng = random.Random(seed)
    chosen = rng.sample(hv_ids, half) + rng.sample(lv_ids, half)
    rng.shuffle(chosen)

    mid_slot = math.ceil(program.n_scenes / 2)  # the slot before scene N/2 + 1
    entries = [ScheduleEntry(0, r, ad_id) for r, ad_id in enumerate(chosen[:half])]
    entries += [
        ScheduleEntry(mid_slot, r, ad_id) for r, ad_id in enumerate(chosen[half:])
    ]
    return Schedule(tuple(entries))
