"""Interleaved scene/ad valence sequences and a simple spikiness metric."""

from __future__ import annotations

from dataclasses import dataclass

from .core import AdInventory, ProgramSpec, Schedule, ScheduleEntry
from .errors import TooShort


@dataclass(frozen=True)
class ProfilePoint:
    position: int
    kind: str  # "scene" or "ad"
    entity_id: str
    valence_0_100: float


@dataclass(frozen=True)
class VpsProfile:
    """Presentation-order valence sequence of a program with embedded ads."""

    points: tuple[ProfilePoint, ...]


def build_profile(
    schedule: Schedule, program: ProgramSpec, inventory: AdInventory
) -> VpsProfile:
    """Interleave scenes with their scheduled ads, in presentation order.

    Ads at slot i follow scene i directly (slot 0 ads precede scene 1);
    several ads on one slot play in rank order.  Valences are exported on
    the 0-100 scale.
    """
    by_slot: dict[int, list[ScheduleEntry]] = {}
    for entry in schedule.entries:
        if not 0 <= entry.slot <= program.slot_count:
            raise ValueError(
                f"slot {entry.slot} outside 0..{program.slot_count}"
            )
        by_slot.setdefault(entry.slot, []).append(entry)
    for group in by_slot.values():
        group.sort(key=lambda e: (e.rank, e.ad_id))

    points: list[ProfilePoint] = []

    def emit_ads(slot: int) -> None:
        for entry in by_slot.get(slot, ()):
            ad = inventory.ad(entry.ad_id)  # raises UnknownAdId
            points.append(
                ProfilePoint(len(points) + 1, "ad", ad.id, 100.0 * ad.valence.value)
            )

    emit_ads(0)
    for i, scene in enumerate(program.scenes, start=1):
        points.append(
            ProfilePoint(len(points) + 1, "scene", scene.id, 100.0 * scene.valence.value)
        )
        emit_ads(i)
    return VpsProfile(tuple(points))


def total_variation(profile: VpsProfile) -> float:
    """Sum of absolute valence jumps between consecutive points (0-100 scale)."""
    if len(profile.points) < 2:
        raise TooShort("total variation needs at least 2 profile points")
    total = 0.0
    for prev, cur in zip(profile.points, profile.points[1:]):
        total += abs(cur.valence_0_100 - prev.valence_0_100)
    return total
