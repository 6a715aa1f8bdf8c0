"""File formats for programs, inventories, features, relevance and artifacts.

Structured data travels as JSON with a ``format`` version header; numeric
grids (features, relevance) are whitespace-separated text with a ``#`` header
comment.  Floats serialize via ``repr`` (JSON) or ``%.17g`` (grids), both of
which round-trip float64 exactly, so re-running a solve reproduces output
files byte for byte.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal

import numpy as np

from .core import (
    Ad,
    AdInventory,
    ProgramSpec,
    RelevanceMatrix,
    Scene,
    Schedule,
    ScheduleEntry,
    Valence,
)
from .errors import AdPlacerError, ParseError, ValenceOutOfRange
from .profile import ProfilePoint, VpsProfile
from .relevance import KeyframeFeatures
from .solvers import SolveReport

PROGRAM_FORMAT = "adplacer-program/1"
INVENTORY_FORMAT = "adplacer-inventory/1"
SCHEDULE_FORMAT = "adplacer-schedule/1"
REPORT_FORMAT = "adplacer-report/1"
PROFILE_FORMAT = "adplacer-profile/1"
RELEVANCE_HEADER = "adplacer-rel/1"
FEATURES_HEADER = "adplacer-features/1"

Scale = Literal["unit", "hundred"]


def _dump_json(doc: dict, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _load_json(path, expected_format: str) -> dict:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: expected a JSON object at top level")
    if doc.get("format") != expected_format:
        raise ParseError(
            f"{path}: expected format header {expected_format!r}, "
            f"got {doc.get('format')!r}"
        )
    return doc


def _parse_valence(raw, scale: Scale, where: str) -> Valence:
    try:
        x = float(raw)
    except (TypeError, ValueError):
        raise ParseError(f"{where}: valence is not a number: {raw!r}") from None
    limit = 1.0 if scale == "unit" else 100.0
    if not 0.0 <= x <= limit:
        raise ValenceOutOfRange(
            f"{where}: valence {raw} outside [0, {limit:g}] for scale {scale!r}"
        )
    return Valence(x / limit)


def load_program(path, scale: Scale = "unit") -> ProgramSpec:
    """Parse a program file, normalizing valences to the unit scale."""
    doc = _load_json(path, PROGRAM_FORMAT)
    raw_scenes = doc.get("scenes")
    if not isinstance(raw_scenes, list) or not raw_scenes:
        raise ParseError(f"{path}: 'scenes' must be a non-empty list")
    scenes = []
    for idx, item in enumerate(raw_scenes):
        where = f"{path}: scenes[{idx}]"
        if not isinstance(item, dict) or "id" not in item or "valence" not in item:
            raise ParseError(f"{where}: expected an object with 'id' and 'valence'")
        scenes.append(Scene(str(item["id"]), _parse_valence(item["valence"], scale, where)))
    try:
        return ProgramSpec(tuple(scenes), int(doc.get("slot_count", 0)))
    except (ValueError, TypeError) as exc:
        if isinstance(exc, AdPlacerError):
            raise
        raise ParseError(f"{path}: {exc}") from exc


def save_program(program: ProgramSpec, path) -> None:
    _dump_json(
        {
            "format": PROGRAM_FORMAT,
            "scenes": [
                {"id": s.id, "valence": s.valence.value} for s in program.scenes
            ],
            "slot_count": program.slot_count,
        },
        path,
    )


def load_inventory(path, scale: Scale = "unit") -> AdInventory:
    """Parse an ad inventory file, normalizing valences to the unit scale."""
    doc = _load_json(path, INVENTORY_FORMAT)
    raw_ads = doc.get("ads")
    if not isinstance(raw_ads, list) or not raw_ads:
        raise ParseError(f"{path}: 'ads' must be a non-empty list")
    ads = []
    for idx, item in enumerate(raw_ads):
        where = f"{path}: ads[{idx}]"
        if not isinstance(item, dict) or "id" not in item or "valence" not in item:
            raise ParseError(f"{where}: expected an object with 'id' and 'valence'")
        ads.append(Ad(str(item["id"]), _parse_valence(item["valence"], scale, where)))
    try:
        return AdInventory(tuple(ads))
    except (ValueError, TypeError) as exc:
        if isinstance(exc, AdPlacerError):
            raise
        raise ParseError(f"{path}: {exc}") from exc


def save_inventory(inventory: AdInventory, path) -> None:
    _dump_json(
        {
            "format": INVENTORY_FORMAT,
            "ads": [{"id": a.id, "valence": a.valence.value} for a in inventory.ads],
        },
        path,
    )


def schedule_dict(schedule: Schedule, mode: str = "strict") -> dict:
    return {
        "format": SCHEDULE_FORMAT,
        "mode": mode,
        "k": len(schedule.entries),
        "entries": [
            {"slot": e.slot, "rank": e.rank, "ad_id": e.ad_id}
            for e in schedule.in_slot_order
        ],
    }


def save_schedule(schedule: Schedule, path, mode: str = "strict") -> None:
    _dump_json(schedule_dict(schedule, mode), path)


def load_schedule(path) -> Schedule:
    doc = _load_json(path, SCHEDULE_FORMAT)
    raw = doc.get("entries")
    if not isinstance(raw, list):
        raise ParseError(f"{path}: 'entries' must be a list")
    try:
        entries = tuple(
            ScheduleEntry(int(e["slot"]), int(e["rank"]), str(e["ad_id"])) for e in raw
        )
        return Schedule(entries)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: bad schedule entry: {exc}") from exc


def report_dict(report: SolveReport, mode: str = "strict") -> dict:
    return {
        "format": REPORT_FORMAT,
        "solver": report.solver,
        "reward": report.reward,
        "candidates_evaluated": report.candidates_evaluated,
        "nodes_pruned": report.nodes_pruned,
        "upper_bound": report.upper_bound,
        "wall_time": report.wall_time,
        "schedule": schedule_dict(report.schedule, mode),
    }


def save_report(doc: dict, path) -> None:
    if doc.get("format") != REPORT_FORMAT:
        doc = {"format": REPORT_FORMAT, **doc}
    _dump_json(doc, path)


def load_report(path) -> dict:
    return _load_json(path, REPORT_FORMAT)


def save_profile(profile: VpsProfile, path) -> None:
    _dump_json(
        {
            "format": PROFILE_FORMAT,
            "points": [
                {
                    "position": p.position,
                    "kind": p.kind,
                    "entity_id": p.entity_id,
                    "valence_0_100": p.valence_0_100,
                }
                for p in profile.points
            ],
        },
        path,
    )


def load_profile(path) -> VpsProfile:
    doc = _load_json(path, PROFILE_FORMAT)
    raw = doc.get("points")
    if not isinstance(raw, list):
        raise ParseError(f"{path}: 'points' must be a list")
    try:
        points = tuple(
            ProfilePoint(
                int(p["position"]),
                str(p["kind"]),
                str(p["entity_id"]),
                float(p["valence_0_100"]),
            )
            for p in raw
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: bad profile point: {exc}") from exc
    return VpsProfile(points)


def _load_grid(path) -> np.ndarray:
    try:
        return np.loadtxt(path, ndmin=2)
    except OSError:
        raise
    except Exception as exc:  # np.loadtxt raises assorted ValueError subtypes
        raise ParseError(f"{path}: cannot parse numeric grid: {exc}") from exc


def load_relevance(path) -> RelevanceMatrix:
    """Read an N x P relevance grid (whitespace-separated, '#' comments)."""
    try:
        return RelevanceMatrix(_load_grid(path))
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def save_relevance(rel: RelevanceMatrix, path) -> None:
    np.savetxt(path, rel.values, fmt="%.17g", header=RELEVANCE_HEADER)


def load_features_dir(dirpath) -> dict[str, KeyframeFeatures]:
    """Load every ``<entity_id>.txt`` grid in a directory, keyed by entity id."""
    directory = Path(dirpath)
    if not directory.is_dir():
        raise ParseError(f"{dirpath}: not a directory")
    out: dict[str, KeyframeFeatures] = {}
    for file in sorted(directory.glob("*.txt")):
        out[file.stem] = KeyframeFeatures(file.stem, _load_grid(file))
    if not out:
        raise ParseError(f"{dirpath}: no *.txt feature files found")
    return out


def save_features(feats: KeyframeFeatures, path) -> None:
    np.savetxt(path, feats.frames, fmt="%.17g", header=FEATURES_HEADER)
