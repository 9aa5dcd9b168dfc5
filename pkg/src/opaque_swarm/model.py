"""Robot state, the 12 model variants, local frames, and the snapshot rule.

A snapshot is everything a robot learns at a Look: visible positions mapped
into a fresh adversarial local frame, plus whatever its light class allows
(external colors of others, its own internal color).  Entries carry no
identities and no activation information.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .geom import DEFAULT_TOLERANCE, ORIGIN, Point, Tolerance, blocks

OFF = "off"


class LightClass(enum.Enum):
    OBLOT = "oblot"
    FSTA = "fsta"
    FCOM = "fcom"
    LUMI = "lumi"

    @property
    def internal_visible(self) -> bool:
        return self in (LightClass.FSTA, LightClass.LUMI)

    @property
    def external_visible(self) -> bool:
        return self in (LightClass.FCOM, LightClass.LUMI)


class SyncMode(enum.Enum):
    FSYNC = "fsync"
    SSYNC = "ssync"
    ASYNC = "async"


_SYNC_SUFFIX = {SyncMode.FSYNC: "F", SyncMode.SSYNC: "S", SyncMode.ASYNC: "A"}


@dataclass(frozen=True, slots=True)
class ModelId:
    light: LightClass
    sync: SyncMode

    def label(self) -> str:
        return f"{self.light.name}^{_SYNC_SUFFIX[self.sync]}"

    @staticmethod
    def parse(text: str) -> "ModelId":
        """Accepts 'fcom,async' or the display form 'FCOM^A'."""
        t = text.strip()
        if "^" in t:
            light_s, sync_s = t.split("^", 1)
            sync_map = {"F": SyncMode.FSYNC, "S": SyncMode.SSYNC, "A": SyncMode.ASYNC}
            return ModelId(LightClass[light_s.strip().upper()], sync_map[sync_s.strip().upper()])
        light_s, sync_s = (part.strip().lower() for part in t.split(","))
        return ModelId(LightClass(light_s), SyncMode(sync_s))


ALL_MODELS: tuple[ModelId, ...] = tuple(
    ModelId(light, sync) for light in LightClass for sync in SyncMode
)


@dataclass(frozen=True, slots=True)
class Configuration:
    """Positions and light colors, indexed by simulator-internal identity."""

    robots: tuple[tuple[Point, str], ...]

    @staticmethod
    def of(positions: Sequence[Point], lights: Sequence[str] | None = None) -> "Configuration":
        if lights is None:
            lights = [OFF] * len(positions)
        return Configuration(tuple(zip(positions, lights)))

    @property
    def n(self) -> int:
        return len(self.robots)

    def positions(self) -> list[Point]:
        return [p for p, _ in self.robots]

    def lights(self) -> list[str]:
        return [c for _, c in self.robots]


@dataclass(frozen=True, slots=True)
class MultiplicityViolation:
    pairs: tuple[tuple[int, int], ...]


def validate_configuration(config: Configuration, tol: Tolerance = DEFAULT_TOLERANCE
                           ) -> Optional[MultiplicityViolation]:
    """None when valid; otherwise every coincident index pair."""
    pos = config.positions()
    scale = max((p.norm() for p in pos), default=0.0)
    bad = []
    for i in range(len(pos)):
        for j in range(i + 1, len(pos)):
            if pos[i].dist(pos[j]) <= tol.length(scale):
                bad.append((i, j))
    return MultiplicityViolation(tuple(bad)) if bad else None


@dataclass(frozen=True, slots=True)
class LocalFrame:
    """Global -> local map: p |-> scale * R(rotation) * M(reflect) * (p - origin)."""

    rotation: float
    reflect: bool
    scale: float
    origin: Point

    def __post_init__(self) -> None:
        if not self.scale > 0.0:
            raise ValueError("frame scale must be positive")

    def to_local(self, p: Point) -> Point:
        v = p - self.origin
        if self.reflect:
            v = Point(v.x, -v.y)
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        return Point(self.scale * (c * v.x - s * v.y), self.scale * (s * v.x + c * v.y))

    def to_global(self, local: Point) -> Point:
        c, s = math.cos(-self.rotation), math.sin(-self.rotation)
        v = Point((c * local.x - s * local.y) / self.scale,
                  (s * local.x + c * local.y) / self.scale)
        if self.reflect:
            v = Point(v.x, -v.y)
        return self.origin + v

    @staticmethod
    def identity(origin: Point = ORIGIN) -> "LocalFrame":
        return LocalFrame(0.0, False, 1.0, origin)

    @staticmethod
    def sample(rng: random.Random, origin: Point) -> "LocalFrame":
        """Adversarial frame: fresh rotation, chirality, and unit distance."""
        rotation = rng.uniform(0.0, 2.0 * math.pi)
        reflect = rng.random() < 0.5
        scale = math.exp(rng.uniform(math.log(0.1), math.log(10.0)))
        return LocalFrame(rotation, reflect, scale, origin)


def frame_to_global(frame: LocalFrame, local_dest: Point) -> Point:
    return frame.to_global(local_dest)


@dataclass(frozen=True, slots=True)
class VisibleRobot:
    position: Point                  # local frame
    color: Optional[str]             # external color, when the model shows one


@dataclass(frozen=True, slots=True)
class Snapshot:
    visible: tuple[VisibleRobot, ...]
    own_internal: Optional[str]
    transparent: bool

    @property
    def k(self) -> int:
        return len(self.visible)


def visible_set(positions: Sequence[Point], observer: int, transparent: bool,
                tol: Tolerance = DEFAULT_TOLERANCE) -> set[int]:
    """Indices visible from the observer under the opaqueness rule.

    Transparent robots see everyone; opaque robots miss exactly those
    targets with a third robot strictly between, evaluated on the
    instantaneous positions (mid-move robots both block and are visible).
    """
    n = len(positions)
    others = [j for j in range(n) if j != observer]
    if transparent:
        return set(others)
    obs = positions[observer]
    out = set()
    for j in others:
        hidden = False
        for k in others:
            if k == j:
                continue
            if blocks(obs, positions[j], positions[k], tol):
                hidden = True
                break
        if not hidden:
            out.add(j)
    return out


def take_snapshot(positions: Sequence[Point], lights: Sequence[str], observer: int,
                  frame: LocalFrame, model: ModelId, transparent: bool,
                  rng: random.Random, tol: Tolerance = DEFAULT_TOLERANCE) -> Snapshot:
    """Build the observer's snapshot for one Look.

    The multiset is presented in a seed-shuffled order so algorithms cannot
    exploit ordering as covert identity; the observer itself is excluded
    (its own position is the local origin by construction).
    """
    if frame.origin.dist(positions[observer]) > tol.length(positions[observer].norm()):
        raise ValueError("frame origin must sit on the observer")
    vis = visible_set(positions, observer, transparent, tol)
    entries = []
    for j in sorted(vis):
        color = lights[j] if model.light.external_visible else None
        entries.append(VisibleRobot(frame.to_local(positions[j]), color))
    rng.shuffle(entries)
    own = lights[observer] if model.light.internal_visible else None
    return Snapshot(tuple(entries), own, transparent)
