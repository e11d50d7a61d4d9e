"""Deterministic integer-only table shuffleboard, protocol version 1.

Two players push a simulated weight down a long table toward scoring
zones at the far end, defended by the opponent's paddle. Every quantity
is an integer and every rounding step is normative, so any two
implementations on any platforms resolve identical inputs to identical
outcomes. No floating-point operation may appear in this module; the
trig comes from a frozen lookup table shipped as data.

Geometry (version 1, fixed):
  table length 10000 x width 5000, shooter starts at x = 2500, y = 0
  defender paddle slides on the line y = 9500 with reach 400 either side
  zones by resting y: [8000,9000) = 1pt, [9000,9600) = 2pt,
  [9600,10000] = 3pt, beyond 10000 the puck leaves the table
  path length from force F: floor(3*F^2 / 100), so max force travels
  three table lengths and wall reflections matter
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum, IntEnum
from importlib import resources

from .errors import OutOfRange, WrongPhase

TABLE_LENGTH = 10000
TABLE_WIDTH = 5000
DEFENDER_LINE_Y = 9500
PADDLE_REACH = 400
START_X = 2500
ANGLE_MAX_DDEG = 600
FORCE_MIN = 1
FORCE_MAX = 1000
ZONE_BANDS = ((8000, 9000, 1), (9000, 9600, 2), (9600, 10001, 3))
WINNING_SCORE = 7
SIN_SCALE = 10**6


def _load_sintab() -> tuple[int, ...]:
    text = resources.files("zkpuck.data").joinpath("sintab.v1.txt").read_text()
    values = []
    for line in text.splitlines():
        idx_s, val_s = line.split()
        if int(idx_s) != len(values):
            raise ValueError("sintab file out of order")
        values.append(int(val_s))
    if len(values) != 901:
        raise ValueError("sintab file must hold indices 0..900")
    return tuple(values)


# round(sin(i/10 deg) * 1e6) for i in 0..900; index 900 - |a| gives cos(a).
SINTAB = _load_sintab()


@dataclass(frozen=True)
class Shot:
    """angle in deci-degrees from the table axis (signed), force 1..1000."""

    angle_ddeg: int
    force: int

    def __post_init__(self) -> None:
        if not -ANGLE_MAX_DDEG <= self.angle_ddeg <= ANGLE_MAX_DDEG:
            raise OutOfRange(f"angle {self.angle_ddeg} outside +-{ANGLE_MAX_DDEG}")
        if not FORCE_MIN <= self.force <= FORCE_MAX:
            raise OutOfRange(f"force {self.force} outside {FORCE_MIN}..{FORCE_MAX}")


@dataclass(frozen=True)
class Defense:
    paddle_x: int

    def __post_init__(self) -> None:
        if not 0 <= self.paddle_x <= TABLE_WIDTH:
            raise OutOfRange(f"paddle_x {self.paddle_x} outside 0..{TABLE_WIDTH}")


class OutcomeKind(IntEnum):
    BLOCKED = 0
    SCORED = 1
    OFF_TABLE = 2
    SHORT_OF_ZONES = 3


@dataclass(frozen=True)
class ShotOutcome:
    kind: OutcomeKind
    points: int
    final_x: int | None
    final_y: int | None


def path_length(force: int) -> int:
    """Total distance the puck travels before friction stops it."""
    return (3 * force * force) // 100


def fold(x: int) -> int:
    """Reflect x into [0, TABLE_WIDTH] by bouncing off both walls.

    Even, 2W-periodic triangle wave; exact for any integer magnitude.
    """
    period = 2 * TABLE_WIDTH
    m = x % period
    return m if m <= TABLE_WIDTH else period - m


def _signed_scale(distance: int, sin_scaled: int) -> int:
    """floor(distance * |sin| / scale) with the sign reattached afterwards.

    Flooring the magnitude rather than the signed product keeps left and
    right shots exact mirrors of each other.
    """
    magnitude = (distance * abs(sin_scaled)) // SIN_SCALE
    return -magnitude if sin_scaled < 0 else magnitude


def resolve_shot(start_x: int, shot: Shot, defense: Defense) -> ShotOutcome:
    """Pure closed-form resolution of one shot against one committed defense."""
    if not 0 <= start_x <= TABLE_WIDTH:
        raise OutOfRange(f"start_x {start_x} outside 0..{TABLE_WIDTH}")

    s = path_length(shot.force)
    sin_scaled = SINTAB[abs(shot.angle_ddeg)]
    if shot.angle_ddeg < 0:
        sin_scaled = -sin_scaled
    cos_scaled = SINTAB[900 - abs(shot.angle_ddeg)]

    # Path distance at which the puck's y reaches the defender line.
    d_cross = -((-DEFENDER_LINE_Y * SIN_SCALE) // cos_scaled)

    if s >= d_cross:
        x_cross = fold(start_x + _signed_scale(d_cross, sin_scaled))
        if abs(x_cross - defense.paddle_x) <= PADDLE_REACH:
            return ShotOutcome(OutcomeKind.BLOCKED, 0, None, None)

    final_y = (s * cos_scaled) // SIN_SCALE
    final_x = fold(start_x + _signed_scale(s, sin_scaled))
    if final_y > TABLE_LENGTH:
        return ShotOutcome(OutcomeKind.OFF_TABLE, 0, final_x, final_y)
    for lo, hi, points in ZONE_BANDS:
        if lo <= final_y < hi:
            return ShotOutcome(OutcomeKind.SCORED, points, final_x, final_y)
    return ShotOutcome(OutcomeKind.SHORT_OF_ZONES, 0, final_x, final_y)


# --- match state machine -----------------------------------------------------

class Player(IntEnum):
    A = 0
    B = 1

    @property
    def other(self) -> "Player":
        return Player.B if self is Player.A else Player.A


class Phase(Enum):
    AWAIT_DEFENSE = "await_defense"
    AWAIT_SHOT = "await_shot"
    FINISHED = "finished"


@dataclass(frozen=True)
class MatchState:
    """Turn structure: defender commits, shooter fires, roles swap.

    The defender is always the shooter's opponent. First player to
    reach 7 points wins.
    """

    scores: tuple[int, int]
    shooter: Player
    phase: Phase
    shots_played: int
    winner: Player | None = None

    @classmethod
    def initial(cls, first_shooter: Player) -> "MatchState":
        return cls(
            scores=(0, 0),
            shooter=first_shooter,
            phase=Phase.AWAIT_DEFENSE,
            shots_played=0,
        )

    @property
    def defender(self) -> Player:
        return self.shooter.other


def commit_defense(state: MatchState) -> MatchState:
    """Defender's paddle is locked in (held hidden by the caller)."""
    if state.phase is not Phase.AWAIT_DEFENSE:
        raise WrongPhase(f"cannot commit defense during {state.phase.value}")
    return replace(state, phase=Phase.AWAIT_SHOT)


def apply_outcome(state: MatchState, outcome: ShotOutcome) -> MatchState:
    """Credit the shooter, swap roles, finish at the winning score."""
    if state.phase is not Phase.AWAIT_SHOT:
        raise WrongPhase(f"cannot apply an outcome during {state.phase.value}")
    scores = list(state.scores)
    scores[state.shooter] += outcome.points
    if scores[state.shooter] >= WINNING_SCORE:
        return MatchState(
            scores=(scores[0], scores[1]),
            shooter=state.shooter.other,
            phase=Phase.FINISHED,
            shots_played=state.shots_played + 1,
            winner=state.shooter,
        )
    return MatchState(
        scores=(scores[0], scores[1]),
        shooter=state.shooter.other,
        phase=Phase.AWAIT_DEFENSE,
        shots_played=state.shots_played + 1,
    )
