"""The 64-cell affect grid.

Two continuous dimensions on a 0..100 scale: attitude (negative to positive,
left to right) and energy (low to high, bottom to top). The grid splits each
axis into 8 bands, giving 64 cells whose centers sit at 6.25 + 12.5*i. A
tolerance of 13 units therefore spans exactly one cell pitch: adjacent cell
centers (12.5 apart) compare as "close", centers two cells apart (25) do not.
"""

import math
from dataclasses import dataclass

AXIS_MIN = 0.0
AXIS_MAX = 100.0
GRID_SIZE = 8
CELL_PITCH = (AXIS_MAX - AXIS_MIN) / GRID_SIZE  # 12.5
DEFAULT_TOLERANCE = 13.0


@dataclass(frozen=True)
class EmotionPoint:
    """A point on the attitude x energy plane."""

    attitude: float
    energy: float

    def __post_init__(self):
        for name in ("attitude", "energy"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or v != v or v in (float("inf"), float("-inf")):
                raise ValueError(f"{name} must be finite, got {v!r}")
            if not AXIS_MIN <= v <= AXIS_MAX:
                raise ValueError(f"{name} out of [0, 100]: {v!r}")

    def to_wire(self) -> tuple[float, float]:
        """Wire form: both coordinates with at most 2 fractional digits."""
        return (round(self.attitude, 2), round(self.energy, 2))


@dataclass(frozen=True, order=True)
class GridIndex:
    """Discrete cell coordinate: col on the attitude axis, row on the energy axis."""

    col: int
    row: int

    def __post_init__(self):
        for name in ("col", "row"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < GRID_SIZE:
                raise ValueError(f"{name} must be an integer in 0..7, got {v!r}")

    def to_ordinal(self) -> int:
        """Serialize as row*8 + col, 0..63."""
        return self.row * GRID_SIZE + self.col

    @classmethod
    def from_ordinal(cls, n: int) -> "GridIndex":
        if not isinstance(n, int) or isinstance(n, bool) or not 0 <= n < GRID_SIZE * GRID_SIZE:
            raise ValueError(f"ordinal must be an integer in 0..63, got {n!r}")
        return cls(col=n % GRID_SIZE, row=n // GRID_SIZE)


def all_cells() -> list[GridIndex]:
    """All 64 cells in ordinal order."""
    return [GridIndex.from_ordinal(n) for n in range(GRID_SIZE * GRID_SIZE)]


def grid_center(index: GridIndex) -> EmotionPoint:
    """Center of a cell: 100*(2i+1)/16 on each axis."""
    return EmotionPoint(
        attitude=AXIS_MIN + CELL_PITCH * (index.col + 0.5),
        energy=AXIS_MIN + CELL_PITCH * (index.row + 0.5),
    )


def _axis_index(x: float) -> int:
    # Band boundaries (multiples of 12.5) are equidistant from the two
    # neighboring centers; they resolve to the lower index.
    i = math.ceil(x / CELL_PITCH) - 1
    return min(max(i, 0), GRID_SIZE - 1)


def nearest_cell(p: EmotionPoint) -> GridIndex:
    """Cell whose center is closest (max-axis distance), ties to the lower index."""
    return GridIndex(col=_axis_index(p.attitude), row=_axis_index(p.energy))


def within_tolerance(a: EmotionPoint, b: EmotionPoint, eps: float) -> bool:
    """True iff the two points are within eps on both axes independently."""
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps!r}")
    return abs(a.attitude - b.attitude) <= eps and abs(a.energy - b.energy) <= eps


def cell_distance(a: GridIndex, b: GridIndex) -> float:
    """Max-axis distance between two cell centers, in grid units."""
    ca, cb = grid_center(a), grid_center(b)
    return max(abs(ca.attitude - cb.attitude), abs(ca.energy - cb.energy))


def clamp_point(attitude: float, energy: float) -> EmotionPoint:
    """Build a point, clamping both coordinates into [0, 100]."""
    return EmotionPoint(
        attitude=min(max(attitude, AXIS_MIN), AXIS_MAX),
        energy=min(max(energy, AXIS_MIN), AXIS_MAX),
    )
