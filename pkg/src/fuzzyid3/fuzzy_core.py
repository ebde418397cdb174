"""Membership functions, strong fuzzy partitions and t-norms."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

LEFT = "left"
TRIANGLE = "triangle"
RIGHT = "right"

MIN_SETS = 2
MAX_SETS = 7


class ConstantVariableError(ValueError):
    """Raised when a partition is requested over a zero-width domain."""


class TNorm(enum.Enum):
    MINIMUM = "min"
    PRODUCT = "product"

    @classmethod
    def parse(cls, text: str) -> "TNorm":
        key = text.strip().lower()
        aliases = {"min": cls.MINIMUM, "minimum": cls.MINIMUM,
                   "prod": cls.PRODUCT, "product": cls.PRODUCT}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown t-norm {text!r} (expected 'min' or 'product')") from None

    @property
    def code(self) -> int:
        # integer tag understood by the compiled kernels
        return 0 if self is TNorm.MINIMUM else 1

    @property
    def label(self) -> str:
        return "Minimum" if self is TNorm.MINIMUM else "Product"

    def __call__(self, a, b):
        return tnorm_apply(self, a, b)


def tnorm_apply(t: TNorm, a: float, b: float) -> float:
    """Conjunction of two membership degrees.

    Both arguments must lie in [0, 1]; anything else means a membership
    function upstream broke its contract.
    """
    if not (0.0 <= a <= 1.0) or not (0.0 <= b <= 1.0):
        raise ValueError(f"t-norm arguments must be in [0, 1], got ({a!r}, {b!r})")
    if t is TNorm.MINIMUM:
        return a if a <= b else b
    return a * b


def tnorm_array(t: TNorm, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise t-norm without range checks (hot path)."""
    if t is TNorm.MINIMUM:
        return np.minimum(a, b)
    return a * b


@dataclass(frozen=True)
class MembershipFunction:
    """Piecewise-linear membership function.

    ``kind`` is one of ``"left"`` (left-shoulder trapezoid, breakpoints
    ``(a, b)``: 1 up to ``a``, falling to 0 at ``b``), ``"triangle"``
    (``(a, b, c)`` with peak at ``b``) or ``"right"`` (rising from 0 at ``a``
    to 1 at ``b`` and beyond).
    """

    kind: str
    breakpoints: tuple[float, ...]

    def __post_init__(self):
        bp = tuple(float(v) for v in self.breakpoints)
        object.__setattr__(self, "breakpoints", bp)
        expected = 3 if self.kind == TRIANGLE else 2
        if self.kind not in (LEFT, TRIANGLE, RIGHT):
            raise ValueError(f"unknown membership function kind {self.kind!r}")
        if len(bp) != expected:
            raise ValueError(f"{self.kind} membership function needs {expected} breakpoints, got {len(bp)}")
        if not all(np.isfinite(bp)):
            raise ValueError("breakpoints must be finite")
        if any(b <= a for a, b in zip(bp, bp[1:])):
            raise ValueError(f"breakpoints must be strictly increasing, got {bp}")

    @property
    def peak(self) -> float:
        """Point where the degree first reaches 1 (shoulders: saturation breakpoint)."""
        if self.kind == LEFT:
            return self.breakpoints[0]
        if self.kind == RIGHT:
            return self.breakpoints[1]
        return self.breakpoints[1]

    def __call__(self, x):
        return membership(self, x)


def membership(mf: MembershipFunction, x):
    """Degree of ``x`` in ``mf``; works on scalars and numpy arrays."""
    bp = mf.breakpoints
    if mf.kind == LEFT:
        a, b = bp
        y = (b - x) / (b - a)
    elif mf.kind == RIGHT:
        a, b = bp
        y = (x - a) / (b - a)
    else:
        a, b, c = bp
        y = np.minimum((x - a) / (b - a), (c - x) / (c - b))
    y = np.clip(y, 0.0, 1.0)
    if np.ndim(y) == 0:
        return float(y)
    return y


@dataclass(frozen=True)
class FuzzyPartition:
    variable_name: str
    sets: tuple[MembershipFunction, ...]
    domain: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(self.sets))
        object.__setattr__(self, "domain", (float(self.domain[0]), float(self.domain[1])))
        m = len(self.sets)
        if not MIN_SETS <= m <= MAX_SETS:
            raise ValueError(f"partition of {self.variable_name!r} has {m} sets, allowed {MIN_SETS}..{MAX_SETS}")
        kinds = [mf.kind for mf in self.sets]
        if kinds[0] != LEFT or kinds[-1] != RIGHT or any(k != TRIANGLE for k in kinds[1:-1]):
            raise ValueError("partition must be left-shoulder, triangles..., right-shoulder")
        peaks = self.peaks
        if any(q <= p for p, q in zip(peaks, peaks[1:])):
            raise ValueError("partition peaks must be strictly increasing")

    def __len__(self) -> int:
        return len(self.sets)

    @property
    def peaks(self) -> tuple[float, ...]:
        return tuple(mf.peak for mf in self.sets)

    @property
    def representatives(self) -> tuple[float, ...]:
        return self.peaks

    def degrees(self, x: float) -> np.ndarray:
        """Membership of a scalar in every set, shape (M,)."""
        return np.array([membership(mf, x) for mf in self.sets])

    def matrix(self, values) -> np.ndarray:
        """Membership of each value in every set, shape (n, M)."""
        v = np.asarray(values, dtype=float)
        out = np.empty((v.shape[0], len(self.sets)))
        for l, mf in enumerate(self.sets):
            out[:, l] = membership(mf, v)
        return out

    def crisp_index(self, x: float) -> int:
        """Index of the maximum-membership set, ties going to the lower index."""
        return int(np.argmax(self.degrees(x)))

    def crisp_matrix(self, values) -> np.ndarray:
        """0/1 indicator of each value's maximum-membership set."""
        deg = self.matrix(values)
        out = np.zeros_like(deg)
        out[np.arange(deg.shape[0]), np.argmax(deg, axis=1)] = 1.0
        return out

    def to_dict(self) -> dict:
        return {
            "variable": self.variable_name,
            "domain": list(self.domain),
            "sets": [{"kind": mf.kind, "breakpoints": list(mf.breakpoints)} for mf in self.sets],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FuzzyPartition":
        return cls(
            variable_name=d["variable"],
            sets=tuple(MembershipFunction(s["kind"], tuple(s["breakpoints"])) for s in d["sets"]),
            domain=tuple(d["domain"]),
        )


def build_uniform_partition(domain_min: float, domain_max: float, num_sets: int,
                            variable_name: str = "x") -> FuzzyPartition:
    """Strong partition with equally spaced peaks over ``[domain_min, domain_max]``.

    Each triangle's feet sit on the neighbouring peaks, so degrees sum to one
    everywhere in the domain.
    """
    lo, hi = float(domain_min), float(domain_max)
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise ValueError("partition domain must be finite")
    if hi == lo:
        raise ConstantVariableError(f"constant variable {variable_name!r}: domain [{lo}, {hi}] has zero width")
    if hi < lo:
        raise ValueError(f"domain_max ({hi}) must exceed domain_min ({lo})")
    if not MIN_SETS <= num_sets <= MAX_SETS:
        raise ValueError(f"num_sets must be in {MIN_SETS}..{MAX_SETS}, got {num_sets}")
    step = (hi - lo) / (num_sets - 1)
    peaks = [lo + i * step for i in range(num_sets)]
    peaks[-1] = hi
    sets = [MembershipFunction(LEFT, (peaks[0], peaks[1]))]
    for i in range(1, num_sets - 1):
        sets.append(MembershipFunction(TRIANGLE, (peaks[i - 1], peaks[i], peaks[i + 1])))
    sets.append(MembershipFunction(RIGHT, (peaks[-2], peaks[-1])))
    return FuzzyPartition(variable_name, tuple(sets), (lo, hi))


class ConstantTargetError(ValueError):
    pass


def fuzzify_output(efforts, num_classes: int, name: str = "effort") -> FuzzyPartition:
    """Uniform strong partition of the effort range into ``num_classes`` classes."""
    e = np.asarray(efforts, dtype=float)
    if e.size < 2 or np.unique(e).size < 2:
        raise ConstantTargetError("constant target: need at least two distinct effort values")
    return build_uniform_partition(float(e.min()), float(e.max()), num_classes, name)
