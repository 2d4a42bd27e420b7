"""Finite hybrid time scales: ordered unions of closed intervals and isolated points.

A :class:`TimeScale` is immutable.  Points are located with a relative
membership tolerance of ``TAU_MEMBER`` so that floating-point q-powers and
interval endpoints compare robustly; every accessor snaps its argument onto
the canonical stored value before answering.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from tsmono.errors import InvalidTimeScale, PointNotInScale

TAU_MEMBER = 1e-12


def member_tol(x: float) -> float:
    return TAU_MEMBER * max(1.0, abs(x))


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    @property
    def start(self) -> float:
        return self.lo

    @property
    def end(self) -> float:
        return self.hi


@dataclass(frozen=True)
class Point:
    x: float

    @property
    def start(self) -> float:
        return self.x

    @property
    def end(self) -> float:
        return self.x


Segment = Union[Interval, Point]


@dataclass(frozen=True)
class ScaleLabel:
    """Canonical tag used for closed-form dispatch.

    ``kind`` is one of ``reals``, ``naturals``, ``integers``, ``qpowers`` or
    ``custom``.  ``truncated`` records that the scale stands in for an
    infinite canonical scale cut off at ``n_max``.
    """

    kind: str = "custom"
    q: float | None = None
    n_max: int | None = None
    start: int | None = None
    truncated: bool = False


@dataclass(frozen=True)
class PointClass:
    right_dense: bool
    left_dense: bool
    is_min: bool = False
    is_max: bool = False

    @property
    def kind(self) -> tuple[str, str]:
        return (
            "RightDense" if self.right_dense else "RightScattered",
            "LeftDense" if self.left_dense else "LeftScattered",
        )


@dataclass(frozen=True, eq=False)
class TimeScale:
    segments: tuple[Segment, ...]
    label: ScaleLabel = field(default_factory=ScaleLabel)

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise InvalidTimeScale("a time scale needs at least one segment")
        for seg in segs:
            if isinstance(seg, Interval):
                if not (math.isfinite(seg.lo) and math.isfinite(seg.hi)):
                    raise InvalidTimeScale(f"non-finite interval {seg}")
                if not seg.hi - seg.lo > member_tol(seg.hi):
                    raise InvalidTimeScale(
                        f"degenerate interval [{seg.lo}, {seg.hi}]; use a Point instead"
                    )
            elif isinstance(seg, Point):
                if not math.isfinite(seg.x):
                    raise InvalidTimeScale(f"non-finite point {seg}")
            else:
                raise InvalidTimeScale(f"unknown segment {seg!r}")
        for left, right in zip(segs, segs[1:]):
            if not right.start - left.end > member_tol(right.start):
                raise InvalidTimeScale(
                    f"segments {left} and {right} overlap or are not strictly ordered"
                )
        if self.label.kind == "qpowers" and not (self.label.q and self.label.q > 1):
            raise InvalidTimeScale("QPowers requires q > 1")
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "_starts", [s.start for s in segs])
        object.__setattr__(self, "_ends", [s.end for s in segs])

    # -- constructors -------------------------------------------------------

    @classmethod
    def reals(cls, a: float, b: float) -> "TimeScale":
        return cls((Interval(float(a), float(b)),), ScaleLabel("reals"))

    @classmethod
    def naturals(cls, n_max: int, start: int = 0) -> "TimeScale":
        if n_max < start:
            raise InvalidTimeScale("n_max must be >= start")
        pts = tuple(Point(float(k)) for k in range(start, n_max + 1))
        return cls(pts, ScaleLabel("naturals", n_max=n_max, start=start, truncated=True))

    @classmethod
    def integers(cls, lo: int, hi: int) -> "TimeScale":
        if hi < lo:
            raise InvalidTimeScale("hi must be >= lo")
        pts = tuple(Point(float(k)) for k in range(lo, hi + 1))
        return cls(pts, ScaleLabel("integers", n_max=hi, start=lo, truncated=True))

    @classmethod
    def qpowers(cls, q: float, n_max: int, start: int = 0) -> "TimeScale":
        if not q > 1:
            raise InvalidTimeScale("QPowers requires q > 1")
        if n_max < start:
            raise InvalidTimeScale("n_max must be >= start")
        pts = tuple(Point(float(q) ** k) for k in range(start, n_max + 1))
        return cls(
            pts, ScaleLabel("qpowers", q=float(q), n_max=n_max, start=start, truncated=True)
        )

    @classmethod
    def from_points(cls, points: Iterable[float]) -> "TimeScale":
        return cls(tuple(Point(float(x)) for x in sorted(points)))

    # -- basic accessors ----------------------------------------------------

    @property
    def min(self) -> float:
        return self._starts[0]

    @property
    def max(self) -> float:
        return self._ends[-1]

    @property
    def is_discrete(self) -> bool:
        return all(isinstance(s, Point) for s in self.segments)

    @property
    def is_continuous(self) -> bool:
        return len(self.segments) == 1 and isinstance(self.segments[0], Interval)

    def __repr__(self) -> str:
        if self.label.kind == "reals":
            return f"Reals({self.min}, {self.max})"
        if self.label.kind in ("naturals", "integers"):
            return f"{self.label.kind.capitalize()}({self.label.start}..{self.label.n_max})"
        if self.label.kind == "qpowers":
            return f"QPowers(q={self.label.q}, n_max={self.label.n_max})"
        parts = []
        for s in self.segments:
            parts.append(f"[{s.lo}, {s.hi}]" if isinstance(s, Interval) else f"{{{s.x}}}")
        return " U ".join(parts)

    def locate(self, t: float) -> tuple[int, float]:
        """Return (segment index, snapped value) for a point of the scale."""
        t = float(t)
        i = bisect_right(self._starts, t) - 1
        for k in (i, i + 1):
            if 0 <= k < len(self.segments):
                seg = self.segments[k]
                tol = member_tol(t)
                if isinstance(seg, Point):
                    if abs(t - seg.x) <= tol:
                        return k, seg.x
                elif seg.lo - tol <= t <= seg.hi + tol:
                    if abs(t - seg.lo) <= tol:
                        return k, seg.lo
                    if abs(t - seg.hi) <= tol:
                        return k, seg.hi
                    return k, t
        raise PointNotInScale(t, self)

    def contains(self, t: float) -> bool:
        try:
            self.locate(t)
        except PointNotInScale:
            return False
        return True

    __contains__ = contains

    def snap(self, t: float) -> float:
        return self.locate(t)[1]

    # -- jump operators -----------------------------------------------------

    def sigma(self, t: float) -> float:
        k, t = self.locate(t)
        seg = self.segments[k]
        if isinstance(seg, Interval) and t < seg.hi:
            return t
        if k + 1 < len(self.segments):
            return self._starts[k + 1]
        return t

    def rho(self, t: float) -> float:
        k, t = self.locate(t)
        seg = self.segments[k]
        if isinstance(seg, Interval) and t > seg.lo:
            return t
        if k > 0:
            return self._ends[k - 1]
        return t

    def mu(self, t: float) -> float:
        return self.sigma(t) - self.snap(t)

    def nu(self, t: float) -> float:
        return self.snap(t) - self.rho(t)

    def classify(self, t: float) -> PointClass:
        k, t = self.locate(t)
        is_max = t == self.max
        is_min = t == self.min
        # max is right-scattered by convention, min left-dense by convention
        right_dense = (not is_max) and self.sigma(t) == t
        left_dense = is_min or self.rho(t) == t
        return PointClass(right_dense, left_dense, is_min=is_min, is_max=is_max)

    # -- grids and sub-scales -----------------------------------------------

    def enumerate_grid(self, resolution: float) -> list[float]:
        if not resolution > 0:
            raise ValueError("resolution must be positive")
        out: list[float] = []
        for seg in self.segments:
            if isinstance(seg, Point):
                out.append(seg.x)
                continue
            width = seg.hi - seg.lo
            n = max(1, math.ceil(width / resolution - 1e-9))
            out.extend(seg.lo + width * k / n for k in range(n))
            out.append(seg.hi)
        return out

    def restrict(self, a: float, b: float) -> "TimeScale":
        """Sub-scale [a, b] ∩ T; both endpoints must belong to the scale."""
        ka, a = self.locate(a)
        kb, b = self.locate(b)
        if a > b:
            raise ValueError("restrict needs a <= b")
        if a == b:
            return TimeScale((Point(a),))
        segs: list[Segment] = []
        for k in range(ka, kb + 1):
            seg = self.segments[k]
            if isinstance(seg, Point):
                segs.append(seg)
                continue
            lo, hi = max(seg.lo, a), min(seg.hi, b)
            if hi - lo > member_tol(hi):
                segs.append(Interval(lo, hi))
            else:
                segs.append(Point(lo))
        label = self.label
        if label.kind == "reals":
            label = ScaleLabel("reals")
        elif label.kind != "custom":
            label = ScaleLabel("custom")
        return TimeScale(tuple(segs), label)

    def scattered_points(self) -> list[float]:
        return [s.x for s in self.segments if isinstance(s, Point)]

    def exact_point(self, t: float) -> Fraction:
        """Exact rational value of a scale point (q-powers computed exactly)."""
        _, t = self.locate(t)
        if self.label.kind == "qpowers":
            q = Fraction(self.label.q)
            k = round(math.log(t) / math.log(self.label.q))
            return q**k
        return Fraction(t)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        lab = self.label
        if lab.kind == "reals":
            return {"canonical": "reals", "a": self.min, "b": self.max}
        if lab.kind == "naturals":
            return {"canonical": "naturals", "n_max": lab.n_max, "start": lab.start}
        if lab.kind == "integers":
            return {"canonical": "integers", "lo": lab.start, "hi": lab.n_max}
        if lab.kind == "qpowers":
            return {"canonical": "qpowers", "q": lab.q, "n_max": lab.n_max, "start": lab.start}
        segs = []
        for s in self.segments:
            segs.append({"interval": [s.lo, s.hi]} if isinstance(s, Interval) else {"point": s.x})
        return {"segments": segs}

    @classmethod
    def from_dict(cls, spec: dict) -> "TimeScale":
        if not isinstance(spec, dict):
            raise InvalidTimeScale("time scale spec must be a mapping")
        if "canonical" in spec:
            kind = spec["canonical"]
            if kind == "reals":
                return cls.reals(spec["a"], spec["b"])
            if kind == "naturals":
                return cls.naturals(int(spec["n_max"]), int(spec.get("start", 0)))
            if kind == "integers":
                return cls.integers(int(spec["lo"]), int(spec["hi"]))
            if kind == "qpowers":
                return cls.qpowers(float(spec["q"]), int(spec["n_max"]), int(spec.get("start", 0)))
            raise InvalidTimeScale(f"unknown canonical scale {kind!r}")
        if "segments" not in spec:
            raise InvalidTimeScale("time scale spec needs 'canonical' or 'segments'")
        segs: list[Segment] = []
        for item in spec["segments"]:
            if "interval" in item:
                lo, hi = item["interval"]
                segs.append(Interval(float(lo), float(hi)))
            elif "point" in item:
                segs.append(Point(float(item["point"])))
            else:
                raise InvalidTimeScale(f"segment needs 'interval' or 'point': {item!r}")
        return cls(tuple(segs))


def sigma(T: TimeScale, t: float) -> float:
    return T.sigma(t)


def rho(T: TimeScale, t: float) -> float:
    return T.rho(t)


def classify(T: TimeScale, t: float) -> PointClass:
    return T.classify(t)


def enumerate_grid(T: TimeScale, resolution: float) -> list[float]:
    return T.enumerate_grid(resolution)


def hybrid(parts: Sequence[Union[float, tuple[float, float]]]) -> TimeScale:
    """Build a custom scale from floats (points) and pairs (intervals)."""
    segs: list[Segment] = []
    for p in parts:
        if isinstance(p, tuple):
            segs.append(Interval(float(p[0]), float(p[1])))
        else:
            segs.append(Point(float(p)))
    return TimeScale(tuple(segs))
