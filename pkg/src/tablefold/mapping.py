"""Raw-value to unit-interval visual mappings: linear, inverse, log10, clipping."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import MappingError

LINEAR = "linear"
INVERSE_LINEAR = "inverse_linear"
LOG10 = "log10"

MAPPING_KINDS = (LINEAR, INVERSE_LINEAR, LOG10)


@dataclass(frozen=True)
class OutOfRange:
    """Marker for an in-principle-visible value outside the mapping domain.

    ``clamped`` is the nearer unit bound; renderers draw it clamped with a
    visual flag instead of hiding the item.
    """

    clamped: float
    raw: float


@dataclass(frozen=True)
class MappingSpec:
    kind: str = LINEAR
    domain: tuple[float, float] = (0.0, 1.0)
    clip: bool = False

    def __post_init__(self):
        if self.kind not in MAPPING_KINDS:
            raise MappingError(f"unknown mapping kind {self.kind!r}")
        d0, d1 = self.domain
        if not d0 < d1:
            raise MappingError(f"mapping domain must satisfy min < max, got {self.domain}")
        if self.kind == LOG10 and d0 <= 0:
            raise MappingError("log10 mapping requires a positive domain minimum")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "domain": list(self.domain), "clip": self.clip}

    @staticmethod
    def from_dict(doc: dict) -> "MappingSpec":
        return MappingSpec(kind=doc.get("kind", LINEAR),
                           domain=tuple(doc["domain"]),
                           clip=bool(doc.get("clip", False)))


def spec_for_domain(domain: tuple[float, float], kind: str = LINEAR,
                    clip: bool = False) -> MappingSpec:
    """Build a spec from an observed domain, widening a degenerate one."""
    d0, d1 = float(domain[0]), float(domain[1])
    if d0 == d1:
        d0, d1 = d0 - 0.5, d1 + 0.5
    return MappingSpec(kind=kind, domain=(d0, d1), clip=clip)


def apply_mapping(spec: MappingSpec, raw: Optional[float]) -> Union[float, OutOfRange, None]:
    """Map one raw value into [0, 1].

    Missing (None/NaN) passes through as None. With clip=True results clamp
    to the nearer bound; otherwise out-of-domain values come back as an
    OutOfRange marker carrying the clamped bound.
    """
    if raw is None or (isinstance(raw, float) and math.isnan(raw)):
        return None
    d0, d1 = spec.domain
    if spec.kind == LOG10:
        if raw <= 0:
            if spec.clip:
                return 0.0
            raise MappingError(f"log10 mapping applied to non-positive value {raw}")
        t = (math.log10(raw) - math.log10(d0)) / (math.log10(d1) - math.log10(d0))
    else:
        t = (raw - d0) / (d1 - d0)
        if spec.kind == INVERSE_LINEAR:
            t = 1.0 - t
    if 0.0 <= t <= 1.0:
        return t
    clamped = min(1.0, max(0.0, t))
    if spec.clip:
        return clamped
    return OutOfRange(clamped=clamped, raw=float(raw))


def apply_mapping_array(spec: MappingSpec, raw: np.ndarray):
    """Vector form of apply_mapping over a float array with NaN as missing.

    Returns (mapped array clamped into [0,1] with NaN preserved,
    out-of-range boolean mask). With clip=True the mask is all False.
    """
    raw = np.asarray(raw, dtype=np.float64)
    d0, d1 = spec.domain
    with np.errstate(invalid="ignore", divide="ignore"):
        if spec.kind == LOG10:
            bad = raw <= 0
            if bad.any() and not spec.clip:
                raise MappingError("log10 mapping applied to non-positive values")
            safe = np.where(bad, d0, raw)
            t = (np.log10(safe) - math.log10(d0)) / (math.log10(d1) - math.log10(d0))
            t = np.where(bad & ~np.isnan(raw), 0.0, t)
        else:
            t = (raw - d0) / (d1 - d0)
            if spec.kind == INVERSE_LINEAR:
                t = 1.0 - t
        oob = (t < 0.0) | (t > 1.0)
    oob &= ~np.isnan(raw)
    clamped = np.clip(t, 0.0, 1.0)
    if spec.clip:
        return clamped, np.zeros_like(oob)
    return clamped, oob


def derive_domain(values) -> tuple[float, float]:
    """Tight [min, max] over non-missing values; all-equal input widens by 0.5."""
    arr = np.asarray([math.nan if v is None else float(v) for v in values]
                     if not isinstance(values, np.ndarray) else values, dtype=np.float64)
    present = arr[~np.isnan(arr)]
    if present.size == 0:
        raise MappingError("cannot derive a domain from all-missing values")
    lo, hi = float(present.min()), float(present.max())
    if lo == hi:
        return (lo - 0.5, hi + 0.5)
    return (lo, hi)
