"""Result containers shared across the solvers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import JastrowParams

METHODS = ("jastrow-analytic", "jastrow-variational", "bethe", "ed-oracle")
PAIR_KINDS = ("majority-majority", "impurity-majority")
FRAMES = ("cartesian-pair", "jacobi", "three-body-slice")


@dataclass(frozen=True)
class EnergyReport:
    """Total energy with an optional kinetic/interaction split.

    ``error`` is the self-reported relative error of a numerical
    evaluation (zero for closed forms).
    """

    total: float
    method: str
    kinetic: Optional[float] = None
    interaction: Optional[float] = None
    error: float = 0.0

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
        if (self.kinetic is None) != (self.interaction is None):
            raise ValueError("kinetic and interaction must both be given or both omitted")

    @property
    def has_breakdown(self) -> bool:
        return self.kinetic is not None


@dataclass(frozen=True)
class CorrelationCurve:
    r_grid: np.ndarray
    values: np.ndarray
    kind: str
    params: Optional[JastrowParams] = None
    error: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in PAIR_KINDS:
            raise ValueError(f"unknown pair kind {self.kind!r}")


@dataclass(frozen=True)
class DensityGrid:
    """Density sampled on the outer product ``axis1 x axis2``.

    ``values[i, j]`` belongs to ``(axis1[i], axis2[j])``.
    """

    axis1: np.ndarray
    axis2: np.ndarray
    values: np.ndarray
    frame: str
    axis_names: tuple = ("x1", "x2")
    params: Optional[JastrowParams] = None
    error: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.frame not in FRAMES:
            raise ValueError(f"unknown frame {self.frame!r}")
        if self.values.shape != (len(self.axis1), len(self.axis2)):
            raise ValueError("values shape does not match the axes")
