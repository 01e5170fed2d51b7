"""Parametric study: web-thickness sweep of the circular notch hinge."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..eig import eig_sym
from ..errors import DegenerateModesWarning, FlexkinError, InvalidArgumentError
from ..metrics import selectivity
from .meshers import NotchHingeParams, mesh_notch_hinge
from .model import analysis_system


@dataclass(frozen=True)
class SweepRow:
    """One swept geometry: thickness, first two eigenvalues, selectivity.

    ``error`` carries the failure message when the geometry could not be
    analyzed; the numeric fields are then NaN.
    """

    web_thickness: float
    lambda1: float
    lambda2: float
    selectivity: float
    error: str | None = None


@dataclass(frozen=True)
class SweepTable:
    rows: tuple[SweepRow, ...]

    def __len__(self) -> int:
        return len(self.rows)


def sweep_thickness(params: NotchHingeParams, values: Sequence[float]) -> SweepTable:
    """Analyze one notch-hinge geometry per thickness value.

    ``values`` must be ascending.  Rows keep the input order; a failing
    geometry is reported in its row and the sweep continues.
    """
    vals = [float(v) for v in values]
    if not vals:
        raise InvalidArgumentError("sweep needs at least one thickness value")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise InvalidArgumentError("thickness values must be strictly ascending")

    rows = []
    for v in vals:
        try:
            geo = params.with_web_thickness(v)
            system = analysis_system(mesh_notch_hinge(geo))
            basis = eig_sym(system.k, system.metric)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DegenerateModesWarning)
                s = selectivity(basis, 1)
            rows.append(
                SweepRow(
                    web_thickness=v,
                    lambda1=float(basis.eigenvalues[0]),
                    lambda2=float(basis.eigenvalues[1]),
                    selectivity=s,
                )
            )
        except FlexkinError as exc:
            rows.append(
                SweepRow(
                    web_thickness=v,
                    lambda1=float("nan"),
                    lambda2=float("nan"),
                    selectivity=float("nan"),
                    error=str(exc),
                )
            )
    return SweepTable(rows=tuple(rows))
