"""Core domain types for stiffness-based kinematic assessment.

Conventions used throughout the package:

* units are N, mm, MPa and rad;
* every matrix and vector lives on the *free* degrees of freedom of a
  :class:`DofMap`, in entry order;
* displacement and force vectors are plain 1-D numpy arrays (no wrapper
  class), with lengths validated by the functions that consume them.

Mixed translation/rotation vectors are made dimensionally homogeneous by a
diagonal :class:`DofMetric`: translational entries carry weight 1 and
rotational entries the square of a characteristic length, so that every
inner product in the package is unit-consistent.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgumentError

#: Relative gap below which two adjacent eigenvalues count as coincident.
DEGENERACY_RTOL = 1e-8


class Direction(enum.Enum):
    """Direction of a scalar nodal degree of freedom."""

    TX = 0
    TY = 1
    TZ = 2
    RX = 3
    RY = 4
    RZ = 5

    @property
    def is_translation(self) -> bool:
        return self.value < 3


#: Canonical per-node ordering of directions.
DIRECTIONS = tuple(Direction)
TRANSLATIONS = (Direction.TX, Direction.TY, Direction.TZ)
ROTATIONS = (Direction.RX, Direction.RY, Direction.RZ)


@dataclass(frozen=True)
class DofEntry:
    """One scalar degree of freedom: node id plus direction."""

    node: int
    direction: Direction

    @property
    def is_translation(self) -> bool:
        return self.direction.is_translation


@dataclass(frozen=True)
class DofMap:
    """Canonical ordering of all scalar DOFs of a model.

    ``entries`` fixes the ordering used by every vector and matrix in the
    system.  ``constrained`` marks entries that are not independent unknowns
    (clamped to zero or eliminated through a rigid dependency); the remaining
    *free* entries, in order, index the rows of assembled matrices.
    """

    entries: tuple[DofEntry, ...]
    constrained: frozenset[int] = frozenset()

    def __post_init__(self):
        entries = tuple(self.entries)
        constrained = frozenset(int(i) for i in self.constrained)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "constrained", constrained)
        if not entries:
            raise InvalidArgumentError("dof map must contain at least one entry")
        if len(set(entries)) != len(entries):
            raise InvalidArgumentError("dof map contains duplicate entries")
        for i in constrained:
            if not 0 <= i < len(entries):
                raise InvalidArgumentError(
                    f"constrained index {i} outside entry range 0..{len(entries) - 1}"
                )
        if len(entries) - len(constrained) <= 0:
            raise InvalidArgumentError("dof map has no free degrees of freedom")

    @property
    def n_total(self) -> int:
        return len(self.entries)

    @property
    def n_free(self) -> int:
        return len(self.entries) - len(self.constrained)

    @cached_property
    def free_indices(self) -> tuple[int, ...]:
        """Positions (into ``entries``) of the free DOFs, in entry order."""
        return tuple(i for i in range(len(self.entries)) if i not in self.constrained)

    @cached_property
    def free_entries(self) -> tuple[DofEntry, ...]:
        return tuple(self.entries[i] for i in self.free_indices)

    @cached_property
    def _free_lookup(self) -> dict[tuple[int, Direction], int]:
        return {
            (e.node, e.direction): k for k, e in enumerate(self.free_entries)
        }

    def free_index(self, node: int, direction: Direction) -> int | None:
        """Position of (node, direction) in the free ordering, or None."""
        return self._free_lookup.get((node, direction))

    def node_components(
        self, node: int, directions: Sequence[Direction] = TRANSLATIONS
    ) -> list[tuple[Direction, int]]:
        """Free (direction, index) pairs available for ``node``."""
        out = []
        for d in directions:
            k = self.free_index(node, d)
            if k is not None:
                out.append((d, k))
        return out

    @property
    def nodes(self) -> tuple[int, ...]:
        seen: dict[int, None] = {}
        for e in self.entries:
            seen.setdefault(e.node, None)
        return tuple(seen)


class StiffnessMatrix:
    """Dense symmetric stiffness matrix on the free DOFs.

    The constructor rejects matrices whose asymmetry exceeds 1e-12 relative
    to the largest entry and symmetrizes the rest.  Positive definiteness is
    established later, when an eigensolve or assembly checks the spectrum.
    """

    def __init__(self, values):
        a = np.array(values, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidArgumentError(f"stiffness matrix must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidArgumentError("stiffness matrix contains non-finite values")
        amax = float(np.abs(a).max()) if a.size else 0.0
        if amax > 0.0:
            skew = float(np.abs(a - a.T).max())
            if skew > 1e-12 * amax:
                raise InvalidArgumentError(
                    f"matrix is not symmetric: max |k - k^T| = {skew:g} "
                    f"exceeds 1e-12 of max entry {amax:g}"
                )
        self.values = 0.5 * (a + a.T)
        self.values.setflags(write=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __repr__(self) -> str:
        return f"StiffnessMatrix(n={self.n})"


class DofMetric:
    """Diagonal weighting that homogenizes mixed translation/rotation vectors.

    Translational weights are 1 (dimensionless) and rotational weights are a
    characteristic length squared (mm^2), so that ``u^T W u`` is mm^2 for any
    displacement vector.
    """

    def __init__(self, diag, characteristic_length: float | None = None):
        d = np.array(diag, dtype=float)
        if d.ndim != 1:
            raise InvalidArgumentError("metric diagonal must be one-dimensional")
        if not np.all(np.isfinite(d)) or np.any(d <= 0.0):
            raise InvalidArgumentError("metric weights must be finite and strictly positive")
        self.diag = d
        self.diag.setflags(write=False)
        self.characteristic_length = (
            float(characteristic_length) if characteristic_length is not None else None
        )

    @property
    def n(self) -> int:
        return self.diag.shape[0]

    def inner(self, u, v) -> float:
        u = _as_vector(u, self.n, "u")
        v = _as_vector(v, self.n, "v")
        return float((u * self.diag) @ v)

    def norm(self, u) -> float:
        return float(np.sqrt(self.inner(u, u)))

    def normalized(self, u) -> np.ndarray:
        nrm = self.norm(u)
        if nrm == 0.0:
            raise InvalidArgumentError("cannot normalize a zero vector")
        return np.asarray(u, dtype=float) / nrm

    def __repr__(self) -> str:
        return f"DofMetric(n={self.n}, characteristic_length={self.characteristic_length})"


def _as_vector(u, n: int, name: str) -> np.ndarray:
    v = np.asarray(u, dtype=float)
    if v.ndim != 1 or v.shape[0] != n:
        raise InvalidArgumentError(
            f"{name} must be a vector of length {n}, got shape {v.shape}"
        )
    return v


def build_metric(dof_map: DofMap, characteristic_length: float) -> DofMetric:
    """Metric over the free DOFs of ``dof_map``.

    Translational entries get weight 1, rotational entries
    ``characteristic_length**2``.  A purely translational map therefore
    yields the identity metric regardless of the length.
    """
    lc = float(characteristic_length)
    if not np.isfinite(lc) or lc <= 0.0:
        raise InvalidArgumentError(f"characteristic length must be positive, got {lc}")
    diag = np.array(
        [1.0 if e.is_translation else lc * lc for e in dof_map.free_entries]
    )
    return DofMetric(diag, characteristic_length=lc)


def strain_energy(k: StiffnessMatrix, u) -> float:
    """Elastic energy  0.5 * u^T k u  stored by displacement ``u`` (N mm)."""
    v = _as_vector(u, k.n, "displacement")
    return float(0.5 * v @ k.values @ v)


@dataclass(frozen=True)
class ModalBasis:
    """Full spectrum of a stiffness matrix under a diagonal metric.

    ``eigenvalues`` are ascending and strictly positive; ``eigenvectors``
    holds the corresponding columns, orthonormal in the metric
    (``phi_i^T W phi_j = delta_ij``).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    metric: DofMetric

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", np.asarray(self.eigenvalues, dtype=float))
        object.__setattr__(self, "eigenvectors", np.asarray(self.eigenvectors, dtype=float))
        self.eigenvalues.setflags(write=False)
        self.eigenvectors.setflags(write=False)

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def coincident(self, p: int) -> bool:
        """Whether eigenvalues p and p+1 (1-based) form a degenerate pair."""
        if not 1 <= p < self.n:
            raise InvalidArgumentError(f"mode index p={p} outside 1..{self.n - 1}")
        lo, hi = self.eigenvalues[p - 1], self.eigenvalues[p]
        return bool(abs(hi - lo) <= DEGENERACY_RTOL * abs(hi))

    def degenerate_pairs(self) -> tuple[tuple[int, int], ...]:
        """All coincident adjacent pairs, 1-based, e.g. ((1, 2), (4, 5))."""
        return tuple((p, p + 1) for p in range(1, self.n) if self.coincident(p))


def orthonormalize(vectors, metric: DofMetric) -> np.ndarray:
    """Metric Gram-Schmidt of the columns of ``vectors`` (kept in order)."""
    v = np.array(vectors, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    if v.shape[0] != metric.n:
        raise InvalidArgumentError(
            f"vectors have {v.shape[0]} rows but the metric has {metric.n} weights"
        )
    out = np.empty_like(v)
    for j in range(v.shape[1]):
        w = v[:, j].copy()
        for _ in range(2):  # re-orthogonalize once for numerical safety
            for i in range(j):
                w -= metric.inner(out[:, i], w) * out[:, i]
        nrm = metric.norm(w)
        if nrm <= 1e-12 * max(1.0, metric.norm(v[:, j])):
            raise InvalidArgumentError(
                f"vector {j + 1} is linearly dependent on the preceding ones"
            )
        out[:, j] = w / nrm
    return out


class ReferenceKinematics:
    """A set of p metric-orthonormal displacement vectors defining the
    desired kinematics of the mechanism."""

    #: Maximum allowed deviation of the metric Gram matrix from identity.
    ORTHO_TOL = 1e-10

    def __init__(
        self,
        vectors,
        metric: DofMetric,
        description: str = "",
        orthonormalize_input: bool = False,
    ):
        v = np.array(vectors, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] != metric.n:
            raise InvalidArgumentError(
                f"reference vectors must have {metric.n} rows, got shape {v.shape}"
            )
        if orthonormalize_input:
            v = orthonormalize(v, metric)
        gram = v.T @ (metric.diag[:, None] * v)
        dev = float(np.abs(gram - np.eye(v.shape[1])).max())
        if dev > self.ORTHO_TOL:
            raise InvalidArgumentError(
                f"reference vectors are not metric-orthonormal "
                f"(max Gram deviation {dev:g} > {self.ORTHO_TOL:g})"
            )
        self.vectors = v
        self.vectors.setflags(write=False)
        self.metric = metric
        self.description = description
        #: Optional full nodal fields (one dict node -> 6-vector per column),
        #: attached by the model layer for path-level post-processing.
        self.nodal_fields: list[dict[int, np.ndarray]] | None = None

    @property
    def p(self) -> int:
        return self.vectors.shape[1]

    def __repr__(self) -> str:
        return f"ReferenceKinematics(p={self.p}, description={self.description!r})"
