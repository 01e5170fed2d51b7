"""Assessment quantities: selectivity, accuracy indices, modal response,
and the derived planar measures (rigid-motion fit, path deviation).

Selectivity is the dimensionless eigenvalue ratio lambda_{p+1}/lambda_p and
measures how robust the first p modes are against arbitrary loading
(precision).  Accuracy compares the natural kinematics with a reference
motion through the metric cosine, or through the extended subspace cosine
for pseudo-mobility above one.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.linalg

from .core import (
    DofMap,
    DofMetric,
    ModalBasis,
    ReferenceKinematics,
    StiffnessMatrix,
    TRANSLATIONS,
    _as_vector,
)
from .eig import eig_sym
from .errors import (
    DegenerateModesError,
    DegenerateModesWarning,
    InvalidArgumentError,
    ModelSingularError,
)

#: Orthonormality tolerance for inputs of the extended accuracy index.
SUBSPACE_ORTHO_TOL = 1e-8

#: Below this fitted angle (rad) a planar rigid fit counts as translation.
TRANSLATION_ANGLE_THRESHOLD = 1e-12


def selectivity(basis: ModalBasis, p: int) -> float:
    """Eigenvalue ratio lambda_{p+1} / lambda_p for pseudo-mobility p.

    Emits :class:`DegenerateModesWarning` when the two eigenvalues coincide
    within the degeneracy tolerance (the ratio is then 1 and the individual
    eigenvectors are not well defined).
    """
    if not 1 <= p < basis.n:
        raise InvalidArgumentError(
            f"pseudo-mobility p={p} must satisfy 1 <= p < n={basis.n}"
        )
    if basis.coincident(p):
        warnings.warn(
            f"eigenvalues {p} and {p + 1} coincide; selectivity is 1 and the "
            "mode split at p is arbitrary",
            DegenerateModesWarning,
            stacklevel=2,
        )
    return float(basis.eigenvalues[p] / basis.eigenvalues[p - 1])


def accuracy_index(phi1, phi_r, metric: DofMetric) -> float:
    """Absolute metric cosine between two displacement fields, in [0, 1].

    1 means the fields are parallel (perfect accuracy), 0 means they are
    W-orthogonal.  Both inputs are normalized internally, so any nonzero
    scaling of either argument is irrelevant.
    """
    a = metric.normalized(_as_vector(phi1, metric.n, "phi1"))
    b = metric.normalized(_as_vector(phi_r, metric.n, "phi_r"))
    return float(min(abs(metric.inner(a, b)), 1.0))


def extended_accuracy_index(
    phi_e, phi_r, metric: DofMetric
) -> float:
    """Subspace similarity of two p-dimensional mode sets, in [0, 1].

    Forms the cross-Gram matrix M = (Phi_e^T W Phi_r)^T (Phi_e^T W Phi_r)
    and returns the square root of its smallest eigenvalue, i.e. the cosine
    of the largest principal angle between the two subspaces.  Both inputs
    must already be metric-orthonormal.
    """
    e = _as_basis(phi_e, metric, "phi_e")
    r = _as_basis(phi_r, metric, "phi_r")
    if e.shape[1] != r.shape[1]:
        raise InvalidArgumentError(
            f"column counts differ: phi_e has {e.shape[1]}, phi_r has {r.shape[1]}"
        )
    g = e.T @ (metric.diag[:, None] * r)
    m = g.T @ g
    beta = scipy.linalg.eigh(m, driver="ev", eigvals_only=True)
    beta1 = float(np.clip(beta[0], 0.0, 1.0))
    return float(np.sqrt(beta1))


def _as_basis(v, metric: DofMetric, name: str) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2 or a.shape[0] != metric.n:
        raise InvalidArgumentError(
            f"{name} must be an array with {metric.n} rows, got shape {a.shape}"
        )
    gram = a.T @ (metric.diag[:, None] * a)
    dev = float(np.abs(gram - np.eye(a.shape[1])).max())
    if dev > SUBSPACE_ORTHO_TOL:
        raise InvalidArgumentError(
            f"{name} columns are not metric-orthonormal "
            f"(max Gram deviation {dev:g} > {SUBSPACE_ORTHO_TOL:g})"
        )
    return a


def modal_forces(basis: ModalBasis, f) -> np.ndarray:
    """Projections q_i = phi_i^T f of a load onto every mode."""
    v = _as_vector(f, basis.n, "force")
    return basis.eigenvectors.T @ v


def modal_response(basis: ModalBasis, f) -> np.ndarray:
    """Static response assembled mode by mode: u = sum_i (q_i / lambda_i) phi_i.

    Equals the direct solution of  k u = f  because the modes diagonalize
    the stiffness.
    """
    if np.any(basis.eigenvalues <= 0.0):
        idx = int(np.argmax(basis.eigenvalues <= 0.0)) + 1
        raise ModelSingularError(
            f"mode {idx} has non-positive eigenvalue; static response undefined",
            mode_index=idx,
        )
    q = modal_forces(basis, f)
    return basis.eigenvectors @ (q / basis.eigenvalues)


def dominance_share(basis: ModalBasis, f, p: int) -> float:
    """Fraction of the response carried by the first p modes, in [0, 1].

    Computed from modal amplitudes: (sum_{i<=p} a_i^2) / (sum_i a_i^2),
    which is the squared W-norm share because the modes are W-orthonormal.
    """
    if not 1 <= p <= basis.n:
        raise InvalidArgumentError(f"p={p} must satisfy 1 <= p <= n={basis.n}")
    if np.any(basis.eigenvalues <= 0.0):
        raise ModelSingularError("basis contains a non-positive eigenvalue")
    a = modal_forces(basis, f) / basis.eigenvalues
    total = float(a @ a)
    if total == 0.0:
        raise InvalidArgumentError("load produces zero response; share undefined")
    return float(a[:p] @ a[:p] / total)


@dataclass(frozen=True)
class RigidMotionFit:
    """Least-squares planar rigid motion fitted to nodal translations."""

    angle: float
    center: tuple[float, float] | None
    residual: float
    translation_dominated: bool


def fit_rigid_motion(
    u,
    moving_nodes: Iterable[int],
    dof_map: DofMap,
    coordinates: Mapping[int, Sequence[float]],
) -> RigidMotionFit:
    """Fit a linearized planar rigid motion to the moving-link translations.

    The model is  ux = cx - angle*y,  uy = cy + angle*x  and the center of
    rotation follows from (cx, cy, angle).  Requires at least three moving
    nodes with free TX and TY entries, not all collinear.  When the fitted
    angle falls below :data:`TRANSLATION_ANGLE_THRESHOLD` the motion is
    reported as translation dominated and the center (at infinity) is None.
    """
    vec = _as_vector(u, dof_map.n_free, "displacement")
    pts, vals = [], []
    for node in moving_nodes:
        ix = dof_map.free_index(node, TRANSLATIONS[0])
        iy = dof_map.free_index(node, TRANSLATIONS[1])
        if ix is None or iy is None:
            continue
        if node not in coordinates:
            raise InvalidArgumentError(f"no coordinates supplied for node {node}")
        xy = np.asarray(coordinates[node], dtype=float)[:2]
        pts.append(xy)
        vals.append((vec[ix], vec[iy]))
    if len(pts) < 3:
        raise InvalidArgumentError(
            f"rigid-motion fit needs at least 3 nodes with free TX/TY, got {len(pts)}"
        )
    pts_arr = np.asarray(pts)
    vals_arr = np.asarray(vals)

    centered = pts_arr - pts_arr.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    if sv[1] <= 1e-9 * max(sv[0], 1.0):
        raise InvalidArgumentError("moving nodes are collinear; center is not identifiable")

    n = len(pts)
    a = np.zeros((2 * n, 3))
    b = np.zeros(2 * n)
    a[0::2, 0] = 1.0
    a[0::2, 2] = -pts_arr[:, 1]
    b[0::2] = vals_arr[:, 0]
    a[1::2, 1] = 1.0
    a[1::2, 2] = pts_arr[:, 0]
    b[1::2] = vals_arr[:, 1]
    (cx, cy, angle), *_ = np.linalg.lstsq(a, b, rcond=None)

    misfit = a @ np.array([cx, cy, angle]) - b
    per_node = np.sqrt(misfit[0::2] ** 2 + misfit[1::2] ** 2)
    residual = float(np.sqrt(np.mean(per_node**2)))

    if abs(angle) <= TRANSLATION_ANGLE_THRESHOLD:
        return RigidMotionFit(
            angle=float(angle), center=None, residual=residual, translation_dominated=True
        )
    center = (float(-cy / angle), float(cx / angle))
    return RigidMotionFit(
        angle=float(angle), center=center, residual=residual, translation_dominated=False
    )


@dataclass(frozen=True)
class PathDeviationResult:
    """Per-node distance between two displacement fields plus the RMS."""

    per_node: tuple[tuple[int, float], ...]
    rms: float


def path_deviation(
    phi_nat,
    phi_ref,
    moving_nodes: Iterable[int],
    dof_map: DofMap,
    metric: DofMetric,
) -> PathDeviationResult:
    """Distance between natural and reference motion at each moving node.

    Both fields are scaled to unit metric norm and the natural field is
    sign-aligned with the reference (paths carry no orientation), then the
    Euclidean distance of the nodal translations is reported per node
    together with the RMS over nodes.
    """
    nodes = list(moving_nodes)
    if not nodes:
        raise InvalidArgumentError("moving node set is empty")
    a = metric.normalized(_as_vector(phi_nat, dof_map.n_free, "phi_nat"))
    b = metric.normalized(_as_vector(phi_ref, dof_map.n_free, "phi_ref"))
    if metric.inner(a, b) < 0.0:
        a = -a

    rows: list[tuple[int, float]] = []
    for node in nodes:
        comps = dof_map.node_components(node, TRANSLATIONS)
        if not comps:
            continue
        idx = [k for _, k in comps]
        rows.append((node, float(np.linalg.norm(a[idx] - b[idx]))))
    if not rows:
        raise InvalidArgumentError("no moving node has free translational DOFs")
    rms = float(np.sqrt(np.mean([d * d for _, d in rows])))
    return PathDeviationResult(per_node=tuple(rows), rms=rms)


@dataclass(frozen=True)
class AssessmentReport:
    """Summary of one assessment run, ready for serialization."""

    eigenvalues: tuple[float, ...]
    selectivity: float
    pseudo_mobility: int
    accuracy: float | None = None
    accuracy_kind: str | None = None
    degenerate_pairs: tuple[tuple[int, int], ...] = ()
    dominance: float | None = None
    characteristic_length: float | None = None

    def to_dict(self) -> dict:
        return {
            "eigenvalues": list(self.eigenvalues),
            "selectivity": self.selectivity,
            "pseudo_mobility": self.pseudo_mobility,
            "accuracy": self.accuracy,
            "accuracy_kind": self.accuracy_kind,
            "degenerate_pairs": [list(p) for p in self.degenerate_pairs],
            "dominance": self.dominance,
            "characteristic_length": self.characteristic_length,
        }


def assess(
    k: StiffnessMatrix,
    metric: DofMetric,
    p: int = 1,
    reference: ReferenceKinematics | None = None,
    load=None,
    n_eigenvalues: int = 10,
) -> AssessmentReport:
    """Run the full eigenvalue assessment of a stiffness matrix.

    Returns the leading eigenvalues, the selectivity at pseudo-mobility
    ``p``, the accuracy against ``reference`` (cosine for p = 1, extended
    cosine otherwise) and, when a load is supplied, the share of the
    response carried by the first p modes.

    Raises :class:`DegenerateModesError` when a reference is supplied but
    eigenvalues p and p+1 coincide: the first-p mode subspace is then
    arbitrary, and the extended index over the whole degenerate cluster
    should be used instead.
    """
    basis = eig_sym(k, metric)
    if not 1 <= p < basis.n:
        raise InvalidArgumentError(
            f"pseudo-mobility p={p} must satisfy 1 <= p < n={basis.n}"
        )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateModesWarning)
        s = selectivity(basis, p)
    pairs = basis.degenerate_pairs()

    accuracy = None
    kind = None
    if reference is not None:
        if reference.p != p:
            raise InvalidArgumentError(
                f"reference supplies {reference.p} vectors but p={p}"
            )
        if basis.coincident(p):
            raise DegenerateModesError(
                f"eigenvalues {p} and {p + 1} coincide; the first-{p} mode "
                "subspace is arbitrary. Compare against the full degenerate "
                "cluster with extended_accuracy_index instead.",
                pair=(p, p + 1),
            )
        if p == 1:
            accuracy = accuracy_index(basis.eigenvectors[:, 0], reference.vectors[:, 0], metric)
            kind = "cosine"
        else:
            accuracy = extended_accuracy_index(
                basis.eigenvectors[:, :p], reference.vectors, metric
            )
            kind = "extended"

    dominance = None
    if load is not None:
        dominance = dominance_share(basis, load, p)

    m = min(int(n_eigenvalues), basis.n)
    if m < 1:
        raise InvalidArgumentError(f"n_eigenvalues must be >= 1, got {n_eigenvalues}")
    return AssessmentReport(
        eigenvalues=tuple(float(x) for x in basis.eigenvalues[:m]),
        selectivity=s,
        pseudo_mobility=int(p),
        accuracy=accuracy,
        accuracy_kind=kind,
        degenerate_pairs=pairs,
        dominance=dominance,
        characteristic_length=metric.characteristic_length,
    )
