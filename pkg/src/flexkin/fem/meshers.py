"""Parametric built-in models: circular notch hinge and compliant
parallel guide.

Both meshes lie in the global XY plane with beam axes along x (hinge) or y
(guide).  The moving link is a rigid body tied to a single master node; its
outline nodes carry no elements and exist so that planar post-processing
(rigid-motion fit, path deviation) sees a non-collinear point set.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import InvalidArgumentError
from .model import Element, Material, Model, RigidLink

#: Default structural steel, MPa.
DEFAULT_MATERIAL = Material(E=200_000.0, nu=0.3)

#: Node ids of the moving link (outline and master) in both meshes.
MASTER_NODE = 9000


@dataclass(frozen=True)
class NotchHingeParams:
    """Geometry of a circular notch hinge.

    The web height follows  h(x) = web_thickness + 2 (radius -
    sqrt(radius^2 - x^2))  across the notch span -radius..radius; the
    out-of-plane width is constant.  One side is clamped, the other side
    carries a rigid link of length ``link_length``.
    """

    radius: float = 5.0
    web_thickness: float = 0.5
    width: float = 10.0
    link_length: float = 30.0
    n_notch: int = 40
    material: Material = DEFAULT_MATERIAL

    def __post_init__(self):
        if self.web_thickness <= 0.0:
            raise InvalidArgumentError("web thickness must be positive")
        if self.radius <= 0.0:
            raise InvalidArgumentError("notch radius must be positive")
        if self.width <= 0.0:
            raise InvalidArgumentError("width must be positive")
        if self.link_length <= 0.0:
            raise InvalidArgumentError("link length must be positive")
        if self.n_notch < 8:
            raise InvalidArgumentError(
                f"n_notch must be at least 8, got {self.n_notch}"
            )
        if self.radius < self.web_thickness / 10.0:
            raise InvalidArgumentError(
                "geometry violates radius >= web_thickness / 10 "
                f"({self.radius} < {self.web_thickness / 10.0})"
            )

    def with_web_thickness(self, value: float) -> "NotchHingeParams":
        return replace(self, web_thickness=float(value))


def notch_height(x: float, radius: float, web_thickness: float) -> float:
    """Web height at notch coordinate x in [-radius, radius]."""
    if abs(x) > radius:
        raise InvalidArgumentError(f"x={x} outside the notch span +-{radius}")
    return web_thickness + 2.0 * (radius - np.sqrt(radius**2 - x**2))


def _notch_stations(radius: float, n: int) -> np.ndarray:
    """n+1 stations across the notch, clustered at the thin web.

    Stations are uniform in sin(pi x / (2 radius)), i.e.
    x = (2 radius / pi) asin(u) with u equispaced in [-1, 1], which
    concentrates elements where the compliance integrand 1/h^3 peaks.
    """
    x = (2.0 * radius / np.pi) * np.arcsin(np.linspace(-1.0, 1.0, n + 1))
    x[0] = -radius
    x[-1] = radius
    return x


def mesh_notch_hinge(params: NotchHingeParams) -> Model:
    """Beam mesh of a circular notch hinge with a rigid moving link.

    Axis nodes 1..n+1 run from x=-radius (clamped) to x=+radius; each
    element takes the web height at its midpoint.  The moving link (span
    ``link_length`` to the right, outer height web_thickness + 2 radius)
    is a rigid body around master node 9000 at the link centroid.  The
    characteristic length of the DOF metric is the notch radius.
    """
    r = params.radius
    stations = _notch_stations(r, params.n_notch)
    nodes: dict[int, np.ndarray] = {
        i + 1: np.array([x, 0.0, 0.0]) for i, x in enumerate(stations)
    }
    elements = []
    for i in range(params.n_notch):
        mid = 0.5 * (stations[i] + stations[i + 1])
        h = notch_height(mid, r, params.web_thickness)
        elements.append(Element(n1=i + 1, n2=i + 2, width=params.width, height=h))

    interface = params.n_notch + 1
    x_end = r + params.link_length
    y_out = r + params.web_thickness / 2.0
    nodes[MASTER_NODE] = np.array([r + params.link_length / 2.0, 0.0, 0.0])
    outline = {
        MASTER_NODE + 1: np.array([x_end, 0.0, 0.0]),
        MASTER_NODE + 2: np.array([r, y_out, 0.0]),
        MASTER_NODE + 3: np.array([r, -y_out, 0.0]),
        MASTER_NODE + 4: np.array([x_end, y_out, 0.0]),
        MASTER_NODE + 5: np.array([x_end, -y_out, 0.0]),
    }
    nodes.update(outline)
    slaves = (interface, *outline.keys())

    return Model(
        nodes=nodes,
        elements=tuple(elements),
        material=params.material,
        clamped_nodes=(1,),
        rigid_links=(RigidLink(master=MASTER_NODE, slaves=slaves),),
        moving_nodes=(MASTER_NODE, *slaves),
        characteristic_length=r,
    )


@dataclass(frozen=True)
class ParallelGuideParams:
    """Geometry of a compliant parallel (leaf-spring) guide.

    Two vertical leaves of length ``leaf_length`` and section
    ``leaf_thickness`` x ``width`` stand ``link_span`` apart, clamped at
    the base and joined at the top by a rigid link; the guide translates
    along x by S-bending of the leaves.
    """

    leaf_length: float = 40.0
    leaf_thickness: float = 0.4
    width: float = 8.0
    link_span: float = 25.0
    n_per_leaf: int = 12
    material: Material = DEFAULT_MATERIAL

    def __post_init__(self):
        for name in ("leaf_length", "leaf_thickness", "width", "link_span"):
            if getattr(self, name) <= 0.0:
                raise InvalidArgumentError(f"{name} must be positive")
        if self.n_per_leaf < 2:
            raise InvalidArgumentError(
                f"n_per_leaf must be at least 2, got {self.n_per_leaf}"
            )


def mesh_parallel_guide(params: ParallelGuideParams) -> Model:
    """Beam mesh of the parallel guide with a rigid moving stage.

    Leaf nodes 1..n+1 (left) and 101..101+n (right) run from the clamped
    base to the stage; the stage is a rigid rectangle around master node
    9000.  The characteristic length of the DOF metric is the leaf length.
    """
    n = params.n_per_leaf
    length = params.leaf_length
    half = params.link_span / 2.0
    ys = np.linspace(0.0, length, n + 1)

    nodes: dict[int, np.ndarray] = {}
    for i, y in enumerate(ys):
        nodes[i + 1] = np.array([-half, y, 0.0])
        nodes[101 + i] = np.array([half, y, 0.0])
    elements = []
    for i in range(n):
        elements.append(
            Element(n1=i + 1, n2=i + 2, width=params.width, height=params.leaf_thickness)
        )
        elements.append(
            Element(n1=101 + i, n2=102 + i, width=params.width, height=params.leaf_thickness)
        )

    stage_h = params.link_span / 5.0
    top_left, top_right = n + 1, 101 + n
    nodes[MASTER_NODE] = np.array([0.0, length + stage_h / 2.0, 0.0])
    nodes[MASTER_NODE + 1] = np.array([-half, length + stage_h, 0.0])
    nodes[MASTER_NODE + 2] = np.array([half, length + stage_h, 0.0])
    slaves = (top_left, top_right, MASTER_NODE + 1, MASTER_NODE + 2)

    return Model(
        nodes=nodes,
        elements=tuple(elements),
        material=params.material,
        clamped_nodes=(1, 101),
        rigid_links=(RigidLink(master=MASTER_NODE, slaves=slaves),),
        moving_nodes=(MASTER_NODE, *slaves),
        characteristic_length=length,
    )
