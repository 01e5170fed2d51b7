"""Spatial Euler-Bernoulli beam element with rectangular cross-section.

Local axes: x along the element, the section height h along local y and the
width b along local z, so bending about local z (I = b h^3 / 12) governs
deflection in the local xy plane.  Shear deformation is not modeled.
"""

from __future__ import annotations

import numpy as np

from ..core import Direction
from ..errors import InvalidArgumentError


def torsion_constant(width: float, height: float) -> float:
    """St. Venant torsion constant of a solid rectangle (series approximation).

    With s the short and t the long side:  J = t s^3 (1/3 - 0.21 (s/t)
    (1 - s^4 / (12 t^4))).  Symmetric in its arguments.
    """
    if width <= 0.0 or height <= 0.0:
        raise InvalidArgumentError("section sides must be positive")
    s, t = sorted((float(width), float(height)))
    return t * s**3 * (1.0 / 3.0 - 0.21 * (s / t) * (1.0 - s**4 / (12.0 * t**4)))


def beam_element_stiffness(width: float, height: float, material, length: float) -> np.ndarray:
    """12x12 local stiffness of a two-node beam, DOF order
    (ux, uy, uz, rx, ry, rz) per node.

    Before any constraint the matrix has exactly six zero eigenvalues,
    one per rigid-body mode.
    """
    b, h, length = float(width), float(height), float(length)
    if b <= 0.0 or h <= 0.0:
        raise InvalidArgumentError(f"degenerate section {b} x {h} mm")
    if length <= 0.0:
        raise InvalidArgumentError(f"element length must be positive, got {length}")

    e_mod = material.E
    g_mod = material.G
    area = b * h
    i_z = b * h**3 / 12.0
    i_y = h * b**3 / 12.0
    j_t = torsion_constant(b, h)

    k = np.zeros((12, 12))
    ax = e_mod * area / length
    k[0, 0] = k[6, 6] = ax
    k[0, 6] = k[6, 0] = -ax

    tr = g_mod * j_t / length
    k[3, 3] = k[9, 9] = tr
    k[3, 9] = k[9, 3] = -tr

    # bending about local z: deflection uy, rotation rz
    _fill_bending(k, e_mod * i_z, length, dof_v=(1, 7), dof_r=(5, 11), sign=1.0)
    # bending about local y: deflection uz, rotation ry (opposite sign coupling)
    _fill_bending(k, e_mod * i_y, length, dof_v=(2, 8), dof_r=(4, 10), sign=-1.0)
    return k


def _fill_bending(k, ei, length, dof_v, dof_r, sign):
    a = 12.0 * ei / length**3
    b = sign * 6.0 * ei / length**2
    c = 4.0 * ei / length
    d = 2.0 * ei / length
    v1, v2 = dof_v
    r1, r2 = dof_r
    k[v1, v1] = k[v2, v2] = a
    k[v1, v2] = k[v2, v1] = -a
    k[r1, r1] = k[r2, r2] = c
    k[r1, r2] = k[r2, r1] = d
    for v, s in ((v1, b), (v2, -b)):
        k[v, r1] = k[r1, v] = s
        k[v, r2] = k[r2, v] = s


def local_axes(axis) -> np.ndarray:
    """Rows are the local x, y, z unit vectors in global coordinates.

    Local y is the projection of global Y onto the plane normal to the
    element; for elements parallel to global Y it is the projection of
    global X instead.  This fixes the section orientation without any
    per-element data: the height always lies in the global XY plane.
    """
    lx = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(lx)
    if norm == 0.0:
        raise InvalidArgumentError("element axis has zero length")
    lx = lx / norm
    ref = np.array([0.0, 1.0, 0.0])
    if abs(lx @ ref) > 1.0 - 1e-8:
        ref = np.array([1.0, 0.0, 0.0])
    ly = ref - (ref @ lx) * lx
    ly /= np.linalg.norm(ly)
    lz = np.cross(lx, ly)
    return np.vstack([lx, ly, lz])


def transform_to_global(k_local: np.ndarray, rotation: np.ndarray) -> np.ndarray:
    """Rotate a 12x12 local stiffness into global coordinates."""
    t = np.zeros((12, 12))
    for i in range(4):
        t[3 * i : 3 * i + 3, 3 * i : 3 * i + 3] = rotation
    return t.T @ k_local @ t
