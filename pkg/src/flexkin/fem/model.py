"""Structural model: beam mesh, rigid links, constraints and assembly.

A model carries nodes, beam elements, clamped nodes and rigid links.  Slave
DOFs of a rigid link are eliminated exactly through the rigid-body
transformation (no penalty stiffness), clamped DOFs are removed, and the
result is the free system.  When the model designates a moving rigid link,
the remaining internal DOFs can additionally be condensed statically onto
the link's master node; the resulting interface system carries the exact
static stiffness felt by the moving link and is the default space for the
eigenvalue assessment (its size does not change under mesh refinement, so
the reported quantities are mesh-objective).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..core import (
    DIRECTIONS,
    Direction,
    DofEntry,
    DofMap,
    DofMetric,
    ReferenceKinematics,
    StiffnessMatrix,
    build_metric,
)
from ..errors import InvalidArgumentError, ModelSingularError
from . import beams


@dataclass(frozen=True)
class Material:
    """Linear elastic material: Young's modulus in MPa, Poisson ratio."""

    E: float
    nu: float

    def __post_init__(self):
        if not self.E > 0.0:
            raise InvalidArgumentError(f"Young's modulus must be positive, got {self.E}")
        if not -1.0 < self.nu < 0.5:
            raise InvalidArgumentError(f"Poisson ratio must lie in (-1, 0.5), got {self.nu}")

    @property
    def G(self) -> float:
        """Shear modulus E / (2 (1 + nu))."""
        return self.E / (2.0 * (1.0 + self.nu))


@dataclass(frozen=True)
class Element:
    """Two-node beam with rectangular section width x height (mm)."""

    n1: int
    n2: int
    width: float
    height: float


@dataclass(frozen=True)
class RigidLink:
    """Rigid body: every slave node moves with the master node."""

    master: int
    slaves: tuple[int, ...]


@dataclass(frozen=True)
class Model:
    """Assembled-ready structural model.

    ``moving_nodes`` names the moving link (masters and slaves included);
    ``characteristic_length`` feeds the DOF metric.
    """

    nodes: dict[int, np.ndarray]
    elements: tuple[Element, ...]
    material: Material
    clamped_nodes: tuple[int, ...]
    rigid_links: tuple[RigidLink, ...]
    moving_nodes: tuple[int, ...]
    characteristic_length: float

    def __post_init__(self):
        nodes = {int(k): np.asarray(v, dtype=float).reshape(3) for k, v in self.nodes.items()}
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "clamped_nodes", tuple(int(n) for n in self.clamped_nodes))
        object.__setattr__(self, "rigid_links", tuple(self.rigid_links))
        object.__setattr__(self, "moving_nodes", tuple(int(n) for n in self.moving_nodes))
        self._validate()

    def _validate(self):
        if not self.nodes:
            raise InvalidArgumentError("model has no nodes")
        if self.characteristic_length <= 0.0:
            raise InvalidArgumentError("characteristic length must be positive")
        for el in self.elements:
            for n in (el.n1, el.n2):
                if n not in self.nodes:
                    raise InvalidArgumentError(f"element references unknown node {n}")
            if el.n1 == el.n2:
                raise InvalidArgumentError(f"element joins node {el.n1} to itself")
        slavesptr: dict[int, int] = {}
        for link in self.rigid_links:
            if link.master not in self.nodes:
                raise InvalidArgumentError(f"rigid link master {link.master} unknown")
            for s in link.slaves:
                if s not in self.nodes:
                    raise InvalidArgumentError(f"rigid link slave {s} unknown")
                if s == link.master:
                    raise InvalidArgumentError(f"node {s} cannot be its own master")
                if s in slavesptr:
                    raise InvalidArgumentError(f"node {s} is slave of two rigid links")
                slavesptr[s] = link.master
        for link in self.rigid_links:
            if link.master in slavesptr:
                raise InvalidArgumentError(
                    f"master {link.master} is itself a slave of another link"
                )
        for n in self.clamped_nodes:
            if n not in self.nodes:
                raise InvalidArgumentError(f"clamped node {n} unknown")
            if n in slavesptr:
                raise InvalidArgumentError(f"node {n} is both clamped and a rigid-link slave")
        for n in self.moving_nodes:
            if n not in self.nodes:
                raise InvalidArgumentError(f"moving node {n} unknown")
        self._check_connected()

    def _check_connected(self):
        parent = {n: n for n in self.nodes}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        def union(a, b):
            parent[find(a)] = find(b)

        for el in self.elements:
            union(el.n1, el.n2)
        for link in self.rigid_links:
            for s in link.slaves:
                union(s, link.master)
        roots = {find(n) for n in self.nodes}
        if len(roots) > 1:
            raise InvalidArgumentError(
                f"model is not connected: {len(roots)} separate components"
            )

    @property
    def slave_to_master(self) -> dict[int, int]:
        return {s: link.master for link in self.rigid_links for s in link.slaves}

    @property
    def moving_master(self) -> int | None:
        """Master of the moving rigid link, when the model designates one."""
        moving = set(self.moving_nodes)
        masters = [link.master for link in self.rigid_links if link.master in moving]
        if len(masters) == 1:
            return masters[0]
        return None

    def full_dof_map(self) -> DofMap:
        """All DOFs of all nodes; clamped and slave DOFs marked constrained."""
        order = sorted(self.nodes)
        entries = tuple(DofEntry(n, d) for n in order for d in DIRECTIONS)
        slaves = set(self.slave_to_master)
        clamped = set(self.clamped_nodes)
        constrained = frozenset(
            i for i, e in enumerate(entries) if e.node in slaves or e.node in clamped
        )
        return DofMap(entries=entries, constrained=constrained)


def _skew(r: np.ndarray) -> np.ndarray:
    return np.array(
        [
            [0.0, -r[2], r[1]],
            [r[2], 0.0, -r[0]],
            [-r[1], r[0], 0.0],
        ]
    )


def _assemble_all_dofs(model: Model) -> tuple[np.ndarray, dict[int, int]]:
    """Global stiffness over every DOF of every node, plus node offsets."""
    order = sorted(model.nodes)
    base = {n: 6 * i for i, n in enumerate(order)}
    k = np.zeros((6 * len(order), 6 * len(order)))
    for el in model.elements:
        x1 = model.nodes[el.n1]
        x2 = model.nodes[el.n2]
        axis = x2 - x1
        length = float(np.linalg.norm(axis))
        k_local = beams.beam_element_stiffness(el.width, el.height, model.material, length)
        rot = beams.local_axes(axis)
        k_glob = beams.transform_to_global(k_local, rot)
        idx = np.r_[base[el.n1] : base[el.n1] + 6, base[el.n2] : base[el.n2] + 6]
        k[np.ix_(idx, idx)] += k_glob
    return k, base


def _slave_elimination(model: Model, dof_map: DofMap) -> np.ndarray:
    """Transformation T with  u_all = T u_free  (free = entry order minus
    slave and clamped DOFs); slave rows follow the rigid-body map."""
    slaves = model.slave_to_master
    entries = dof_map.entries
    free_pos = {idx: col for col, idx in enumerate(dof_map.free_indices)}
    col_of: dict[tuple[int, Direction], int] = {}
    for idx, e in enumerate(entries):
        col = free_pos.get(idx)
        if col is not None:
            col_of[(e.node, e.direction)] = col

    t = np.zeros((len(entries), dof_map.n_free))
    for idx, e in enumerate(entries):
        col = free_pos.get(idx)
        if col is not None:
            t[idx, col] = 1.0
            continue
        master = slaves.get(e.node)
        if master is None:
            continue  # clamped: row stays zero
        r = model.nodes[e.node] - model.nodes[master]
        d = e.direction.value
        if e.direction.is_translation:
            # u_s = u_m + theta_m x r  =  u_m - [r]x theta_m
            mt = col_of.get((master, DIRECTIONS[d]))
            if mt is not None:
                t[idx, mt] = 1.0
            rx = _skew(r)
            for j, rot_dir in enumerate(DIRECTIONS[3:]):
                mc = col_of.get((master, rot_dir))
                if mc is not None:
                    t[idx, mc] = -rx[d, j]
        else:
            mc = col_of.get((master, e.direction))
            if mc is not None:
                t[idx, mc] = 1.0
    return t


@dataclass(frozen=True)
class FreeSystem:
    """Stiffness on the free DOFs after rigid-link elimination and clamping."""

    model: Model
    k: StiffnessMatrix
    dof_map: DofMap
    metric: DofMetric
    transformation: np.ndarray  # all-DOF rows x free columns

    @property
    def n(self) -> int:
        return self.k.n


@dataclass(frozen=True)
class InterfaceSystem:
    """Static condensation of a free system onto the moving link's master.

    ``recovery`` maps master motion to the energy-minimizing internal
    motion, so expanding an interface vector reproduces the exact static
    field.
    """

    model: Model
    k: StiffnessMatrix
    dof_map: DofMap
    metric: DofMetric
    parent: FreeSystem
    kept: tuple[int, ...]      # positions of master DOFs in the parent free order
    internal: tuple[int, ...]  # the remaining parent free positions
    recovery: np.ndarray       # len(internal) x len(kept)

    @property
    def n(self) -> int:
        return self.k.n


AnalysisSystem = FreeSystem | InterfaceSystem


def assemble(model: Model) -> tuple[StiffnessMatrix, DofMap, DofMetric]:
    """Global stiffness on the free DOFs, its DOF map and the model metric.

    Free means: neither eliminated as a rigid-link slave nor clamped.  The
    result is checked for positive definiteness; a zero-energy mode raises
    :class:`ModelSingularError` naming the offending mode.
    """
    system = build_free_system(model)
    return system.k, system.dof_map, system.metric


def build_free_system(model: Model) -> FreeSystem:
    k_all, _ = _assemble_all_dofs(model)
    dof_map = model.full_dof_map()
    t = _slave_elimination(model, dof_map)
    k_free = t.T @ k_all @ t
    k_free = 0.5 * (k_free + k_free.T)
    metric = build_metric(dof_map, model.characteristic_length)
    _check_positive_definite(k_free, dof_map)
    return FreeSystem(
        model=model,
        k=StiffnessMatrix(k_free),
        dof_map=dof_map,
        metric=metric,
        transformation=t,
    )


def _check_positive_definite(k: np.ndarray, dof_map: DofMap):
    w, v = np.linalg.eigh(k)
    tol = 1e-12 * max(float(w[-1]), 0.0)
    if w[0] <= tol:
        zero_count = int(np.argmax(w > tol)) if np.any(w > tol) else k.shape[0]
        lead = dof_map.free_entries[int(np.argmax(np.abs(v[:, 0])))]
        raise ModelSingularError(
            f"assembled stiffness is singular: mode 1 (eigenvalue {w[0]:g}) is a "
            f"zero-energy motion dominated by node {lead.node} {lead.direction.name}; "
            f"{zero_count} mode(s) lie at numerical zero",
            mode_index=1,
        )


def build_interface_system(model: Model) -> AnalysisSystem:
    """Condense internal DOFs onto the moving link's master node.

    Falls back to the free system when the model does not designate a
    moving master.
    """
    free = build_free_system(model)
    master = model.moving_master
    if master is None:
        return free
    kept = [
        free.dof_map.free_index(master, d)
        for d in DIRECTIONS
        if free.dof_map.free_index(master, d) is not None
    ]
    if len(kept) != 6:
        raise InvalidArgumentError(
            f"moving master {master} must keep all six DOFs free"
        )
    internal = [i for i in range(free.n) if i not in set(kept)]
    kv = free.k.values
    if internal:
        k_ii = kv[np.ix_(internal, internal)]
        k_ik = kv[np.ix_(internal, kept)]
        k_kk = kv[np.ix_(kept, kept)]
        x = np.linalg.solve(k_ii, k_ik)
        k_cond = k_kk - k_ik.T @ x
        recovery = -x
    else:
        k_cond = kv[np.ix_(kept, kept)]
        recovery = np.zeros((0, len(kept)))
    k_cond = 0.5 * (k_cond + k_cond.T)

    entries = tuple(free.dof_map.free_entries[i] for i in kept)
    dof_map = DofMap(entries=entries, constrained=frozenset())
    metric = build_metric(dof_map, model.characteristic_length)
    return InterfaceSystem(
        model=model,
        k=StiffnessMatrix(k_cond),
        dof_map=dof_map,
        metric=metric,
        parent=free,
        kept=tuple(kept),
        internal=tuple(internal),
        recovery=recovery,
    )


def analysis_system(model: Model) -> AnalysisSystem:
    """Canonical space for assessing a model: the moving-link interface
    when one exists, the free system otherwise."""
    return build_interface_system(model)


def to_free_vector(system: AnalysisSystem, u) -> tuple[FreeSystem, np.ndarray]:
    """Express a system vector on the free DOFs of the underlying model."""
    u = np.asarray(u, dtype=float)
    if u.shape != (system.n,):
        raise InvalidArgumentError(f"expected a vector of length {system.n}, got {u.shape}")
    if isinstance(system, FreeSystem):
        return system, u
    parent = system.parent
    v = np.zeros(parent.n)
    v[list(system.kept)] = u
    if system.internal:
        v[list(system.internal)] = system.recovery @ u
    return parent, v


def expand_to_nodes(system: AnalysisSystem, u) -> dict[int, np.ndarray]:
    """Full nodal displacement field (6 components per node).

    Internal DOFs of an interface system take their energy-minimizing
    values, rigid-link slaves follow their master, clamped nodes stay zero.
    """
    free, v = to_free_vector(system, u)
    full = free.transformation @ v
    order = sorted(free.model.nodes)
    return {n: full[6 * i : 6 * i + 6] for i, n in enumerate(order)}


@dataclass(frozen=True)
class FullField:
    """A nodal field flattened over every DOF of the model (all free)."""

    values: np.ndarray
    dof_map: DofMap
    metric: DofMetric
    coordinates: dict[int, np.ndarray]


def full_field(system: AnalysisSystem, u) -> FullField:
    """Expanded field over all DOFs, with map, metric and coordinates,
    ready for the planar fit and path-deviation tools."""
    nodal = expand_to_nodes(system, u)
    model = system.model
    order = sorted(model.nodes)
    entries = tuple(DofEntry(n, d) for n in order for d in DIRECTIONS)
    dof_map = DofMap(entries=entries, constrained=frozenset())
    values = np.concatenate([nodal[n] for n in order])
    metric = build_metric(dof_map, model.characteristic_length)
    return FullField(
        values=values,
        dof_map=dof_map,
        metric=metric,
        coordinates=dict(model.nodes),
    )


def apply_point_load(system: AnalysisSystem, node: int, load) -> np.ndarray:
    """Reduce a 6-component nodal load (Fx, Fy, Fz, Mx, My, Mz) to the
    system's free vector.

    Loads on rigid-link slaves are transported to the master as a wrench;
    loads on internal DOFs of an interface system are condensed exactly.
    """
    load = np.asarray(load, dtype=float).reshape(6)
    free = system if isinstance(system, FreeSystem) else system.parent
    model = free.model
    if node not in model.nodes:
        raise InvalidArgumentError(f"unknown node {node}")
    if node in model.clamped_nodes:
        raise InvalidArgumentError(f"node {node} is clamped; its load does no work")
    order = sorted(model.nodes)
    f_all = np.zeros(6 * len(order))
    f_all[6 * order.index(node) : 6 * order.index(node) + 6] = load
    f_free = free.transformation.T @ f_all
    if isinstance(system, FreeSystem):
        return f_free
    f_kept = f_free[list(system.kept)]
    if system.internal:
        f_kept = f_kept + system.recovery.T @ f_free[list(system.internal)]
    return f_kept


@dataclass(frozen=True)
class RotationAbout:
    """Rigid rotation about an axis through a pivot point."""

    pivot: tuple[float, float, float]
    axis: tuple[float, float, float]


@dataclass(frozen=True)
class TranslationAlong:
    """Rigid translation along a direction."""

    direction: tuple[float, float, float]


RigidMotion = RotationAbout | TranslationAlong


def _rigid_nodal_motion(kind: RigidMotion, x: np.ndarray) -> np.ndarray:
    """Linearized rigid motion (u, theta) of a point at ``x``."""
    if isinstance(kind, RotationAbout):
        axis = np.asarray(kind.axis, dtype=float)
        nrm = np.linalg.norm(axis)
        if nrm == 0.0:
            raise InvalidArgumentError("rotation axis must be nonzero")
        axis = axis / nrm
        pivot = np.asarray(kind.pivot, dtype=float)
        return np.concatenate([np.cross(axis, x - pivot), axis])
    if isinstance(kind, TranslationAlong):
        d = np.asarray(kind.direction, dtype=float)
        nrm = np.linalg.norm(d)
        if nrm == 0.0:
            raise InvalidArgumentError("translation direction must be nonzero")
        return np.concatenate([d / nrm, np.zeros(3)])
    raise InvalidArgumentError(f"unsupported rigid motion {kind!r}")


def reference_vector(
    system: AnalysisSystem, kind: RigidMotion, completion: str = "min_energy"
) -> np.ndarray:
    """Unnormalized reference motion on the system's free DOFs.

    Moving-link DOFs take the rigid motion; the remaining DOFs are zero
    (``zero_fill``) or solved from the stiffness with the moving DOFs held
    fixed (``min_energy``), i.e. by static condensation.
    """
    if completion not in ("zero_fill", "min_energy"):
        raise InvalidArgumentError(
            f"completion must be 'zero_fill' or 'min_energy', got {completion!r}"
        )
    model = system.model
    moving = set(model.moving_nodes)
    if not moving:
        raise InvalidArgumentError("model designates no moving nodes")
    v = np.zeros(system.n)
    moving_idx: list[int] = []
    for i, e in enumerate(system.dof_map.free_entries):
        if e.node in moving:
            motion = _rigid_nodal_motion(kind, model.nodes[e.node])
            v[i] = motion[e.direction.value]
            moving_idx.append(i)
    if not moving_idx:
        raise InvalidArgumentError("no moving-node DOF is free in this system")
    rest = [i for i in range(system.n) if i not in set(moving_idx)]
    if rest and completion == "min_energy":
        kv = system.k.values
        k_rr = kv[np.ix_(rest, rest)]
        k_rm = kv[np.ix_(rest, moving_idx)]
        v[rest] = -np.linalg.solve(k_rr, k_rm @ v[moving_idx])
    if float(np.abs(v).max()) == 0.0:
        raise InvalidArgumentError(
            "reference motion vanishes on the free DOFs (annihilated by constraints)"
        )
    return v


def rigid_reference(
    model_or_system, kind: RigidMotion, completion: str = "min_energy"
) -> ReferenceKinematics:
    """Reference kinematics from an idealized rigid motion of the moving link.

    Accepts a :class:`Model` (assessed on its canonical analysis system) or
    an already-built system.  The returned vector is metric-normalized, and
    the full nodal field completed on the free system with the same policy
    is attached for path-level post-processing.
    """
    system = (
        analysis_system(model_or_system)
        if isinstance(model_or_system, Model)
        else model_or_system
    )
    v = reference_vector(system, kind, completion)
    ref = ReferenceKinematics(
        system.metric.normalized(v),
        system.metric,
        description=_describe(kind, completion),
    )
    free = system if isinstance(system, FreeSystem) else system.parent
    v_free = reference_vector(free, kind, completion)
    full = free.transformation @ v_free
    order = sorted(free.model.nodes)
    ref.nodal_fields = [{n: full[6 * i : 6 * i + 6] for i, n in enumerate(order)}]
    return ref


def _describe(kind: RigidMotion, completion: str) -> str:
    if isinstance(kind, RotationAbout):
        return f"rigid rotation about {tuple(kind.pivot)} axis {tuple(kind.axis)} ({completion})"
    return f"rigid translation along {tuple(kind.direction)} ({completion})"
