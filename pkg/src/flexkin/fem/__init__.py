"""Parametric finite-element models, assembly and reference kinematics."""

from .beams import beam_element_stiffness, local_axes, torsion_constant
from .meshers import (
    DEFAULT_MATERIAL,
    MASTER_NODE,
    NotchHingeParams,
    ParallelGuideParams,
    mesh_notch_hinge,
    mesh_parallel_guide,
    notch_height,
)
from .model import (
    AnalysisSystem,
    Element,
    FreeSystem,
    FullField,
    InterfaceSystem,
    Material,
    Model,
    RigidLink,
    RotationAbout,
    TranslationAlong,
    analysis_system,
    apply_point_load,
    assemble,
    build_free_system,
    build_interface_system,
    expand_to_nodes,
    full_field,
    reference_vector,
    rigid_reference,
    to_free_vector,
)
from .sweep import SweepRow, SweepTable, sweep_thickness

__all__ = [
    "AnalysisSystem",
    "DEFAULT_MATERIAL",
    "Element",
    "FreeSystem",
    "FullField",
    "InterfaceSystem",
    "MASTER_NODE",
    "Material",
    "Model",
    "NotchHingeParams",
    "ParallelGuideParams",
    "RigidLink",
    "RotationAbout",
    "SweepRow",
    "SweepTable",
    "TranslationAlong",
    "analysis_system",
    "apply_point_load",
    "assemble",
    "beam_element_stiffness",
    "build_free_system",
    "build_interface_system",
    "expand_to_nodes",
    "full_field",
    "local_axes",
    "mesh_notch_hinge",
    "mesh_parallel_guide",
    "notch_height",
    "reference_vector",
    "rigid_reference",
    "sweep_thickness",
    "to_free_vector",
    "torsion_constant",
]
