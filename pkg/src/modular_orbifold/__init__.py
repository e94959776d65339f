"""Modular data of lattice, WZW and orbifold theories: construction, verification and reconstruction."""

from .mtc_core import (
    FusionRing,
    ModularData,
    assemble_modular,
    central_charge_mod8,
    conjugation,
    global_dimension,
    sigma_tilde,
    tensor_product,
    verify,
    verlinde_fusion,
    y_from_fusion,
)
from .families import (
    build_a1_level_k,
    build_orbifold_u1,
    build_spin_m_level2,
    build_su_m_level1,
    build_u1,
    twist_calibration,
)

__all__ = [
    "FusionRing",
    "ModularData",
    "assemble_modular",
    "build_a1_level_k",
    "build_orbifold_u1",
    "build_spin_m_level2",
    "build_su_m_level1",
    "build_u1",
    "central_charge_mod8",
    "conjugation",
    "global_dimension",
    "sigma_tilde",
    "tensor_product",
    "twist_calibration",
    "verify",
    "verlinde_fusion",
    "y_from_fusion",
]
