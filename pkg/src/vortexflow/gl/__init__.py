from .field import ComplexField, Grid, build_well_prepared
from .stepping import evolve, gp_flow_step, heat_flow_step, relax_to_stationary
from .analysis import (EnergyReport, current_and_jacobian, energy, jacobian_mass,
                       locate_vortices, weighted_identity_residual)
from .compare import ComparisonReport, compare_to_ode

__all__ = ["ComplexField", "Grid", "build_well_prepared", "evolve", "gp_flow_step",
           "heat_flow_step", "relax_to_stationary", "EnergyReport", "current_and_jacobian",
           "energy", "jacobian_mass", "locate_vortices", "weighted_identity_residual",
           "ComparisonReport", "compare_to_ode"]
