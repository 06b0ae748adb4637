from tango.dynamics.energy import (
    EnergyTerms,
    alpha_coeff,
    energy_from_intermediate,
    energy_gradient,
    energy_intermediate,
    energy_terms,
    energy_value,
    find_tape,
)
from tango.dynamics.tangent import beta_coeff, project_orthogonal, tangent_raw
from tango.dynamics.step import TRACE_COLUMNS, StepTrace, rollout, tango_step, write_trajectory_csv, zero_threshold
from tango.dynamics.baselines import dirichlet_flow_step, dirichlet_stable_step, newton_decomposition
