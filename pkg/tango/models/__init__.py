from tango.models.energy import EnergyModel, TangentModel, init_energy_model, init_tangent_model
from tango.models.networks import (
    GnnNetwork,
    TangoNetwork,
    init_gnn_network,
    init_tango_network,
    layer_param_count,
    matched_gnn_depth,
)
