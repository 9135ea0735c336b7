"""Multicast light-forest construction for sparse-splitting WDM networks."""
from .topology import (
    MC,
    MI,
    Path,
    Topology,
    TopologyError,
    builtin_topology,
    delete_from,
    parse_topology,
    render_topology,
    resolve_topology,
)
from .lightforest import (
    ConnectionChoice,
    ConstraintViolation,
    GrowState,
    InvalidSession,
    LightForest,
    LightTree,
    MulticastSession,
    extend_tree,
    first_tree_destinations,
    forest_cost,
    link_stress,
    tree_cost,
    validate_forest,
    validate_tree,
)
from .routing import (
    ALGORITHMS,
    build_forest,
    hslt_build,
    member_only_build,
    nearest_destination,
    reroute_to_source_build,
    shortest_path,
)
from .wdm import WavelengthState, admit_session, first_fit_assign, wavelength_efficiency

__version__ = "0.1.0"
