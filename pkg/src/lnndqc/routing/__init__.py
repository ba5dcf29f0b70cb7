from .common import (
    CompiledCircuit,
    Layout,
    RoutingError,
    Strategy,
    conformance_violations,
    swap_permutation_layout,
)
from .linear import (
    default_strategy,
    pair_coverage,
    place,
    refine_placement,
    route,
    route_greedy,
    route_swap_network,
)
from .sabre import RouterConfig, route_sabre

__all__ = [
    "CompiledCircuit",
    "Layout",
    "RouterConfig",
    "RoutingError",
    "Strategy",
    "conformance_violations",
    "default_strategy",
    "pair_coverage",
    "place",
    "refine_placement",
    "route",
    "route_greedy",
    "route_sabre",
    "route_swap_network",
    "swap_permutation_layout",
]
