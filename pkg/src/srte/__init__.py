"""Traffic engineering with shortest-path segment routing.

Library layout:

- graph: topology/demand parsing, validation, synthetic demand generation
- paths: exact shortest-path DAGs and ECMP segment fractions
- centrality: structural node scores for middlepoint selection
- lp: generic linear programs and the solver front end
- te: tunnel enumeration and the TE_LU / TE_MF / MP-baseline programs
- selection: optimal, greedy, centrality, and random middlepoint selection
- oracles: brute-force flow oracles for verification at desk scale
- cli: command-line front end (``srte`` entry point)
"""

from .graph import (
    Commodity,
    DemandMatrix,
    Edge,
    FlowNetwork,
    generate_gravity_demands,
    parse_demands,
    parse_topology,
    serialize_topology,
)
from .paths import SegmentFractions, ShortestPathCache, ShortestPathDag, sp_dag
from .te import Tunnel, TeSolution, build_mp_baseline, build_te_lu, build_te_mf

__all__ = [
    "Commodity",
    "DemandMatrix",
    "Edge",
    "FlowNetwork",
    "SegmentFractions",
    "ShortestPathCache",
    "ShortestPathDag",
    "TeSolution",
    "Tunnel",
    "build_mp_baseline",
    "build_te_lu",
    "build_te_mf",
    "generate_gravity_demands",
    "parse_demands",
    "parse_topology",
    "serialize_topology",
    "sp_dag",
]

__version__ = "0.1.0"
