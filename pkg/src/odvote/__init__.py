"""Heuristic voting as ordinal dominance over pivot-graph epistemic structures."""

from ._backend import BACKEND
from .dominance import (
    Verdict,
    dominance_matrix,
    is_od_equilibrium,
    od_check,
    od_oracle,
    od_set,
    sdom_oracle,
    uod_set,
)
from .dynamics import BatchConfig, BestUOD, AnyOD, HeuristicPolicy, batch_verify, explore, run
from .election import Bias, Preference, VotingRule, allowed_ballots, outcome, winner
from .epistemic import (
    CliqueClosure,
    DistanceBased,
    FullInformation,
    InformationStructure,
    PivotGraph,
    PivotGraphStructure,
    VoterContext,
    derive_structure,
    pivot_graph,
    spp_check,
)
from .errors import (
    CapacityError,
    ConfigError,
    DomainError,
    OdvoteError,
    ParseError,
    StructuralError,
    VerificationFailure,
)
from .metrics import Metric, Radius, ball, distance

__version__ = "0.1.0"
