"""Poisson random hypergraphs, collapse, and their phase transitions."""
from .errors import (AssumptionViolated, ChainStopped, ConfigError, DomainError, EmptySample,
                     InvalidVertex, NotAGraph, PatchesPresent)
from .hypergraph import (CollapseResult, CollapseTrace, Hypergraph, collapse, collapse_counts,
                         concat, domain_counts, domain_of, dual, insert_edge, restrict, simplify,
                         two_core)
from .kernels import BACKEND
from .limits import (BorelLaw, ChainState, WalkFamily, borel_pmf, chain_step, coupled_family,
                     lambda2, simulate_first_passage)
from .mixing import MixingDistribution
from .sampler import EventStream, identifiability_path, sample_process, sample_static, snapshot_at
from .structure import (StructureProfile, analyze, classify, discontinuity_set, fluid_prediction,
                        largest_root_phi, lower_envelope, structure_function, upper_envelope)

__version__ = "0.1.0"
