"""Comparative-advantage resource allocation of VNFs on heterogeneous machines."""

from .ca import (Advantage, CaOrdering, StructureCheck, baseline_absolute_advantage,
                 baseline_even_split, check_ca_structure, has_comparative_advantage,
                 solve_2_by_m, solve_2x2, solve_ca_specialization, solve_n_by_2,
                 sort_by_ca)
from .knowledgebase import (KnowledgebaseDocument, build_model, load_document,
                            load_path, query_capacity, serialize)
from .model import (CapacityCurve, CapacityModel, CobbDouglas, Linear, MachineId,
                    VnfId, evaluate_throughput, evaluate_utility, shadow_prices,
                    validate_allocation)
from .report import Diagnostics, SolveReport
from .solver import (OracleConfig, SolverConfig, brute_force_oracle, compare_strategies,
                     solve, solve_general, solve_requirements_lp)

__version__ = "0.1.0"
