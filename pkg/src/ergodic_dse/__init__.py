"""Design-space exploration of discrete-parameter multiprocessor models by
randomizing integer parameters over time inside one simulation run."""

__version__ = "0.1.0"

from .ergodic import ParamStream, RealParam, derive_seed, effective_value, gamma_sample
from .objective import Evaluation, LatticeTable, Objective, ObjectiveSpec, cost, evaluate, normalize
from .sim import SimResult, SimState, SimulationAbort, simulate
from .space import ParameterSpace, ParameterSpec, PointError
from .topology import Topology, build_chain, build_numa_system, table_ii_space
from .workload import Workload, memory_test_workload, mixed_kernel_suite, serial_chain_workload

__all__ = [
    "Evaluation", "LatticeTable", "Objective", "ObjectiveSpec", "ParamStream", "ParameterSpace", "ParameterSpec",
    "PointError", "RealParam", "SimResult", "SimState", "SimulationAbort", "Topology", "Workload", "build_chain",
    "build_numa_system", "cost", "derive_seed", "effective_value", "evaluate", "gamma_sample",
    "memory_test_workload", "mixed_kernel_suite", "normalize", "serial_chain_workload", "simulate",
    "table_ii_space",
]
