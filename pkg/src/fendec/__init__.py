"""Stage-wise Fenchel decomposition for two-stage stochastic integer programs.

The package is self-contained: its own bounded-variable simplex (`fendec.lp`),
branch-and-bound integer solver (`fendec.mip`), cut generator (`fendec.fcg`),
integer-set reduction (`fendec.isg`), decomposition driver (`fendec.sfd`),
instance generator (`fendec.gen`), and a CLI (`fendec.cli`, installed as the
`fendec` command).
"""

from fendec.fcg import FcgResult, FenchelCut, generate_cut
from fendec.gen import GenConfig, config_from_name, generate, instance_name
from fendec.isg import ReductionStep, ReductionTrace, reduce_integer_set
from fendec.lp import LpProblem, LpSolution, LpStatus
from fendec.mip import MipStatus, enumerate_lattice, solve_mip
from fendec.model import (
    DepModel,
    FirstStage,
    Scenario,
    SecondStage,
    SipxError,
    StochasticProgram,
    build_dep,
    ensure_valid,
    read_instance,
    read_sipx,
    recourse_value_bounds,
    subproblem_data,
    write_instance,
    write_sipx,
)
from fendec.sfd import SfdOptions, SfdResult, direct_solve, sfd_solve

__version__ = "0.1.0"

__all__ = [
    "DepModel",
    "FcgResult",
    "FenchelCut",
    "FirstStage",
    "GenConfig",
    "LpProblem",
    "LpSolution",
    "LpStatus",
    "MipStatus",
    "ReductionStep",
    "ReductionTrace",
    "Scenario",
    "SecondStage",
    "SfdOptions",
    "SfdResult",
    "SipxError",
    "StochasticProgram",
    "build_dep",
    "config_from_name",
    "direct_solve",
    "ensure_valid",
    "enumerate_lattice",
    "generate",
    "generate_cut",
    "instance_name",
    "read_instance",
    "read_sipx",
    "recourse_value_bounds",
    "reduce_integer_set",
    "sfd_solve",
    "solve_mip",
    "subproblem_data",
    "write_instance",
    "write_sipx",
    "__version__",
]
