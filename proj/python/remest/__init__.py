"""Optimal transmission policies for remote estimation over packet-drop channels."""

from ._core import (
    ArgumentError,
    Channel,
    Plant,
    SymmetricSolution,
    channel,
    constant_channel,
    discrete_check,
    energy_harvesting,
    iid_stage_cost,
    optimize_interval,
    simulate_uniform,
    solve_iid,
    solve_symmetric,
    workload_chain,
)

__all__ = [
    "ArgumentError",
    "Channel",
    "Plant",
    "SymmetricSolution",
    "channel",
    "constant_channel",
    "discrete_check",
    "energy_harvesting",
    "iid_stage_cost",
    "optimize_interval",
    "simulate_uniform",
    "solve_iid",
    "solve_symmetric",
    "workload_chain",
]
