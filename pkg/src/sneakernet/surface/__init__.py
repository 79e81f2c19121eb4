"""Planar-code memory: layout, syndrome circuits, decoding and Monte Carlo."""

from .circuits import SyndromeCircuit, syndrome_circuit
from .decoder import brute_force_weight, decode, matching_weight, shortest_paths
from .graph import DetectionGraph, FaultTable, build_detection_graph, build_fault_table
from .montecarlo import TrialStats, crossing_point, estimate_failure, run_cycle_trial, wilson_interval
from .patch import CodePatch, build_patch

__all__ = [
    "CodePatch",
    "DetectionGraph",
    "FaultTable",
    "SyndromeCircuit",
    "TrialStats",
    "brute_force_weight",
    "build_detection_graph",
    "build_fault_table",
    "build_patch",
    "crossing_point",
    "decode",
    "estimate_failure",
    "matching_weight",
    "run_cycle_trial",
    "shortest_paths",
    "syndrome_circuit",
    "wilson_interval",
]
