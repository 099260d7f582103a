"""Lexicographic multi-criteria local path planning around a reference path."""
from .costs import CostConfig
from .geometry import ObstacleSet, Pose2D, ReferencePath
from .graph import GraphConfig, PlanGraph, generate_graph, nearest_node
from .planner import FollowPath, GoalReached, HoldPosition, PlannerConfig, RecedingHorizonPlanner
from .search import brute_force_lex, extract_path, lex_search_heap, lex_search_naive
from .sim import RunMetrics, Scenario, run_scenario

__version__ = "0.1.0"

__all__ = [
    "CostConfig", "ObstacleSet", "Pose2D", "ReferencePath", "GraphConfig", "PlanGraph", "generate_graph",
    "nearest_node", "FollowPath", "GoalReached", "HoldPosition", "PlannerConfig", "RecedingHorizonPlanner",
    "brute_force_lex", "extract_path", "lex_search_heap", "lex_search_naive", "RunMetrics", "Scenario",
    "run_scenario",
]
