# src/services/__init__.py
from .game_service import GameService
from .scenario_service import load_scenario, write_scenario, apply_overrides

__all__ = ["GameService", "load_scenario", "write_scenario", "apply_overrides"]
