import copy

import pytest

from src.config import get_settings
from src.schemas import GameParams, InitialState, Scenario, StochasticParams

SEC4_PARAMS = {"mu": 3.0, "nu": 1.0, "alpha_max": 1.0, "k": 1.0, "q1_max": 5.0}

SEC4_SCENARIO = {
    "version": 1,
    "name": "sec4",
    "params": SEC4_PARAMS,
    "q0": {"q1": 2.0, "q2": 2.0},
    "defender": {"kind": "theorem_switching"},
    "attacker": {"kind": "constant_max"},
    "arrival": {"kind": "constant"},
    "simulation": {"dt": 1e-3, "t_max": 20.0, "tol": 1e-6},
    "solver": {"n_dirs": 256, "n_quad": 16, "tol_T": 1e-2},
}

def _merge(base: dict, overrides: dict) -> dict:
    merged = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict) and key not in ("attacker", "arrival", "defender"):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged

@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()

@pytest.fixture
def sec4_params() -> GameParams:
    return GameParams(**SEC4_PARAMS)

@pytest.fixture
def sec4_q0() -> InitialState:
    return InitialState(q1=2.0, q2=2.0)

@pytest.fixture
def scenario_data():
    """Returns a factory of raw scenario dicts based on the reference game."""
    def factory(**overrides) -> dict:
        return _merge(SEC4_SCENARIO, overrides)
    return factory

@pytest.fixture
def make_scenario(scenario_data, tmp_path):
    def factory(**overrides) -> Scenario:
        data = scenario_data(**overrides)
        data.setdefault("output", {"dir": str(tmp_path / "out"), "basename": "run"})
        return Scenario.model_validate(data)
    return factory

@pytest.fixture
def drain_stochastic() -> StochasticParams:
    return StochasticParams(
        arrival_mean=0.5,
        service_rate=1.0,
        slot_dt=1.0,
        n_runs=1000,
        seed=0,
        q0=50,
        horizon_slots=120,
    )
