# src/services/scenario_service.py
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import ValidationError

from ..exceptions import ScenarioParseError, ScenarioValidationError
from ..schemas import Scenario

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

def _validate(data: Any) -> Scenario:
    try:
        return Scenario.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise ScenarioValidationError(field, first["msg"]) from e

def load_scenario(path: PathLike) -> Scenario:
    """Reads, validates and fills defaults of a JSON scenario file."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ScenarioParseError(e.msg, e.lineno, e.colno) from e
    except UnicodeDecodeError as e:
        raise ScenarioParseError(f"File is not valid UTF-8 (byte offset {e.start})") from e
    except RecursionError as e:
        raise ScenarioParseError("JSON nesting is too deep") from e

    scenario = _validate(data)
    logger.info(f"Loaded scenario '{scenario.name}' from {path}")
    logger.debug(f"Effective scenario: {scenario.model_dump_json()}")
    return scenario

def write_scenario(scenario: Scenario, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(scenario.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path

def apply_overrides(
    scenario: Scenario,
    out: Optional[str] = None,
    svg: bool = False,
    seed: Optional[int] = None,
    dt: Optional[float] = None,
) -> Scenario:
    """Applies command-line overrides and re-validates the result."""
    data: Dict[str, Any] = scenario.model_dump()
    if out is not None:
        data["output"]["dir"] = out
    if svg:
        data["output"]["svg"] = True
    if dt is not None:
        data["simulation"]["dt"] = dt
    if seed is not None:
        if data.get("stochastic") is not None:
            data["stochastic"]["seed"] = seed
        if data["attacker"]["kind"] == "seeded_random":
            data["attacker"]["seed"] = seed
    return _validate(data)
