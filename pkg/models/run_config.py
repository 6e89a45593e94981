"""
Resolved configuration of one CLI run.
"""

import json
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

from models.errors import ConfigError

DEFAULTS_PATH = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                             'config', 'run_config.json')


def _load(path: str) -> Dict[str, Any]:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            document = json.load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"configuration file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON in configuration file {path}: {e}") from e
    if not isinstance(document, dict):
        raise ConfigError(f"configuration file {path} must hold a JSON object")
    return document


def _section(document: Dict[str, Any], subcommand: str) -> Dict[str, Any]:
    """defaults overlaid with the subcommand section."""
    merged = dict(document.get('defaults', {}))
    merged.update(document.get(subcommand, {}))
    return merged


@dataclass
class RunConfig:
    """
    Everything a subcommand needs; the seed determines every random draw.
    """

    subcommand: str
    n: int = 1
    metric: str = 'svh'
    metric_params: Dict[str, Any] = field(default_factory=dict)
    metric_file: Optional[str] = None
    potential: str = 'harmonic'
    potential_params: Dict[str, Any] = field(default_factory=dict)
    t: float = 5.0
    dt: float = 1e-3
    samples: int = 3
    seed: int = 0
    out: Optional[str] = None
    format: str = 'json'
    phi0: Optional[List[float]] = None
    fiber0: Optional[str] = None
    renorm_interval: float = 1.0
    alpha: Optional[float] = None
    transform_file: Optional[str] = None
    omega: float = 1.0
    n_theta: int = 32

    @classmethod
    def resolve(cls, subcommand: str, flags: Optional[Dict[str, Any]] = None,
                config_path: Optional[str] = None,
                defaults_path: str = DEFAULTS_PATH) -> 'RunConfig':
        """
        Merge configuration sources, later ones winning:
        config/run_config.json, then the --config file, then flags.

        Flags whose value is None are treated as absent.

        Raises:
            ConfigError: unreadable file or unknown key
        """
        values = _section(_load(defaults_path), subcommand)
        if config_path:
            values.update(_section(_load(config_path), subcommand))
        values.update({k: v for k, v in (flags or {}).items() if v is not None})
        values['subcommand'] = subcommand

        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
