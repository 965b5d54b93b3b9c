"""Experiment configuration files.

Configurations are INI text with the sections [region], [server_types],
[combos], [objective], [episode], [converter] and [rl]. Server type rows
read `type_id = count, arrival_rate, combo_type`; combination rows read
`combo_id = demand:probability:duration; ...`. Fractions may be written as
`a/b`. Unknown sections and keys are rejected.
"""

from __future__ import annotations

import configparser
import logging
from collections.abc import Callable
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Final

from .exception_classes import RasConfigError, RasParserError
from .models.config import (
    AgentParams,
    ConverterParams,
    CurriculumParams,
    EpisodeConfig,
    ExperimentConfig,
    ObjectiveConfig,
    RegionConfig,
    RewardParams,
)
from .models.request import ComboEntry, ComboSpec
from .models.topology import ServerTypeSpec

_LOGGER: Final = logging.getLogger(__name__)

REFERENCE_CONFIG: Final[str] = "reference.ini"

REGION_KEYS: Final[dict[str, type]] = {
    "num_dcs": int,
    "num_msbs": int,
    "num_racks": int,
    "num_reservations": int,
    "num_servers": int,
    "rru": int,
    "movement_cost": int,
}
OBJECTIVE_KEYS: Final[dict[str, type]] = {
    "alpha_msb": Fraction,
    "alpha_rack": Fraction,
    "kappa": float,
    "beta": float,
    "affinity": float,
    "theta": float,
}
EPISODE_KEYS: Final[dict[str, type]] = {
    "horizon": int,
    "lookahead": int,
    "seed": int,
}
CONVERTER_KEYS: Final[dict[str, type]] = {
    "zeta": float,
    "omega": float,
    "action_low": float,
    "action_high": float,
}
RL_KEYS: Final[dict[str, type]] = {
    "hidden_sizes": tuple,
    "log_std_init": float,
    "clip_ratio": float,
    "gae_lambda": float,
    "learning_rate": float,
    "epochs": int,
    "minibatch_size": int,
    "update_every": int,
    "episodes": int,
    "reward_weights": tuple,
    "redundancy_penalty": float,
    "affinity_penalties": tuple,
    "gamma": float,
    "curriculum_window": int,
    "curriculum_patience": int,
    "curriculum_tolerance": float,
    "curriculum_start_stage": int,
}
REQUIRED_SECTIONS: Final[dict[str, tuple[str, ...]]] = {
    "region": tuple(REGION_KEYS),
    "server_types": (),
    "combos": (),
    "objective": tuple(OBJECTIVE_KEYS),
    "episode": ("horizon",),
}
OPTIONAL_SECTIONS: Final[tuple[str, ...]] = ("converter", "rl")

_RL_FIELDS: Final[dict[str, tuple[str, str]]] = {
    "hidden_sizes": ("agent", "hidden_sizes"),
    "log_std_init": ("agent", "log_std_init"),
    "clip_ratio": ("agent", "clip_ratio"),
    "gae_lambda": ("agent", "gae_lambda"),
    "learning_rate": ("agent", "learning_rate"),
    "epochs": ("agent", "epochs"),
    "minibatch_size": ("agent", "minibatch_size"),
    "update_every": ("agent", "update_every"),
    "episodes": ("agent", "episodes"),
    "reward_weights": ("reward", "weights"),
    "redundancy_penalty": ("reward", "redundancy_penalty"),
    "affinity_penalties": ("reward", "affinity_penalties"),
    "gamma": ("reward", "gamma"),
    "curriculum_window": ("curriculum", "window"),
    "curriculum_patience": ("curriculum", "patience"),
    "curriculum_tolerance": ("curriculum", "tolerance"),
    "curriculum_start_stage": ("curriculum", "start_stage"),
}
_TUPLE_ITEMS: Final[dict[str, Callable[[str], Any]]] = {
    "hidden_sizes": int,
    "reward_weights": float,
    "affinity_penalties": float,
}


def _convert(section: str, key: str, raw: str, kind: type) -> Any:
    """Convert one raw value, naming the key on failure."""
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is Fraction:
            return Fraction(raw.replace(" ", ""))
        if kind is tuple:
            return tuple(_TUPLE_ITEMS[key](item) for item in raw.split(","))
    except (ValueError, ZeroDivisionError) as err:
        expected = "comma separated list" if kind is tuple else kind.__name__
        raise RasConfigError(
            f"[{section}] {key} must be {expected}, got '{raw}'"
        ) from err
    raise RasConfigError(f"Unsupported type for [{section}] {key}")


class ConfigFileParser:
    """Reads ExperimentConfig objects from INI text.

    Attributes:
        text: Configuration text.
        source: Where the text came from, used in messages.
    """

    def __init__(self, text: str, source: str = "<string>") -> None:
        self.text = text
        self.source = source

    def parse(self) -> ExperimentConfig:
        """Parse the text into an ExperimentConfig.

        Raises:
            RasConfigError: If a section or key is missing, unknown or
                ill-typed, or the values are inconsistent.
        """
        ini = configparser.ConfigParser(
            interpolation=None, inline_comment_prefixes=("#",)
        )
        ini.optionxform = str  # type: ignore[assignment,method-assign]
        try:
            ini.read_string(self.text, source=self.source)
        except configparser.Error as err:
            raise RasConfigError(
                f"Malformed configuration {self.source}: {err}"
            ) from err

        self._check_sections(ini)
        try:
            config = ExperimentConfig(
                region=self._region(ini),
                objective=ObjectiveConfig(
                    **self._typed(ini, "objective", OBJECTIVE_KEYS, required=True)
                ),
                episode=EpisodeConfig(
                    **self._typed(ini, "episode", EPISODE_KEYS, required=False)
                ),
                converter=ConverterParams(
                    **self._typed(ini, "converter", CONVERTER_KEYS, required=False)
                ),
                **self._rl(ini),
            )
        except (TypeError, ValueError) as err:
            raise RasConfigError(f"Invalid configuration {self.source}: {err}") from err
        _LOGGER.debug("Parsed configuration from %s", self.source)
        return config

    def _check_sections(self, ini: configparser.ConfigParser) -> None:
        missing = [name for name in REQUIRED_SECTIONS if not ini.has_section(name)]
        if missing:
            details = "; ".join(
                f"[{name}] {', '.join(REQUIRED_SECTIONS[name]) or '<rows>'}"
                for name in missing
            )
            raise RasConfigError(f"Missing required keys: {details}")
        known = set(REQUIRED_SECTIONS) | set(OPTIONAL_SECTIONS)
        unknown = [name for name in ini.sections() if name not in known]
        if unknown:
            raise RasConfigError(f"Unknown sections: {', '.join(unknown)}")

    def _typed(
        self,
        ini: configparser.ConfigParser,
        section: str,
        keys: dict[str, type],
        required: bool,
    ) -> dict[str, Any]:
        if not ini.has_section(section):
            return {}
        values = dict(ini.items(section))
        unknown = sorted(set(values) - set(keys))
        if unknown:
            raise RasConfigError(f"Unknown keys in [{section}]: {', '.join(unknown)}")
        needed = REQUIRED_SECTIONS.get(section, ()) if not required else tuple(keys)
        missing = [key for key in needed if key not in values]
        if missing:
            raise RasConfigError(
                f"Missing required keys in [{section}]: {', '.join(missing)}"
            )
        return {
            key: _convert(section, key, raw, keys[key]) for key, raw in values.items()
        }

    def _region(self, ini: configparser.ConfigParser) -> RegionConfig:
        region = self._typed(ini, "region", REGION_KEYS, required=True)
        types = []
        for key, raw in ini.items("server_types"):
            parts = [part.strip() for part in raw.split(",")]
            if len(parts) != 3:
                raise RasConfigError(
                    f"[server_types] {key} must be 'count, arrival_rate, combo_type', "
                    f"got '{raw}'"
                )
            types.append(
                ServerTypeSpec(
                    type_id=_convert("server_types", "type_id", key, int),
                    count=_convert("server_types", key, parts[0], int),
                    mean_arrival_rate=_convert("server_types", key, parts[1], float),
                    combo_type=_convert("server_types", key, parts[2], int),
                )
            )
        combos = []
        for position, (key, raw) in enumerate(ini.items("combos")):
            if _convert("combos", "combo_id", key, int) != position:
                raise RasConfigError(
                    f"[combos] ids must be 0, 1, ... in order, got {key}"
                )
            entries = []
            for item in raw.split(";"):
                fields = item.strip().split(":")
                if len(fields) != 3:
                    raise RasConfigError(
                        f"[combos] {key} entries must be 'demand:probability:duration',"
                        f" got '{item.strip()}'"
                    )
                entries.append(
                    ComboEntry(
                        demand=_convert("combos", key, fields[0], int),
                        probability=_convert("combos", key, fields[1], float),
                        duration=_convert("combos", key, fields[2], int),
                    )
                )
            combos.append(ComboSpec(tuple(entries)))
        if not types or not combos:
            raise RasConfigError("[server_types] and [combos] need at least one row")
        return RegionConfig(server_types=tuple(types), combos=tuple(combos), **region)

    def _rl(self, ini: configparser.ConfigParser) -> dict[str, Any]:
        values = self._typed(ini, "rl", RL_KEYS, required=False)
        grouped: dict[str, dict[str, Any]] = {
            "agent": {},
            "reward": {},
            "curriculum": {},
        }
        for key, value in values.items():
            group, name = _RL_FIELDS[key]
            grouped[group][name] = value
        return {
            "agent": AgentParams(**grouped["agent"]),
            "reward": RewardParams(**grouped["reward"]),
            "curriculum": CurriculumParams(**grouped["curriculum"]),
        }


def parse_config_text(text: str, source: str = "<string>") -> ExperimentConfig:
    """Parse configuration text."""
    return ConfigFileParser(text, source).parse()


def parse_config(path: str | Path) -> ExperimentConfig:
    """Read and parse a configuration file.

    Raises:
        RasParserError: If the file cannot be read.
        RasConfigError: If its content is invalid.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise RasParserError(f"Cannot read configuration {path}: {err}") from err
    return parse_config_text(text, str(path))


def load_reference_config() -> ExperimentConfig:
    """The bundled reference experiment configuration."""
    resource = resources.files("pyras").joinpath("data").joinpath(REFERENCE_CONFIG)
    return parse_config_text(resource.read_text(encoding="utf-8"), REFERENCE_CONFIG)


def _fmt(value: Any) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, tuple):
        return ", ".join(_fmt(item) for item in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(config: ExperimentConfig) -> str:
    """Canonical INI text of a configuration; parsing it gives it back."""
    region = config.region
    lines = ["[region]"]
    lines += [f"{key} = {_fmt(getattr(region, key))}" for key in REGION_KEYS]
    lines += ["", "[server_types]"]
    lines += [
        f"{spec.type_id} = {spec.count}, {_fmt(float(spec.mean_arrival_rate))}, "
        f"{spec.combo_type}"
        for spec in region.server_types
    ]
    lines += ["", "[combos]"]
    lines += [
        f"{i} = "
        + "; ".join(
            f"{entry.demand}:{_fmt(float(entry.probability))}:{entry.duration}"
            for entry in combo.entries
        )
        for i, combo in enumerate(region.combos)
    ]
    sections = {
        "objective": (config.objective, OBJECTIVE_KEYS),
        "episode": (config.episode, EPISODE_KEYS),
        "converter": (config.converter, CONVERTER_KEYS),
    }
    for name, (values, keys) in sections.items():
        lines += ["", f"[{name}]"]
        lines += [
            f"{key} = {_fmt(_typed_value(getattr(values, key), keys[key]))}"
            for key in keys
        ]
    lines += ["", "[rl]"]
    for key, (group, name) in _RL_FIELDS.items():
        value = getattr(getattr(config, group), name)
        lines.append(f"{key} = {_fmt(_typed_value(value, RL_KEYS[key]))}")
    return "\n".join(lines) + "\n"


def _typed_value(value: Any, kind: type) -> Any:
    if kind is float:
        return float(value)
    if kind is tuple:
        return tuple(value)
    return value
