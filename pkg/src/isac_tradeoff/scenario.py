"""Scenario configuration: ``key = value`` files, overrides, and object construction.

Keys ending in ``_db`` hold decibel values and are converted to linear
internally. ``snr_db`` is the scenario SNR; ``gamma_p_db``, ``gamma_d_db``
and ``gamma_ps_db`` pin an individual link and otherwise follow ``snr_db``
(including along an SNR sweep).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import CommLink, SlotConfig
from .metrics import MetricConfig
from .montecarlo import McSpec
from .sensing import SPEED_OF_LIGHT, SenseLink


class ConfigError(ValueError):
    """Invalid configuration; the message names the file line or field."""


def _enum(*choices):
    def parse(text):
        if text not in choices:
            raise ValueError(f"expected one of {', '.join(choices)}")
        return text
    parse.__name__ = "enum"
    return parse


def _pilot_mode(text):
    if text == "optimal":
        return text
    val = int(text)
    if val < 1:
        raise ValueError("fixed pilot count must be >= 1")
    return val


def _optional(parse):
    def inner(text):
        return None if text in ("", "none", "auto") else parse(text)
    inner.__name__ = parse.__name__
    return inner


# key -> (parser, default); defaults reproduce the reference simulation set-up
SCHEMA = {
    "L": (int, 14),
    "B": (float, 200e6),
    "sigma1_sq": (float, 2.0),
    "snr_db": (float, 10.0),
    "gamma_p_db": (_optional(float), None),
    "gamma_d_db": (_optional(float), None),
    "gamma_ps_db": (_optional(float), None),
    "A_s": (float, 3.0),
    "sigma2_sq": (float, 1.0),
    "s_rcs": (float, 100.0),
    "d": (float, 100.0),
    "c": (float, SPEED_OF_LIGHT),
    "B_rms": (_optional(float), None),
    "v": (float, 0.0),
    "wavelength": (float, 0.0107),
    "path_loss_mode": (_enum("free_space", "none"), "free_space"),
    "capacity_form": (_enum("canonical", "as_printed"), "canonical"),
    "kappa": (float, 1.0),
    "eta": (float, 0.5),
    "u_c_th": (float, 0.2),
    "u_d_th": (float, 0.2),
    "n_samples": (int, 1_000_000),
    "master_seed": (int, 0),
    "stream_id": (int, 0),
    "workers": (int, 1),
    "axis": (_enum("pilots", "snr"), "pilots"),
    "axis_start": (_optional(float), None),
    "axis_stop": (_optional(float), None),
    "axis_step": (_optional(float), None),
    "pilot_mode": (_pilot_mode, "optimal"),
    "output": (_optional(str), None),
}


def _parse_value(key, text, where):
    if key not in SCHEMA:
        raise ConfigError(f"{where}: unknown key {key!r}")
    parse = SCHEMA[key][0]
    try:
        return parse(text.strip())
    except ValueError as exc:
        raise ConfigError(f"{where}: bad value {text.strip()!r} for {key!r} ({exc})") from None


def parse_config_text(text: str, source: str = "<config>") -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = _parse_value(key, value, f"{source}:{lineno}")
    return values


def parse_override(arg: str) -> tuple[str, object]:
    """Parse a ``--key=value`` command-line override."""
    if not arg.startswith("--") or "=" not in arg:
        raise ConfigError(f"override {arg!r} is not of the form --key=value")
    key, value = arg[2:].split("=", 1)
    return key, _parse_value(key, value, f"override --{key}")


def resolve(file_values: dict | None = None, overrides: dict | None = None) -> dict:
    cfg = {key: default for key, (_, default) in SCHEMA.items()}
    cfg.update(file_values or {})
    cfg.update(overrides or {})
    if cfg["B_rms"] is None:
        cfg["B_rms"] = cfg["B"] / math.sqrt(12.0)
    return cfg


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return "none"
    return str(value)


def dump(cfg: dict) -> str:
    return "".join(f"{key} = {format_value(cfg[key])}\n" for key in SCHEMA)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class Scenario:
    """Validated objects built from a resolved config dict."""

    cfg: dict
    slot: SlotConfig
    comm: CommLink
    sense: SenseLink
    metric: MetricConfig
    mc: McSpec

    @classmethod
    def from_config(cls, cfg: dict, snr_db: float | None = None) -> "Scenario":
        snr = cfg["snr_db"] if snr_db is None else snr_db

        def pick(key):
            return db_to_linear(snr if cfg[key] is None else cfg[key])

        try:
            slot = SlotConfig(cfg["L"], 1, cfg["B"])
            comm = CommLink(cfg["sigma1_sq"], pick("gamma_p_db"), pick("gamma_d_db"))
            sense = SenseLink(
                A_s=cfg["A_s"], sigma2_sq=cfg["sigma2_sq"], s_rcs=cfg["s_rcs"], d=cfg["d"],
                B_rms=cfg["B_rms"], gamma_ps=pick("gamma_ps_db"), c=cfg["c"], v=cfg["v"],
                wavelength=cfg["wavelength"], path_loss=cfg["path_loss_mode"] == "free_space",
            )
            metric = MetricConfig(cfg["kappa"], cfg["eta"], cfg["u_c_th"], cfg["u_d_th"])
            mc = McSpec(cfg["n_samples"], cfg["master_seed"], cfg["stream_id"])
        except ValueError as exc:
            raise ConfigError(f"invalid configuration: {exc}") from None
        if cfg["workers"] < 1:
            raise ConfigError("field 'workers': must be >= 1")
        return cls(cfg, slot, comm, sense, metric, mc)

    def axis_values(self) -> list[float]:
        cfg = self.cfg
        if cfg["axis"] == "pilots":
            start, stop, step = 1.0, float(self.slot.L - 1), 1.0
        else:
            start, stop, step = -5.0, 25.0, 1.0
        start = start if cfg["axis_start"] is None else cfg["axis_start"]
        stop = stop if cfg["axis_stop"] is None else cfg["axis_stop"]
        step = step if cfg["axis_step"] is None else cfg["axis_step"]
        if not step > 0:
            raise ConfigError("field 'axis_step': must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        if count < 1:
            raise ConfigError("axis range is empty")
        values = [start + i * step for i in range(count)]
        if cfg["axis"] == "pilots":
            if any(v != int(v) or not 1 <= v <= self.slot.L - 1 for v in values):
                raise ConfigError(f"pilot axis values must be integers in 1..{self.slot.L - 1}")
            return [int(v) for v in values]
        return values
