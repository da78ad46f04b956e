"""Run configuration for ``verify``: a flat ``key = value`` text format.

Lists are comma separated.  Per-identity settings use dotted keys, e.g.
``tolerance.thm_f_1_9 = 0.05`` or ``zero_height.lz_1_3 = 10000``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .explicit import IDENTITIES, LOG_2PI


class ConfigError(ValueError):
    """A run configuration violates a precondition."""


# identity -> (compared field, centre, default tolerance); desk-scale observations
THRESHOLDS = {
    "fujii_1_2": ("normalized", 0.0, 1.0),
    "lz_1_3": ("normalized", 0.0, 0.05),
    "granville_1_5": ("normalized", 0.0, 0.5),
    "thm_fq_1_8": ("normalized", 0.0, 2.0),
    "thm_f_1_9": ("normalized", -2 * LOG_2PI, 0.05),
    "psi_chi_2_4": ("normalized", 0.0, 5.0),
    "psi_chi0_2_5": ("normalized", 0.0, 2.0),
    "psi_r_2_7": ("residual", 0.0, 0.01),
}

# identities whose normalized series must not grow monotonically by >25%
GROWTH_CHECKED = ("granville_1_5", "thm_fq_1_8")


def default_cache_dir() -> Path:
    return Path(os.environ.get("GOLDBACH_CACHE", ".cache"))


@dataclass
class RunConfig:
    n_grid: list[float] = field(default_factory=lambda: [1e4])
    q_list: list[int] = field(default_factory=lambda: [1])
    identities: list[str] = field(default_factory=lambda: ["thm_f_1_9"])
    zero_height: dict[str, float] = field(default_factory=dict)
    truncation: int | None = None  # overrides the table size T
    tolerance: dict[str, float] = field(default_factory=dict)
    cache_dir: Path = field(default_factory=default_cache_dir)
    format: str = "csv"

    def validate(self) -> "RunConfig":
        if not self.n_grid:
            raise ConfigError("n_grid is empty")
        for N in self.n_grid:
            if not (math.isfinite(N) and N >= 4):
                raise ConfigError(f"every N must satisfy N >= 4, got {N:g}")
        for q in self.q_list:
            if q < 1:
                raise ConfigError(f"every q must be >= 1, got {q}")
        for tag in [*self.identities, *self.zero_height, *self.tolerance]:
            if tag not in IDENTITIES:
                raise ConfigError(f"unknown identity {tag!r}")
        for tag, h in self.zero_height.items():
            if not h >= 10:
                raise ConfigError(f"zero height for {tag} must be >= 10, got {h}")
        for tag, tol in self.tolerance.items():
            if not tol > 0:
                raise ConfigError(f"tolerance for {tag} must be positive")
        if self.truncation is not None and self.truncation < 4:
            raise ConfigError("truncation must be >= 4")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        return self

    def threshold(self, tag: str) -> tuple[str, float, float]:
        fld, centre, tol = THRESHOLDS[tag]
        return fld, centre, self.tolerance.get(tag, tol)

    # -- file form ----------------------------------------------------------

    def to_text(self) -> str:
        lines = [
            f"n_grid = {', '.join(_num(N) for N in self.n_grid)}",
            f"q_list = {', '.join(str(q) for q in self.q_list)}",
            f"identities = {', '.join(self.identities)}",
        ]
        lines += [f"zero_height.{k} = {_num(v)}" for k, v in sorted(self.zero_height.items())]
        if self.truncation is not None:
            lines.append(f"truncation = {self.truncation}")
        lines += [f"tolerance.{k} = {v!r}" for k, v in sorted(self.tolerance.items())]
        lines += [f"cache_dir = {self.cache_dir}", f"format = {self.format}"]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        cfg = cls()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"line {lineno}: expected key = value")
            cfg = cfg.with_setting(key.strip(), value.strip(), where=f"line {lineno}")
        return cfg

    @classmethod
    def load(cls, path: Path | str) -> "RunConfig":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    def with_setting(self, key: str, value: str, where: str = "") -> "RunConfig":
        """Return a copy with one ``key = value`` setting applied."""
        prefix = f"{where}: " if where else ""
        try:
            if key == "n_grid":
                return replace(self, n_grid=[float(x) for x in _split(value)])
            if key == "q_list":
                return replace(self, q_list=[int(x) for x in _split(value)])
            if key == "identities":
                return replace(self, identities=_split(value))
            if key == "truncation":
                return replace(self, truncation=int(float(value)))
            if key == "cache_dir":
                return replace(self, cache_dir=Path(value))
            if key == "format":
                return replace(self, format=value)
            head, dot, tag = key.partition(".")
            if dot and head == "zero_height":
                return replace(self, zero_height={**self.zero_height, tag: float(value)})
            if dot and head == "tolerance":
                return replace(self, tolerance={**self.tolerance, tag: float(value)})
        except ValueError as exc:
            raise ConfigError(f"{prefix}bad value for {key}: {exc}") from exc
        raise ConfigError(f"{prefix}unknown key {key!r}")


def _split(value: str) -> list[str]:
    return [x.strip() for x in value.split(",") if x.strip()]


def _num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))
