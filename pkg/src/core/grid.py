from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.core.errors import ConfigError

DEFAULT_N_Z = 2001


@dataclass(frozen=True, eq=False)
class Grids:
    z: np.ndarray
    t: np.ndarray | None = None

    @property
    def dz(self) -> float:
        return float(self.z[1] - self.z[0])

    @property
    def dt(self) -> float:
        if self.t is None:
            raise ValueError("no time grid was built")
        return float(self.t[1] - self.t[0])


def build_grid(n_z: int = DEFAULT_N_Z, n_t: int | None = None, t_span: float | None = None) -> Grids:
    """Uniform z grid on [0, 1] and, when requested, a uniform t grid on [0, t_span]."""
    if n_z < 2:
        raise ConfigError(f"n_z must be at least 2, got {n_z}")
    z = np.linspace(0.0, 1.0, n_z)

    if n_t is None and t_span is None:
        return Grids(z=z)
    if n_t is None or t_span is None:
        raise ConfigError("a time grid needs both n_t and t_span")
    if n_t < 2:
        raise ConfigError(f"n_t must be at least 2, got {n_t}")
    if not t_span > 0:
        raise ConfigError(f"t_span must be positive, got {t_span}")
    return Grids(z=z, t=np.linspace(0.0, float(t_span), n_t))
