"""Energy transmissions and centroid delays of pulse traces."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

CLIP_FRACTION = 1e-4


@dataclass(frozen=True)
class PulseMetrics:
    T_p: float
    T_s: float
    delay_p: float
    delay_s: float


def _energy(t: np.ndarray, trace: np.ndarray) -> float:
    return float(np.trapezoid(np.abs(trace) ** 2, t))


def _centroid(t: np.ndarray, trace: np.ndarray) -> float:
    intensity = np.abs(trace) ** 2
    return float(np.trapezoid(t * intensity, t) / np.trapezoid(intensity, t))


def _warn_if_clipped(name: str, trace: np.ndarray) -> None:
    intensity = np.abs(trace) ** 2
    peak = intensity.max()
    if peak > 0 and max(intensity[0], intensity[-1]) > CLIP_FRACTION * peak:
        logger.warning(
            "%s trace is clipped: edge intensity %.3g of peak (> %g); widen the time window",
            name,
            max(intensity[0], intensity[-1]) / peak,
            CLIP_FRACTION,
        )


def trace_metrics(
    t: np.ndarray,
    input_probe: np.ndarray,
    output_probe: np.ndarray,
    output_signal: np.ndarray,
) -> PulseMetrics:
    """T = ∫|Ω(L,t)|²dt / ∫|Ω_p(0,t)|²dt; delay = output centroid − input centroid.

    A silent output (zero energy) gets zero transmission and zero delay.
    """
    for name, trace in (("input probe", input_probe), ("output probe", output_probe), ("output signal", output_signal)):
        _warn_if_clipped(name, trace)

    e_in = _energy(t, input_probe)
    if e_in == 0.0:
        logger.info("input pulse carries no energy; reporting zero transmissions")
        return PulseMetrics(0.0, 0.0, 0.0, 0.0)

    t_in = _centroid(t, input_probe)
    e_p = _energy(t, output_probe)
    e_s = _energy(t, output_signal)
    delay_p = _centroid(t, output_probe) - t_in if e_p > 0 else 0.0
    delay_s = _centroid(t, output_signal) - t_in if e_s > 0 else 0.0
    return PulseMetrics(T_p=e_p / e_in, T_s=e_s / e_in, delay_p=delay_p, delay_s=delay_s)


def pulse_metrics(result) -> PulseMetrics:
    """Recompute (T_p, T_s, delay_p, delay_s) from a PulseResult's traces."""
    return trace_metrics(result.t_grid, result.input_probe, result.output_probe, result.output_signal)
