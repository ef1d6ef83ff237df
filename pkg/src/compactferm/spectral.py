"""Sampled probability series, their DFT spectra and peak extraction."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
import scipy.signal

__all__ = ["TimeSeries", "Spectrum", "Peak", "fourier_spectrum", "find_peaks",
           "series_csv", "spectrum_csv", "peaks_csv"]


@dataclass
class TimeSeries:
    """Uniformly sampled values; times in eV^-1."""

    times: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape or self.times.ndim != 1:
            raise ValueError("times and values must be 1-D arrays of equal length")
        if np.any(self.values < -1e-12) or np.any(self.values > 1 + 1e-12):
            raise ValueError("probabilities must lie in [0, 1]")

    def __len__(self) -> int:
        return len(self.times)

    @property
    def dt(self) -> float:
        if len(self.times) < 2:
            raise ValueError("need at least two samples")
        steps = np.diff(self.times)
        if np.max(np.abs(steps - steps[0])) > 1e-12 * max(1.0, abs(self.times[-1])):
            raise ValueError("time samples are not uniformly spaced")
        return float(steps[0])


@dataclass
class Spectrum:
    """Two-sided DFT magnitudes, frequencies ascending, in cycles per eV^-1 (= eV)."""

    frequencies: np.ndarray
    amplitudes: np.ndarray
    spacing: float

    def positive(self) -> tuple[np.ndarray, np.ndarray]:
        m = self.frequencies > 0
        return self.frequencies[m], self.amplitudes[m]


@dataclass(frozen=True)
class Peak:
    frequency: float
    error: float

    @property
    def period(self) -> float:
        return 1.0 / self.frequency

    @property
    def period_error(self) -> float:
        return self.error / self.frequency ** 2


def fourier_spectrum(series: TimeSeries, pad_to: int | None = None) -> Spectrum:
    """|DFT| / N of the mean-subtracted series, optionally zero-padded to ``pad_to`` samples."""
    dt = series.dt
    n = len(series)
    size = n if pad_to is None else int(pad_to)
    if size < n:
        raise ValueError("pad_to must not truncate the series")
    x = series.values - series.values.mean()
    amp = np.abs(np.fft.fft(x, n=size)) / n
    freqs = np.fft.fftfreq(size, dt)
    order = np.argsort(freqs, kind="stable")
    return Spectrum(freqs[order], amp[order], 1.0 / (size * dt))


def find_peaks(spectrum: Spectrum, threshold_fraction: float = 0.05) -> list[Peak]:
    """Interior local maxima at f > 0 with amplitude >= ``threshold_fraction`` of the largest."""
    if not 0 < threshold_fraction < 1:
        raise ValueError("threshold_fraction must be in (0, 1)")
    f, a = spectrum.positive()
    if len(f) == 0:
        raise ValueError("spectrum has no positive frequencies")
    top = a.max()
    if top <= 1e-14:
        return []
    idx, _ = scipy.signal.find_peaks(a, height=threshold_fraction * top)
    return [Peak(float(f[i]), spectrum.spacing) for i in idx]


def _writer(buf):
    return csv.writer(buf, lineterminator="\n")


def series_csv(series: TimeSeries, extra: dict[str, np.ndarray] | None = None) -> str:
    buf = io.StringIO()
    w = _writer(buf)
    extra = extra or {}
    w.writerow(["t_eVinv", "probability", *extra])
    for j, (t, v) in enumerate(zip(series.times, series.values)):
        w.writerow([repr(float(t)), repr(float(v)), *(repr(float(col[j])) for col in extra.values())])
    return buf.getvalue()


def spectrum_csv(spectrum: Spectrum) -> str:
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(["frequency_eV", "amplitude"])
    for f, a in zip(spectrum.frequencies, spectrum.amplitudes):
        w.writerow([repr(float(f)), repr(float(a))])
    return buf.getvalue()


def peaks_csv(peaks: list[Peak]) -> str:
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(["frequency_eV", "frequency_err_eV", "period_eVinv", "period_err_eVinv"])
    for p in peaks:
        w.writerow([repr(p.frequency), repr(p.error), repr(p.period), repr(p.period_error)])
    return buf.getvalue()
