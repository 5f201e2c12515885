"""Spectra, dominant frequencies and circle-plot snapshots."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Spectrum:
    freqs: np.ndarray
    magnitude: np.ndarray
    fs: float
    window: int

    def to_csv(self, path) -> None:
        np.savetxt(path, np.column_stack([self.freqs, self.magnitude]), fmt="%.17g", delimiter=",",
                   header="freq_hz,magnitude", comments="")


def fft_spectrum(x, fs: float, window: int | None = None, taper: str = "rect",
                 remove_mean: bool = True) -> Spectrum:
    """One-sided magnitude spectrum of the last ``window`` samples.

    Magnitudes are |X_k| of the unnormalized DFT, so Parseval reads
    sum|x|^2 = (|X_0|^2 + 2 sum_mid |X_k|^2 + [|X_nyq|^2]) / n.
    """
    x = np.asarray(x, dtype=float)
    n = x.size if window is None else int(window)
    if n > x.size:
        raise ValueError("window longer than series")
    if n < 2:
        raise ValueError("window too short")
    seg = x[-n:].copy()
    if remove_mean:
        seg -= seg.mean()
    if taper == "hann":
        seg *= np.hanning(n)
    elif taper != "rect":
        raise ValueError("taper must be 'rect' or 'hann'")
    X = np.fft.rfft(seg)
    return Spectrum(np.fft.rfftfreq(n, 1.0 / fs), np.abs(X), fs, n)


def parseval_energy(spec: Spectrum) -> float:
    m2 = spec.magnitude ** 2
    n = spec.window
    inner = m2[1:-1] if n % 2 == 0 else m2[1:]
    last = m2[-1] if n % 2 == 0 else 0.0
    return float((m2[0] + 2 * inner.sum() + last) / n)


def dominant_frequency(spec: Spectrum) -> float:
    """Peak non-DC bin refined by a 3-point parabola."""
    mag = spec.magnitude
    if mag.size < 2 or not np.any(mag[1:] > 0):
        raise ValueError("spectrum has no non-DC content")
    k = 1 + int(np.argmax(mag[1:]))
    df = spec.freqs[1] - spec.freqs[0]
    if 1 < k < mag.size - 1:
        a, b, c = mag[k - 1], mag[k], mag[k + 1]
        den = a - 2 * b + c
        shift = 0.5 * (a - c) / den if den != 0 else 0.0
        return float(spec.freqs[k] + shift * df)
    return float(spec.freqs[k])


def harmonic_magnitudes(spec: Spectrum, f0: float, count: int = 5) -> np.ndarray:
    """Spectrum magnitude at the nearest bin to each of the first harmonics."""
    idx = [int(np.argmin(np.abs(spec.freqs - h * f0))) for h in range(1, count + 1)]
    return spec.magnitude[idx]


def pulse_train_harmonics(duty: float, count: int = 5) -> np.ndarray:
    """Relative Fourier amplitudes |sin(pi h D)| / h of a rectangular pulse train."""
    h = np.arange(1, count + 1)
    return np.abs(np.sin(np.pi * h * duty)) / h


def duty_of(s) -> float:
    return float(np.mean(np.asarray(s, dtype=float)))


def circle_snapshot(phases, t: float | None = None, labels=None) -> dict:
    """Unit-circle coordinates of phases wrapped to (-pi, pi]."""
    p = np.asarray(phases, dtype=float)
    w = np.mod(p + np.pi, 2 * np.pi) - np.pi
    w = np.where(w == -np.pi, np.pi, w)
    labels = list(range(p.size)) if labels is None else list(labels)
    return {"t": t, "label": labels, "phase": w, "x": np.cos(w), "y": np.sin(w)}
