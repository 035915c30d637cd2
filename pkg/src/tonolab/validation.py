"""Input validation helpers shared by the signal-processing layers."""
from __future__ import annotations

import numbers

import numpy as np

CANONICAL_RATE = 16000


def check_rate(rate) -> int:
    """Validate a sample rate and return it as an int."""
    if not isinstance(rate, numbers.Integral):
        if isinstance(rate, numbers.Real) and float(rate).is_integer():
            rate = int(rate)
        else:
            raise TypeError(f"sample rate must be an integer, got {rate!r}")
    rate = int(rate)
    if rate <= 0:
        raise ValueError(f"sample rate must be positive, got {rate}")
    return rate


def check_samples(samples) -> np.ndarray:
    """Coerce to a 1-D float64 array of finite values."""
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"expected mono samples (1-D), got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError("samples contain NaN or infinite values")
    return arr


def check_audio(buf, rate: int | None = None):
    """Check that ``buf`` is an AudioBuffer, optionally at a required rate."""
    from .audio_io import AudioBuffer

    if not isinstance(buf, AudioBuffer):
        raise TypeError(f"expected AudioBuffer, got {type(buf).__name__}")
    if rate is not None and buf.sample_rate != rate:
        raise ValueError(
            f"expected sample rate {rate} Hz, got {buf.sample_rate} Hz; "
            "resample on ingestion"
        )
    return buf


def check_in_unit_interval(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie in (0, 1), got {value}")
    return value
