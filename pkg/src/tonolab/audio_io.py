"""Mono WAV reading/writing and band-limited resampling.

Every downstream stage works on :class:`AudioBuffer` values at a canonical
16 kHz rate; files at other rates are resampled on ingestion. Input WAVs may
be PCM16 or float32, mono or multi-channel (channels are averaged). Output is
always PCM16 mono.
"""
from __future__ import annotations

import logging
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .validation import CANONICAL_RATE, check_rate, check_samples

log = logging.getLogger(__name__)

_PCM16_SCALE = 32768.0


class AudioIOError(Exception):
    """Base class for WAV container problems."""


class UnsupportedAudioError(AudioIOError):
    """The container is valid RIFF/WAVE but uses an encoding we do not read."""


class TruncatedAudioError(AudioIOError):
    """The file ends before the declared chunk data does."""


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    """Immutable mono signal: float64 samples in [-1, 1] plus a sample rate."""

    samples: np.ndarray
    sample_rate: int = CANONICAL_RATE

    def __post_init__(self):
        samples = check_samples(self.samples)
        rate = check_rate(self.sample_rate)
        samples = samples.copy()
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", rate)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_seconds(self) -> float:
        return len(self.samples) / self.sample_rate


def read_wav(path) -> AudioBuffer:
    """Read a RIFF/WAVE file into a normalized mono AudioBuffer.

    PCM16 and float32 encodings are accepted; multi-channel audio is
    downmixed by averaging. Amplitudes outside [-1, 1] are clamped.

    Raises FileNotFoundError, UnsupportedAudioError, or TruncatedAudioError
    depending on what is wrong with the input.
    """
    data = Path(path).read_bytes()
    if len(data) < 12:
        raise TruncatedAudioError(f"{path}: too short to hold a RIFF header")
    if data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise UnsupportedAudioError(f"{path}: not a RIFF/WAVE container")

    fmt = None
    frames = None
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise TruncatedAudioError(
                f"{path}: chunk {cid!r} declares {size} bytes, "
                f"only {len(body)} present"
            )
        if cid == b"fmt ":
            if size < 16:
                raise TruncatedAudioError(f"{path}: fmt chunk too small")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif cid == b"data":
            frames = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt is None or frames is None:
        raise TruncatedAudioError(f"{path}: missing fmt or data chunk")

    audio_format, n_channels, sample_rate, _, _, bits = fmt
    if n_channels < 1:
        raise UnsupportedAudioError(f"{path}: zero channels")

    if audio_format == 1 and bits == 16:
        raw = np.frombuffer(frames, dtype="<i2")
        samples = raw.astype(np.float64) / _PCM16_SCALE
    elif audio_format == 3 and bits == 32:
        samples = np.frombuffer(frames, dtype="<f4").astype(np.float64)
    else:
        raise UnsupportedAudioError(
            f"{path}: unsupported encoding (format tag {audio_format}, "
            f"{bits}-bit); expected PCM16 or float32"
        )

    if len(samples) % n_channels:
        raise TruncatedAudioError(f"{path}: data chunk ends mid-frame")
    if n_channels > 1:
        samples = samples.reshape(-1, n_channels).mean(axis=1)
    samples = np.clip(samples, -1.0, 1.0)
    return AudioBuffer(samples, sample_rate)


def write_wav(path, buf: AudioBuffer) -> None:
    """Write an AudioBuffer as PCM16 little-endian mono WAV.

    Samples outside [-1, 1] are clamped; the clamp count is logged as a
    warning rather than raised, since overlap-add output can transiently
    overshoot.
    """
    if len(buf) == 0:
        raise ValueError("refusing to write an empty buffer")
    samples = buf.samples
    n_clamped = int(np.count_nonzero((samples < -1.0) | (samples > 1.0)))
    if n_clamped:
        log.warning("%s: clamped %d out-of-range samples", path, n_clamped)
    quantized = np.clip(
        np.rint(np.clip(samples, -1.0, 1.0) * _PCM16_SCALE), -32768, 32767
    ).astype("<i2")
    frames = quantized.tobytes()

    header = b"RIFF"
    header += struct.pack("<I", 36 + len(frames))
    header += b"WAVEfmt "
    header += struct.pack(
        "<IHHIIHH", 16, 1, 1, buf.sample_rate, buf.sample_rate * 2, 2, 16
    )
    header += b"data" + struct.pack("<I", len(frames))
    Path(path).write_bytes(header + frames)


# 64-tap Kaiser-windowed sinc; beta chosen for ~60 dB stopband.
_FILTER_HALF_WIDTH = 32
_KAISER_BETA = 8.6


def resample(buf: AudioBuffer, target_rate: int) -> AudioBuffer:
    """Resample with a windowed-sinc interpolator.

    Output length is round(len * target/source); a pure tone below the lower
    Nyquist frequency survives with ≤1% relative amplitude error.
    """
    target_rate = check_rate(target_rate)
    if target_rate == buf.sample_rate:
        return buf
    src = buf.samples
    ratio = target_rate / buf.sample_rate
    n_out = int(round(len(src) * ratio))
    if n_out == 0 or len(src) == 0:
        return AudioBuffer(np.zeros(0), target_rate)

    cutoff = min(1.0, ratio)  # relative to the source Nyquist
    half = _FILTER_HALF_WIDTH
    padded = np.concatenate([np.zeros(half), src, np.zeros(half + 1)])
    offsets = np.arange(-half + 1, half + 1)

    out = np.empty(n_out)
    block = 32768
    for start in range(0, n_out, block):
        idx = np.arange(start, min(start + block, n_out))
        t = idx / ratio
        base = np.floor(t).astype(np.int64)
        frac = (t - base)[:, None]
        x = offsets[None, :] - frac  # tap position relative to ideal center
        taps = cutoff * np.sinc(cutoff * x) * _kaiser(x / half)
        gather = padded[base[:, None] + offsets[None, :] + half]
        out[idx] = np.sum(taps * gather, axis=1)

    return AudioBuffer(np.clip(out, -1.0, 1.0), target_rate)


def _kaiser(x: np.ndarray) -> np.ndarray:
    inside = np.clip(1.0 - x * x, 0.0, None)
    return np.i0(_KAISER_BETA * np.sqrt(inside)) / np.i0(_KAISER_BETA)


def ensure_canonical(buf: AudioBuffer) -> AudioBuffer:
    """Return ``buf`` at the canonical pipeline rate, resampling if needed."""
    return resample(buf, CANONICAL_RATE)
