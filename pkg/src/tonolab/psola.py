"""Time-domain pitch-synchronous overlap-add resynthesis.

Voiced stretches are cut into Hann-windowed grains two local periods wide,
centered on detected epochs, and re-placed at the spacing dictated by a
target contour; unvoiced stretches pass through untouched. Flattening an
utterance onto its own mean f0 is the constant-contour special case.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .audio_io import AudioBuffer
from .pitch import (
    DEFAULT_PARAMS,
    EpochSequence,
    PitchParams,
    PitchTrack,
    _runs,
    _sample_voicing_mask,
    detect_epochs,
    estimate_f0,
    mean_f0,
)
from .validation import check_audio

_CROSSFADE_SECONDS = 0.005  # voiced/unvoiced seam smoothing
_MIN_WINDOW_MASS = 0.2      # below this, skip overlap normalization


class TargetContour:
    """Target f0 as a function of time: constant or piecewise-linear."""

    def __init__(self, breakpoints):
        pts = [(float(t), float(hz)) for t, hz in breakpoints]
        if not pts:
            raise ValueError("a contour needs at least one breakpoint")
        times = [t for t, _ in pts]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("breakpoint times must be strictly increasing")
        if any(hz <= 0 for _, hz in pts):
            raise ValueError("target f0 values must be positive")
        self.breakpoints = tuple(pts)

    @classmethod
    def constant(cls, hz: float) -> "TargetContour":
        return cls([(0.0, hz)])

    @property
    def is_constant(self) -> bool:
        return len(self.breakpoints) == 1

    def value_at(self, t: float) -> float:
        times = np.array([p[0] for p in self.breakpoints])
        values = np.array([p[1] for p in self.breakpoints])
        return float(np.interp(t, times, values))

    def check_admissible(self, params: PitchParams) -> None:
        lo, hi = params.floor / 2.0, params.ceiling * 2.0
        for _, hz in self.breakpoints:
            if not lo <= hz <= hi:
                raise ValueError(
                    f"target {hz:.1f} Hz outside admissible range "
                    f"[{lo:.1f}, {hi:.1f}] Hz"
                )


@dataclass(frozen=True)
class FlattenDiagnostics:
    """Per-utterance facts the batch runner logs as JSONL."""

    mean_f0: float | None
    voiced_fraction: float
    clamped_samples: int
    passthrough: bool

    def to_record(self) -> dict:
        return {
            "mean_f0": self.mean_f0,
            "voiced_fraction": self.voiced_fraction,
            "clamped_samples": self.clamped_samples,
            "passthrough": self.passthrough,
        }


def resynthesize(
    buf: AudioBuffer,
    epochs: EpochSequence,
    track: PitchTrack,
    target: TargetContour,
    params: PitchParams = DEFAULT_PARAMS,
) -> AudioBuffer:
    """Map an utterance onto a target f0 contour; see module docstring."""
    samples, _ = _resynthesize_raw(buf, epochs, track, target, params)
    return AudioBuffer(samples, buf.sample_rate)


def _resynthesize_raw(buf, epochs, track, target, params):
    check_audio(buf)
    if len(epochs) == 0:
        raise ValueError("empty epoch sequence")
    target.check_admissible(params)

    rate = buf.sample_rate
    x = buf.samples
    n = len(x)
    out = x.copy()
    mask = _sample_voicing_mask(track, n, rate)
    fade = max(1, int(round(_CROSSFADE_SECONDS * rate)))

    voiced_idx = epochs.instants[epochs.voiced]
    for start, end, is_voiced in _runs(mask):
        if not is_voiced:
            continue
        region = _render_voiced_region(
            x, voiced_idx, track, target, rate, start, end
        )
        if region is None:
            continue
        out[start:end] = region
        _crossfade(out, x, start, end, fade)

    clamped = int(np.count_nonzero((out < -1.0) | (out > 1.0)))
    return np.clip(out, -1.0, 1.0), clamped


def _render_voiced_region(x, voiced_idx, track, target, rate, start, end):
    src = voiced_idx[(voiced_idx >= start) & (voiced_idx < end)]
    if len(src) < 2:
        return None

    gaps = np.diff(src).astype(np.float64)
    # local source period at each epoch, from neighbor gaps
    left = np.concatenate([[gaps[0]], gaps])
    right = np.concatenate([gaps, [gaps[-1]]])
    periods = np.minimum(left, right)

    length = end - start
    acc = np.zeros(length)
    wsum = np.zeros(length)

    # place output epochs by integrating the target period left to right
    pos = float(src[0])
    while pos < end:
        t_period = rate / target.value_at(pos / rate)
        center = int(round(pos))
        i = int(np.argmin(np.abs(src - center)))
        half = max(2, int(round(periods[i])))
        grain_lo = src[i] - half
        grain_hi = src[i] + half
        window = np.hanning(2 * half + 1)
        seg = np.zeros(2 * half + 1)
        lo_clip = max(grain_lo, 0)
        hi_clip = min(grain_hi + 1, len(x))
        seg[lo_clip - grain_lo : hi_clip - grain_lo] = x[lo_clip:hi_clip]
        seg = seg * window

        out_lo = center - half - start
        a = max(out_lo, 0)
        b = min(out_lo + 2 * half + 1, length)
        if a < b:
            acc[a:b] += seg[a - out_lo : b - out_lo]
            wsum[a:b] += window[a - out_lo : b - out_lo]
        pos += t_period

    strong = wsum > _MIN_WINDOW_MASS
    acc[strong] /= wsum[strong]
    return acc


def _crossfade(out, original, start, end, fade):
    """Linear blend with the untouched signal at region edges."""
    n = min(fade, end - start)
    if n <= 0:
        return
    ramp = np.linspace(0.0, 1.0, n, endpoint=False)
    out[start : start + n] = (
        original[start : start + n] * (1 - ramp) + out[start : start + n] * ramp
    )
    out[end - n : end] = (
        original[end - n : end] * ramp + out[end - n : end] * (1 - ramp)
    )


def flatten_pitch(
    buf: AudioBuffer, params: PitchParams = DEFAULT_PARAMS
) -> tuple[AudioBuffer, FlattenDiagnostics]:
    """Replace the utterance's f0 contour with its voiced-frame mean.

    Utterances with no voiced frames are returned unchanged with the
    passthrough flag set.
    """
    track = estimate_f0(buf, params)
    mean = mean_f0(track)
    if mean is None:
        diag = FlattenDiagnostics(
            mean_f0=None,
            voiced_fraction=track.voiced_fraction,
            clamped_samples=0,
            passthrough=True,
        )
        return buf, diag
    epochs = detect_epochs(buf, track, params)
    samples, clamped = _resynthesize_raw(
        buf, epochs, track, TargetContour.constant(mean), params
    )
    diag = FlattenDiagnostics(
        mean_f0=mean,
        voiced_fraction=track.voiced_fraction,
        clamped_samples=clamped,
        passthrough=False,
    )
    return AudioBuffer(samples, buf.sample_rate), diag


class PitchFlattener(BaseEstimator, TransformerMixin):
    """Stateless transformer flattening each buffer onto its own mean f0.

    Parameters mirror :class:`PitchParams`. ``transform`` maps a sequence of
    :class:`AudioBuffer` to flattened buffers; diagnostics for the last call
    are kept on ``diagnostics_``.
    """

    def __init__(
        self,
        floor: float = 75.0,
        ceiling: float = 500.0,
        frame_length: float = 0.040,
        hop: float = 0.010,
        voicing_threshold: float = 0.45,
    ):
        self.floor = floor
        self.ceiling = ceiling
        self.frame_length = frame_length
        self.hop = hop
        self.voicing_threshold = voicing_threshold

    def _params(self) -> PitchParams:
        return PitchParams(
            floor=self.floor,
            ceiling=self.ceiling,
            frame_length=self.frame_length,
            hop=self.hop,
            voicing_threshold=self.voicing_threshold,
        )

    def fit(self, X=None, y=None):
        self._params()  # parameter sanity only; nothing is learned
        return self

    def transform(self, X) -> list[AudioBuffer]:
        params = self._params()
        flattened = []
        diagnostics = []
        for buf in X:
            out, diag = flatten_pitch(buf, params)
            flattened.append(out)
            diagnostics.append(diag)
        self.diagnostics_ = diagnostics
        return flattened
