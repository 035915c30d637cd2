"""Autocorrelation f0 tracking, voicing decisions, and glottal epoch marking.

The tracker is deliberately plain: normalized autocorrelation per frame,
parabolic lag refinement, and a continuity pass that damps octave jumps.
Epochs are placed at low-pass-filtered waveform peaks spaced by the local
period, which is what the overlap-add resynthesis anchors on.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import butter, filtfilt

from .audio_io import AudioBuffer
from .validation import check_audio, check_in_unit_interval

UNVOICED_EPOCH_SPACING = 0.010  # standard OLA mark spacing for unvoiced spans

# Keep candidate peaks at least this strong relative to the best one so the
# continuity pass has alternatives to re-select.
_CANDIDATE_FLOOR = 0.5

# After bias correction the ACF peaks at k*T0 are all near 1.0 for a clean
# periodic signal; a small per-octave penalty keeps T0 ahead of its multiples.
_OCTAVE_COST = 0.01


@dataclass(frozen=True)
class PitchParams:
    """Analysis settings; defaults follow common speech-analysis practice."""

    floor: float = 75.0
    ceiling: float = 500.0
    frame_length: float = 0.040
    hop: float = 0.010
    voicing_threshold: float = 0.45

    def __post_init__(self):
        if not 0 < self.floor < self.ceiling:
            raise ValueError(
                f"need 0 < floor < ceiling, got {self.floor}, {self.ceiling}"
            )
        if self.frame_length < 2.0 / self.floor:
            raise ValueError(
                f"frame_length {self.frame_length}s holds less than two "
                f"periods of the {self.floor} Hz floor"
            )
        if not 0 < self.hop <= self.frame_length:
            raise ValueError(f"need 0 < hop <= frame_length, got {self.hop}")
        check_in_unit_interval("voicing_threshold", self.voicing_threshold)


DEFAULT_PARAMS = PitchParams()


@dataclass(frozen=True, eq=False)
class PitchTrack:
    """Per-frame f0 (NaN where unvoiced) with frame times and periodicity."""

    times: np.ndarray
    f0: np.ndarray
    periodicity: np.ndarray
    hop: float

    def __post_init__(self):
        for name in ("times", "f0", "periodicity"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if not (len(self.times) == len(self.f0) == len(self.periodicity)):
            raise ValueError("track arrays must have equal length")

    def __len__(self) -> int:
        return len(self.times)

    @property
    def voiced(self) -> np.ndarray:
        return np.isfinite(self.f0)

    @property
    def voiced_fraction(self) -> float:
        return float(np.mean(self.voiced)) if len(self) else 0.0

    def to_csv(self) -> str:
        """Diagnostic CSV: time, f0 (blank when unvoiced), periodicity."""
        lines = ["time,f0,periodicity"]
        for t, f, p in zip(self.times, self.f0, self.periodicity):
            f_str = f"{f:.3f}" if np.isfinite(f) else ""
            lines.append(f"{t:.4f},{f_str},{p:.4f}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class EpochSequence:
    """Pulse-synchronous anchor points: sample indices plus voicing tags."""

    instants: np.ndarray
    voiced: np.ndarray

    def __post_init__(self):
        instants = np.asarray(self.instants, dtype=np.int64)
        voiced = np.asarray(self.voiced, dtype=bool)
        if len(instants) != len(voiced):
            raise ValueError("instants and voiced tags must align")
        if len(instants) > 1 and np.any(np.diff(instants) <= 0):
            raise ValueError("epoch instants must be strictly increasing")
        instants.flags.writeable = False
        voiced.flags.writeable = False
        object.__setattr__(self, "instants", instants)
        object.__setattr__(self, "voiced", voiced)

    def __len__(self) -> int:
        return len(self.instants)


def estimate_f0(buf: AudioBuffer, params: PitchParams = DEFAULT_PARAMS) -> PitchTrack:
    """Track f0 with one frame per hop.

    A frame is voiced iff its strongest normalized autocorrelation peak in
    the [floor, ceiling] lag range reaches the voicing threshold. The lag is
    refined by parabolic interpolation. A continuity pass re-selects the
    candidate nearest the previous voiced f0 when the best one jumps by more
    than 40%.
    """
    check_audio(buf)
    rate = buf.sample_rate
    frame_len = int(round(params.frame_length * rate))
    hop = int(round(params.hop * rate))
    x = buf.samples
    if len(x) < frame_len:
        raise ValueError(
            f"buffer ({len(x)} samples) shorter than one analysis frame "
            f"({frame_len} samples)"
        )

    min_lag = max(2, int(np.floor(rate / params.ceiling)))
    max_lag = min(frame_len - 2, int(np.ceil(rate / params.floor)))

    n_frames = (len(x) - frame_len) // hop + 1
    times = (np.arange(n_frames) * hop + frame_len / 2) / rate
    f0 = np.full(n_frames, np.nan)
    periodicity = np.zeros(n_frames)
    candidates: list[list[tuple[float, float]]] = []  # (strength, f0) per frame

    n_fft = 1 << int(np.ceil(np.log2(2 * frame_len)))
    for i in range(n_frames):
        frame = x[i * hop : i * hop + frame_len]
        frame = frame - frame.mean()
        r0 = float(np.dot(frame, frame))
        if r0 < 1e-12:
            candidates.append([])
            continue
        spec = np.fft.rfft(frame, n_fft)
        acf = np.fft.irfft(spec * np.conj(spec))[: max_lag + 2]
        # correct the shrinking-overlap bias so strengths are comparable
        norm = acf / r0 * (frame_len / (frame_len - np.arange(len(acf))))
        cands = _peak_candidates(norm, min_lag, max_lag, rate)
        candidates.append(cands)
        if cands and cands[0][0] >= params.voicing_threshold:
            strength, hz = cands[0]
            f0[i] = hz
            periodicity[i] = min(strength, 1.0)
        elif cands:
            periodicity[i] = max(0.0, min(cands[0][0], 1.0))

    _suppress_octave_jumps(f0, periodicity, candidates, params)
    f0 = np.clip(f0, params.floor, params.ceiling)  # NaN passes through
    return PitchTrack(times=times, f0=f0, periodicity=periodicity, hop=params.hop)


def _peak_candidates(norm, min_lag, max_lag, rate):
    """Local ACF maxima in the admissible lag range, best first."""
    seg = norm[min_lag : max_lag + 1]
    if len(seg) < 3:
        return []
    interior = (seg[1:-1] > seg[:-2]) & (seg[1:-1] >= seg[2:])
    lags = np.nonzero(interior)[0] + min_lag + 1
    if len(lags) == 0:
        return []
    out = []
    best = float(np.max(norm[lags]))
    for lag in lags:
        value = float(norm[lag])
        if value < best * _CANDIDATE_FLOOR:
            continue
        lm, l0, lp = norm[lag - 1], norm[lag], norm[lag + 1]
        denom = lm - 2 * l0 + lp
        shift = 0.5 * (lm - lp) / denom if abs(denom) > 1e-12 else 0.0
        shift = float(np.clip(shift, -0.5, 0.5))
        score = value - _OCTAVE_COST * np.log2(lag / min_lag)
        out.append((score, value, rate / (lag + shift)))
    out.sort(key=lambda c: -c[0])
    return [(value, hz) for _, value, hz in out[:5]]


def _suppress_octave_jumps(f0, periodicity, candidates, params):
    prev = np.nan
    for i in range(len(f0)):
        if not np.isfinite(f0[i]):
            continue
        if np.isfinite(prev) and abs(f0[i] - prev) / prev > 0.40:
            for strength, hz in candidates[i][1:]:
                if abs(hz - prev) / prev <= 0.20 and strength >= params.voicing_threshold:
                    f0[i] = hz
                    periodicity[i] = min(strength, 1.0)
                    break
        prev = f0[i]


def mean_f0(track: PitchTrack) -> float | None:
    """Arithmetic mean over voiced frames; None when nothing is voiced."""
    voiced = track.f0[track.voiced]
    if len(voiced) == 0:
        return None
    return float(np.mean(voiced))


def detect_epochs(
    buf: AudioBuffer,
    track: PitchTrack,
    params: PitchParams = DEFAULT_PARAMS,
) -> EpochSequence:
    """Mark glottal-pulse instants.

    Voiced spans get peaks of the low-pass-filtered waveform spaced by the
    local period; unvoiced spans get uniform marks every 10 ms.
    """
    check_audio(buf)
    rate = buf.sample_rate
    n = len(buf)
    expected_span = track.times[-1] + track.hop if len(track) else 0.0
    if len(track) == 0 or expected_span > buf.duration_seconds + track.hop:
        raise ValueError("pitch track does not match the buffer length")

    mask = _sample_voicing_mask(track, n, rate)
    filtered = _pulse_band(buf.samples, rate, params)
    f0_of = _f0_interpolator(track, params)

    min_gap = max(1, int(np.floor(rate / params.ceiling)))
    max_gap = int(np.ceil(rate / params.floor))
    unvoiced_step = max(1, int(round(UNVOICED_EPOCH_SPACING * rate)))

    instants: list[int] = []
    voiced_tags: list[bool] = []
    for start, end, is_voiced in _runs(mask):
        if not is_voiced:
            marks = range(start, end, unvoiced_step)
            instants.extend(marks)
            voiced_tags.extend([False] * len(marks))
            continue
        seg = filtered[start:end]
        if len(seg) < min_gap + 2:
            continue
        if -seg.min() > seg.max():  # march on the dominant pulse polarity
            seg = -seg
        period0 = int(round(rate / f0_of((start + min_gap) / rate)))
        pos = int(np.argmax(seg[: min(len(seg), period0 + 1)]))
        instants.append(start + pos)
        voiced_tags.append(True)
        while True:
            period = int(round(rate / f0_of((start + pos) / rate)))
            period = min(max(period, min_gap), max_gap)
            lo = max(pos + max(min_gap, period - period // 4), pos + 1)
            hi = min(pos + min(max_gap, period + period // 4), len(seg) - 1)
            if lo > hi:
                break
            pos = lo + int(np.argmax(seg[lo : hi + 1]))
            instants.append(start + pos)
            voiced_tags.append(True)

    order = np.argsort(instants, kind="stable")
    inst = np.asarray(instants, dtype=np.int64)[order]
    tags = np.asarray(voiced_tags, dtype=bool)[order]
    keep = np.concatenate([[True], np.diff(inst) > 0])
    return EpochSequence(instants=inst[keep], voiced=tags[keep])


def _pulse_band(x: np.ndarray, rate: int, params: PitchParams) -> np.ndarray:
    """Zero-phase low-pass keeping the first few harmonics."""
    cutoff = min(1.6 * params.ceiling, 0.45 * rate)
    b, a = butter(4, cutoff / (rate / 2))
    if len(x) <= 3 * max(len(a), len(b)):
        return x.astype(np.float64)
    return filtfilt(b, a, x)


def _sample_voicing_mask(track: PitchTrack, n: int, rate: int) -> np.ndarray:
    """Nearest-frame voicing decision for every sample."""
    if len(track) == 0:
        return np.zeros(n, dtype=bool)
    sample_times = np.arange(n) / rate
    idx = np.clip(
        np.round((sample_times - track.times[0]) / track.hop).astype(int),
        0,
        len(track) - 1,
    )
    return track.voiced[idx]


def _f0_interpolator(track: PitchTrack, params: PitchParams):
    voiced = track.voiced
    if not np.any(voiced):
        fallback = float(np.sqrt(params.floor * params.ceiling))
        return lambda t: fallback
    vt = track.times[voiced]
    vf = track.f0[voiced]

    def f0_of(t: float) -> float:
        return float(np.interp(t, vt, vf))

    return f0_of


def _runs(mask: np.ndarray):
    """Yield (start, end, value) for maximal constant runs of a bool mask."""
    if len(mask) == 0:
        return
    changes = np.nonzero(np.diff(mask))[0] + 1
    bounds = np.concatenate([[0], changes, [len(mask)]])
    for a, b in zip(bounds[:-1], bounds[1:]):
        yield int(a), int(b), bool(mask[a])
