"""Procedural multi-track synthesis at a toy sample rate.

Each role has its own recipe (harmonic stacks, filtered noise bursts,
envelopes), but all tracks of a set share one tempo factor and key index,
so their amplitude envelopes are statistically dependent: the cross-track
structure a conditional generator can learn.
"""

from __future__ import annotations

import numpy as np

ROLES = ("bass", "guitar", "piano", "drums", "vocal", "other")
ROLE_INDEX = {name: i for i, name in enumerate(ROLES)}

BASE_BEAT_HZ = 2.0  # 120 BPM before the tempo factor
PEAK = 0.9

_CHORD = (0, 4, 7)
_PENTATONIC = (0, 2, 4, 7, 9)


def _root_freq(key_index: int) -> float:
    return 55.0 * 2.0 ** (key_index / 12.0)


def _beat_grid(n: int, sr: int, tempo_factor: float, phase: float = 0.0) -> np.ndarray:
    """Onset sample positions for one pulse per beat."""
    beat = sr / (BASE_BEAT_HZ * tempo_factor)
    first = phase * beat
    return np.arange(first, n, beat)


def _strike_envelope(n: int, onsets: np.ndarray, decay_s: float, sr: int) -> np.ndarray:
    """Vectorized variant: max over per-onset exponential tails."""
    if len(onsets) == 0:
        return np.zeros(n)
    t = np.arange(n)
    starts = onsets.astype(int)
    seg = np.searchsorted(starts, t, side="right") - 1
    valid = seg >= 0
    age = np.where(valid, t - starts[np.clip(seg, 0, None)], 0)
    env = np.where(valid, np.exp(-age / (decay_s * sr)), 0.0)
    return env


def _harmonic_stack(n: int, sr: int, f0: float, amps: np.ndarray, phases: np.ndarray) -> np.ndarray:
    t = np.arange(n) / sr
    sig = np.zeros(n)
    nyquist = sr / 2.0
    for h, (a, ph) in enumerate(zip(amps, phases), start=1):
        f = f0 * h
        if f >= 0.45 * nyquist * 2:  # keep clear of aliasing
            break
        sig += a * np.sin(2 * np.pi * f * t + ph)
    return sig


def _lowpass(x: np.ndarray, alpha: float) -> np.ndarray:
    """One-pole causal lowpass."""
    from scipy.signal import lfilter

    return lfilter([1.0 - alpha], [1.0, -alpha], x)


def _normalize(x: np.ndarray) -> np.ndarray:
    peak = np.abs(x).max()
    if peak > 0:
        x = x * (PEAK / peak)
    return x


def synth_role(role: str, n: int, sr: int, tempo_factor: float, key_index: int,
               rng: np.random.Generator) -> np.ndarray:
    """Render one track; deterministic in (role, n, sr, tempo, key, rng state)."""
    t = np.arange(n) / sr
    root = _root_freq(key_index)
    beats = _beat_grid(n, sr, tempo_factor)

    if role == "bass":
        env = _strike_envelope(n, beats, 0.25 / tempo_factor, sr)
        tone = _harmonic_stack(n, sr, root, np.array([1.0, 0.35, 0.12]), rng.uniform(0, 2 * np.pi, 3))
        sig = env * tone

    elif role == "guitar":
        half = _beat_grid(n, sr, tempo_factor * 2, phase=0.5)
        env = _strike_envelope(n, half, 0.12 / tempo_factor, sr)
        degree = _CHORD[int(rng.integers(len(_CHORD)))]
        f0 = 2 * root * 2 ** (degree / 12.0)
        amps = np.array([1.0, 0.5, 0.25, 0.12, 0.06])
        sig = env * _harmonic_stack(n, sr, f0, amps, rng.uniform(0, 2 * np.pi, 5))

    elif role == "piano":
        twobeat = _beat_grid(n, sr, tempo_factor * 0.5)
        env = _strike_envelope(n, twobeat, 0.6 / tempo_factor, sr)
        sig = np.zeros(n)
        for degree in _CHORD:
            f0 = 4 * root * 2 ** (degree / 12.0)
            sig += _harmonic_stack(n, sr, f0, np.array([1.0, 0.3]), rng.uniform(0, 2 * np.pi, 2))
        sig *= env

    elif role == "drums":
        kick_env = _strike_envelope(n, beats, 0.08, sr)
        hat_env = _strike_envelope(n, _beat_grid(n, sr, tempo_factor * 2, phase=0.5), 0.02, sr)
        noise = rng.standard_normal(n)
        kick = kick_env * (_lowpass(noise, 0.95) * 2.0 + 0.8 * np.sin(2 * np.pi * 55 * t))
        hat = hat_env * np.diff(noise, prepend=0.0)
        sig = kick + 0.5 * hat

    elif role == "vocal":
        notes = _beat_grid(n, sr, tempo_factor * 0.5)
        degrees = rng.choice(_PENTATONIC, size=max(len(notes), 1))
        melody = np.zeros(n)
        bounds = np.concatenate([notes.astype(int), [n]])
        for i in range(len(bounds) - 1):
            lo, hi = bounds[i], bounds[i + 1]
            f0 = 8 * root * 2 ** (degrees[i] / 12.0)
            vib = 1 + 0.01 * np.sin(2 * np.pi * 5.0 * t[lo:hi])
            melody[lo:hi] = np.sin(2 * np.pi * f0 * vib * (t[lo:hi] - t[lo]))
        tremolo = 0.75 + 0.25 * np.sin(2 * np.pi * BASE_BEAT_HZ * tempo_factor * t / 2)
        sig = melody * tremolo

    elif role == "other":
        swell = 0.5 - 0.5 * np.cos(2 * np.pi * BASE_BEAT_HZ * tempo_factor * t / 4)
        sig = np.zeros(n)
        for degree in _CHORD:
            f0 = 2 * root * 2 ** (degree / 12.0)
            sig += _harmonic_stack(n, sr, f0, np.array([0.8, 0.2]), rng.uniform(0, 2 * np.pi, 2))
        sig *= swell

    else:
        raise ValueError(f"unknown role: {role}")

    return _normalize(sig)
