"""Prediction-channel models P(x_p | x) over the pixel alphabet {0..N}.

* switch channel: the prediction is exact with probability 1 - p and the
  value of a wrong reference pixel ``w`` otherwise;
* gaussian channel: the prediction is x plus zero-mean Gaussian noise,
  discretised to unit bins;
* mixture: switch error on top of Gaussian noise on the correct branch.

Also builds the b-bit uniform quantizer used as the prediction bottleneck.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from condcoding.prob import NORM_TOL, Alphabet, DeterministicMap, InvalidArgumentError

BOUNDARY_MODES = ("clip", "renormalize")


@dataclass(frozen=True, eq=False)
class ChannelModel:
    """Row-stochastic matrix; ``matrix[i, j]`` = P(x_p = out_offset + j | x = in_offset + i)."""

    matrix: np.ndarray
    input_alphabet: Alphabet
    output_alphabet: Alphabet

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.float64, copy=True)
        if m.shape != (self.input_alphabet.size, self.output_alphabet.size):
            raise InvalidArgumentError(
                f"channel matrix shape {m.shape} does not match its alphabets"
            )
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise InvalidArgumentError("channel entries must be finite and >= 0")
        row_err = np.max(np.abs(m.sum(axis=1) - 1.0))
        if row_err > NORM_TOL:
            raise InvalidArgumentError(f"channel rows deviate from 1 by {row_err:.3g}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def square(cls, matrix, offset: int = 0) -> "ChannelModel":
        a = Alphabet(offset, np.shape(matrix)[0])
        return cls(matrix, a, a)

    def row(self, x: int) -> np.ndarray:
        return self.matrix[x - self.input_alphabet.offset]


@dataclass(frozen=True)
class SwitchSpec:
    N: int = 255
    p: float = 0.0
    w: int = 0

    def __post_init__(self):
        if self.N < 1:
            raise InvalidArgumentError("N must be >= 1")
        if not 0.0 <= self.p <= 1.0:
            raise InvalidArgumentError(f"p={self.p} outside [0, 1]")
        if not 0 <= self.w <= self.N:
            raise InvalidArgumentError(f"w={self.w} outside [0, {self.N}]")


@dataclass(frozen=True)
class GaussianSpec:
    N: int = 255
    sigma_p: float = 0.0
    boundary_mode: str = "clip"

    def __post_init__(self):
        if self.N < 1:
            raise InvalidArgumentError("N must be >= 1")
        if not (np.isfinite(self.sigma_p) and self.sigma_p >= 0):
            raise InvalidArgumentError(f"sigma_p={self.sigma_p} must be finite and >= 0")
        if self.boundary_mode not in BOUNDARY_MODES:
            raise InvalidArgumentError(
                f"boundary_mode must be one of {BOUNDARY_MODES}, got {self.boundary_mode!r}"
            )


@dataclass(frozen=True)
class QuantizerSpec:
    out_bits: int
    in_bits: int = 8

    def __post_init__(self):
        if not 1 <= self.in_bits <= 20:
            raise InvalidArgumentError(f"in_bits={self.in_bits} outside [1, 20]")
        if not 1 <= self.out_bits <= self.in_bits:
            raise InvalidArgumentError(
                f"out_bits={self.out_bits} outside [1, {self.in_bits}]"
            )


def _pixels(N):
    return Alphabet(0, N + 1)


def switch_channel(spec: SwitchSpec) -> ChannelModel:
    n = spec.N + 1
    m = (1.0 - spec.p) * np.eye(n)
    m[:, spec.w] += spec.p
    return ChannelModel.square(m)


def _gaussian_matrix(spec: GaussianSpec) -> np.ndarray:
    n = spec.N + 1
    if spec.sigma_p == 0:
        return np.eye(n)
    offs = np.arange(n)[None, :] - np.arange(n)[:, None]
    with np.errstate(over="ignore"):
        lo = (offs - 0.5) / spec.sigma_p
        hi = (offs + 0.5) / spec.sigma_p
    if spec.boundary_mode == "clip":
        lo[:, 0] = -np.inf
        hi[:, -1] = np.inf
    # Measure bins right of the mean through the lower tail of the mirrored
    # bin so that rows are exactly symmetric and tails keep full precision.
    right = lo >= 0
    m = np.where(right, ndtr(-lo) - ndtr(-hi), ndtr(hi) - ndtr(lo))
    return m / m.sum(axis=1, keepdims=True)


def gaussian_channel(spec: GaussianSpec) -> ChannelModel:
    """x_p = x + n, n ~ N(0, sigma_p^2) integrated over unit bins.

    ``clip`` piles mass falling outside {0..N} onto the end symbols;
    ``renormalize`` rescales the in-range mass of each row to 1.
    """
    return ChannelModel.square(_gaussian_matrix(spec))


def mixture_channel(switch: SwitchSpec, noise: GaussianSpec) -> ChannelModel:
    """Row x: p at column w plus (1 - p) times the Gaussian row centred on x.

    Noise corrupts only the correct-reference branch.
    """
    if switch.N != noise.N:
        raise InvalidArgumentError(f"N mismatch: switch {switch.N} vs noise {noise.N}")
    m = (1.0 - switch.p) * _gaussian_matrix(noise)
    m[:, switch.w] += switch.p
    return ChannelModel.square(m)


def uniform_quantizer(spec: QuantizerSpec) -> DeterministicMap:
    """v -> floor(v / 2**(in_bits - out_bits))."""
    shift = spec.in_bits - spec.out_bits
    domain = Alphabet(0, 1 << spec.in_bits)
    return DeterministicMap(domain, Alphabet(0, 1 << spec.out_bits), domain.symbols() >> shift)
