"""Exact probability algebra over finite integer alphabets.

Distributions are dense float64 arrays tagged with the integer value of their
first symbol, so signed alphabets (residuals) need no index remapping. All
information functionals are reported in bits.

Objects are immutable: their arrays are flagged read-only on construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from condcoding import kernels

NORM_TOL = 1e-12
MAX_ALPHABET = 1 << 20


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


def _frozen(a, ndim):
    arr = np.array(a, dtype=np.float64, copy=True)
    if arr.ndim != ndim:
        raise InvalidArgumentError(f"expected a {ndim}-D array, got {arr.ndim}-D")
    arr.setflags(write=False)
    return arr


def _check_probs(arr, what):
    if arr.size == 0:
        raise InvalidArgumentError(f"{what}: alphabet must be non-empty")
    if max(arr.shape) > MAX_ALPHABET:
        raise InvalidArgumentError(f"{what}: alphabet too large")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{what}: non-finite probability")
    if np.any(arr < 0):
        raise InvalidArgumentError(f"{what}: negative probability")
    total = kernels.compensated_sum(arr)
    if abs(total - 1.0) > NORM_TOL:
        raise InvalidArgumentError(f"{what}: probabilities sum to {total!r}, not 1")


@dataclass(frozen=True)
class Alphabet:
    """Contiguous integer alphabet ``{offset, ..., offset + size - 1}``."""

    offset: int
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise InvalidArgumentError("alphabet size must be >= 1")

    @property
    def last(self) -> int:
        return self.offset + self.size - 1

    def symbols(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.size, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class Pmf:
    """Probability mass function; ``probs[k]`` is P(offset + k)."""

    probs: np.ndarray
    offset: int = 0

    def __post_init__(self):
        arr = _frozen(self.probs, 1)
        _check_probs(arr, "Pmf")
        object.__setattr__(self, "probs", arr)
        object.__setattr__(self, "offset", int(self.offset))

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.offset, self.probs.size)

    def __len__(self):
        return self.probs.size

    def prob(self, symbol: int) -> float:
        k = symbol - self.offset
        if 0 <= k < self.probs.size:
            return float(self.probs[k])
        return 0.0


@dataclass(frozen=True, eq=False)
class Joint2:
    """Joint distribution of two integer-valued variables.

    ``probs[i, j]`` is P(row = row_offset + i, col = col_offset + j).
    """

    probs: np.ndarray
    row_offset: int = 0
    col_offset: int = 0
    row_label: str = "row"
    col_label: str = "col"

    def __post_init__(self):
        arr = _frozen(self.probs, 2)
        _check_probs(arr, "Joint2")
        object.__setattr__(self, "probs", arr)
        object.__setattr__(self, "row_offset", int(self.row_offset))
        object.__setattr__(self, "col_offset", int(self.col_offset))

    @property
    def row_alphabet(self) -> Alphabet:
        return Alphabet(self.row_offset, self.probs.shape[0])

    @property
    def col_alphabet(self) -> Alphabet:
        return Alphabet(self.col_offset, self.probs.shape[1])

    @property
    def shape(self):
        return self.probs.shape


@dataclass(frozen=True, eq=False)
class DeterministicMap:
    """Total function from one integer alphabet into another.

    ``table[k]`` is the output symbol (an absolute value, not an index) for
    input symbol ``domain.offset + k``.
    """

    domain: Alphabet
    codomain: Alphabet
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        table = np.array(self.table, dtype=np.int64, copy=True)
        if table.ndim != 1 or table.size != self.domain.size:
            raise InvalidArgumentError(
                f"map table has {table.size} entries for a domain of {self.domain.size}"
            )
        if np.any(table < self.codomain.offset) or np.any(table > self.codomain.last):
            raise InvalidArgumentError("map output outside the declared codomain")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    def __call__(self, symbol: int) -> int:
        k = symbol - self.domain.offset
        if not 0 <= k < self.domain.size:
            raise InvalidArgumentError(f"symbol {symbol} outside the map domain")
        return int(self.table[k])

    @classmethod
    def identity(cls, alphabet: Alphabet) -> "DeterministicMap":
        return cls(alphabet, alphabet, alphabet.symbols())

    @classmethod
    def constant(cls, alphabet: Alphabet, value: int = 0) -> "DeterministicMap":
        return cls(alphabet, Alphabet(value, 1), np.full(alphabet.size, value))


def pmf_uniform(size: int, offset: int = 0) -> Pmf:
    if size < 1:
        raise InvalidArgumentError("uniform pmf needs size >= 1")
    return Pmf(np.full(size, 1.0 / size), offset)


def entropy(d: Pmf) -> float:
    """Shannon entropy in bits."""
    return max(kernels.entropy_bits(d.probs), 0.0)


def joint_from_channel(prior: Pmf, channel) -> Joint2:
    """Joint of (x, x_p) from P(x) and a channel P(x_p | x)."""
    if prior.alphabet != channel.input_alphabet:
        raise InvalidArgumentError(
            f"prior alphabet {prior.alphabet} does not match channel input "
            f"{channel.input_alphabet}"
        )
    probs = prior.probs[:, None] * channel.matrix
    # Rows are stochastic to 1e-12, so renormalising only absorbs round-off.
    probs = probs / kernels.compensated_sum(probs)
    return Joint2(
        probs,
        prior.offset,
        channel.output_alphabet.offset,
        row_label="x",
        col_label="x_p",
    )


def marginal_row(j: Joint2) -> Pmf:
    m = j.probs.sum(axis=1)
    return Pmf(m / kernels.compensated_sum(m), j.row_offset)


def marginal_col(j: Joint2) -> Pmf:
    m = j.probs.sum(axis=0)
    return Pmf(m / kernels.compensated_sum(m), j.col_offset)


def joint_entropy(j: Joint2) -> float:
    return max(kernels.entropy_bits(j.probs), 0.0)


def conditional_entropy_row_given_col(j: Joint2) -> float:
    """H(row | col) = H(row, col) - H(col)."""
    return max(joint_entropy(j) - entropy(marginal_col(j)), 0.0)


def mutual_information(j: Joint2) -> float:
    """I(row; col) = H(row) + H(col) - H(row, col), round-off clamped at 0."""
    h_row = entropy(marginal_row(j))
    h_col = entropy(marginal_col(j))
    if h_row == 0.0 or h_col == 0.0:
        return 0.0
    return max(h_row + h_col - joint_entropy(j), 0.0)


def transpose(j: Joint2) -> Joint2:
    return Joint2(j.probs.T, j.col_offset, j.row_offset, j.col_label, j.row_label)


def apply_map_to_col(j: Joint2, f: DeterministicMap) -> Joint2:
    """Joint of (row, f(col)): columns with equal image are merged."""
    if f.domain != j.col_alphabet:
        raise InvalidArgumentError(
            f"map domain {f.domain} does not match column alphabet {j.col_alphabet}"
        )
    out = np.zeros((j.shape[0], f.codomain.size))
    np.add.at(out, (slice(None), f.table - f.codomain.offset), j.probs)
    return Joint2(
        out,
        j.row_offset,
        f.codomain.offset,
        j.row_label,
        f"f({j.col_label})",
    )


def residual_joint(j: Joint2) -> Joint2:
    """Joint of (r, x_p) with r = x - x_p, from a joint over (x, x_p).

    The residual alphabet spans ``[x_min - xp_max, x_max - xp_min]``.
    """
    ncol = j.shape[1]
    out = kernels.shear_residual(j.probs)
    r_offset = j.row_offset - (j.col_offset + ncol - 1)
    return Joint2(out, r_offset, j.col_offset, "r", j.col_label)


def conditional_mutual_information_via_map(j: Joint2, f: DeterministicMap) -> float:
    """I(x; x_p | f(x_p)) = H(x | f(x_p)) - H(x | x_p).

    Valid because f(x_p) is a function of x_p.
    """
    h_tilde = conditional_entropy_row_given_col(apply_map_to_col(j, f))
    return max(h_tilde - conditional_entropy_row_given_col(j), 0.0)
