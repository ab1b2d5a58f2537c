"""Plug-in mutual information between a prediction frame and its residual.

Frames are 8-bit grayscale binary PGM (P5) images. The residual
``r = x - x_p`` is kept signed in [-255, 255]; no modular wrapping.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from condcoding import kernels
from condcoding.prob import InvalidArgumentError, Joint2, entropy, joint_entropy, marginal_col, marginal_row


class PgmFormatError(ValueError):
    """Malformed or unsupported PGM input; ``field`` names the culprit."""

    def __init__(self, field: str, message: str):
        super().__init__(f"PGM {field}: {message}")
        self.field = field


@dataclass(frozen=True, eq=False)
class GrayImage:
    width: int
    height: int
    pixels: np.ndarray  # (height, width) uint8, row-major

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise InvalidArgumentError("image dimensions must be positive")
        px = np.asarray(self.pixels)
        if px.size != self.width * self.height:
            raise InvalidArgumentError(
                f"{px.size} pixels for a {self.width}x{self.height} image"
            )
        if px.size and (px.min() < 0 or px.max() > 255):
            raise InvalidArgumentError("pixel values must lie in [0, 255]")
        px = px.astype(np.uint8).reshape(self.height, self.width)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @classmethod
    def from_array(cls, a) -> "GrayImage":
        a = np.asarray(a)
        if a.ndim != 2:
            raise InvalidArgumentError("expected a 2-D pixel array")
        return cls(a.shape[1], a.shape[0], a)


_WS = b" \t\n\r\v\f"


def _header_tokens(data: bytes, count: int):
    """Return ``count`` whitespace-separated header tokens and the offset after them."""
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and (data[pos] in _WS or data[pos] == ord("#")):
            if data[pos] == ord("#"):
                while pos < n and data[pos] not in b"\r\n":
                    pos += 1
            else:
                pos += 1
        start = pos
        while pos < n and data[pos] not in _WS and data[pos] != ord("#"):
            pos += 1
        if start == pos:
            break
        tokens.append(data[start:pos])
    return tokens, pos


def parse_pgm(data: bytes) -> GrayImage:
    if data[:2] != b"P5":
        found = data[:2].decode("latin-1") or "<empty>"
        raise PgmFormatError("magic", f"expected 'P5' (binary graymap), found {found!r}")
    tokens, pos = _header_tokens(data[2:], 3)
    pos += 2
    names = ("width", "height", "maxval")
    values = []
    for name, tok in zip(names, tokens + [None] * (3 - len(tokens))):
        if tok is None:
            raise PgmFormatError(name, "missing from header")
        if not tok.isdigit():
            raise PgmFormatError(name, f"not a positive integer: {tok!r}")
        values.append(int(tok))
    width, height, maxval = values
    if width < 1:
        raise PgmFormatError("width", "must be positive")
    if height < 1:
        raise PgmFormatError("height", "must be positive")
    if maxval != 255:
        raise PgmFormatError("maxval", f"only 255 is supported, got {maxval}")
    if pos >= len(data) or data[pos] not in _WS:
        raise PgmFormatError("payload", "missing whitespace after header")
    pos += 1
    need = width * height
    payload = data[pos:pos + need]
    if len(payload) < need:
        raise PgmFormatError("payload", f"truncated: {len(payload)} of {need} bytes")
    px = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return GrayImage(width, height, px)


def load_pgm(source) -> GrayImage:
    """Read a P5 PGM from a path, bytes, or binary file object."""
    if isinstance(source, (bytes, bytearray)):
        return parse_pgm(bytes(source))
    if hasattr(source, "read"):
        return parse_pgm(source.read())
    with open(os.fspath(source), "rb") as fh:
        return parse_pgm(fh.read())


def save_pgm(image: GrayImage, destination) -> None:
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    data = header + image.pixels.tobytes()
    if hasattr(destination, "write"):
        destination.write(data)
    else:
        with open(os.fspath(destination), "wb") as fh:
            fh.write(data)


@dataclass(frozen=True)
class MiEstimate:
    mi: float
    h_pred: float
    h_resid: float
    samples: int


def mi_from_samples(pred, resid, bin_width: int = 1, pred_min=None, resid_min=None) -> MiEstimate:
    """Plug-in I(pred; resid) from paired integer samples.

    Bins are ``bin_width`` symbols wide, counted from ``pred_min`` and
    ``resid_min`` (the sample minima when not given).
    """
    if bin_width < 1:
        raise InvalidArgumentError("bin_width must be >= 1")
    pred = np.asarray(pred, dtype=np.int64).ravel()
    resid = np.asarray(resid, dtype=np.int64).ravel()
    if pred.shape != resid.shape or pred.size == 0:
        raise InvalidArgumentError("need equally many (non-zero) prediction and residual samples")
    pred_min = pred.min() if pred_min is None else pred_min
    resid_min = resid.min() if resid_min is None else resid_min
    if pred.min() < pred_min or resid.min() < resid_min:
        raise InvalidArgumentError("samples below the declared histogram origin")
    a = (pred - pred_min) // bin_width
    b = (resid - resid_min) // bin_width
    counts = kernels.count_pairs(a, b, int(a.max()) + 1, int(b.max()) + 1)
    j = Joint2(counts / pred.size, row_label="x_p", col_label="r")
    h_pred = entropy(marginal_row(j))
    h_resid = entropy(marginal_col(j))
    if h_pred == 0.0 or h_resid == 0.0:
        mi = 0.0
    else:
        mi = min(max(h_pred + h_resid - joint_entropy(j), 0.0), h_pred, h_resid)
    return MiEstimate(mi, h_pred, h_resid, int(pred.size))


def empirical_mi(original: GrayImage, prediction: GrayImage, bin_width: int = 1) -> MiEstimate:
    """Plug-in I(x_p; r) over all pixels of a frame pair."""
    if (original.width, original.height) != (prediction.width, prediction.height):
        raise InvalidArgumentError(
            f"size mismatch: original {original.width}x{original.height}, "
            f"prediction {prediction.width}x{prediction.height}"
        )
    xp = prediction.pixels.astype(np.int64)
    r = original.pixels.astype(np.int64) - xp
    return mi_from_samples(xp, r, bin_width, pred_min=0, resid_min=-255)
