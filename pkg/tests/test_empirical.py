import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from condcoding.channels import SwitchSpec, switch_channel
from condcoding.empirical import (
    GrayImage,
    PgmFormatError,
    empirical_mi,
    load_pgm,
    mi_from_samples,
    parse_pgm,
    save_pgm,
)
from condcoding.experiments import sample_pairs
from condcoding.prob import InvalidArgumentError, joint_from_channel, mutual_information, pmf_uniform, residual_joint

import oracles

TINY_PGM = b"P5\n2 2\n255\n" + bytes([0, 255, 128, 64])


def two_tone_pair(size=64, edge=32, lo=50, hi=200):
    orig = np.full((size, size), lo, dtype=np.uint8)
    orig[:, edge:] = hi
    pred = orig.copy()
    pred[:, 1:] = orig[:, :-1]  # prediction displaced by one pixel
    return GrayImage.from_array(orig), GrayImage.from_array(pred)


class TestPgm:
    def test_tiny(self):
        img = load_pgm(TINY_PGM)
        assert (img.width, img.height) == (2, 2)
        assert img.pixels.ravel().tolist() == [0, 255, 128, 64]

    def test_comment_lines(self):
        with_comments = b"P5\n# made by hand\n2 # width\n2\n# max\n255\n" + bytes([0, 255, 128, 64])
        assert np.array_equal(load_pgm(with_comments).pixels, load_pgm(TINY_PGM).pixels)

    def test_ascii_variant_rejected(self):
        with pytest.raises(PgmFormatError) as exc:
            load_pgm(b"P2\n2 2\n255\n0 255 128 64\n")
        assert exc.value.field == "magic"

    @pytest.mark.parametrize("data, field", [
        (b"P5\n2 2\n65535\n" + bytes(8), "maxval"),
        (b"P5\n2 2\n15\n" + bytes(4), "maxval"),
        (b"P5\n2 2\n255\n" + bytes(3), "payload"),
        (b"P5\n2\n", "height"),
        (b"P5\nx 2 255\n" + bytes(4), "width"),
        (b"P5\n0 2 255\n", "width"),
        (b"", "magic"),
    ])
    def test_errors_name_the_field(self, data, field):
        with pytest.raises(PgmFormatError) as exc:
            parse_pgm(data)
        assert exc.value.field == field and field in str(exc.value)

    def test_roundtrip_file(self, tmp_path):
        img = GrayImage.from_array(np.arange(12, dtype=np.uint8).reshape(3, 4))
        path = tmp_path / "a.pgm"
        save_pgm(img, path)
        back = load_pgm(path)
        assert (back.width, back.height) == (4, 3)
        np.testing.assert_array_equal(back.pixels, img.pixels)
        buf = io.BytesIO()
        save_pgm(img, buf)
        buf.seek(0)
        np.testing.assert_array_equal(load_pgm(buf).pixels, img.pixels)

    def test_image_validation(self):
        with pytest.raises(InvalidArgumentError):
            GrayImage(2, 2, np.zeros(3))
        with pytest.raises(InvalidArgumentError):
            GrayImage(1, 1, np.array([300]))


def test_identical_frames_have_zero_mi():
    orig, _ = two_tone_pair()
    est = empirical_mi(orig, orig)
    assert est.mi == 0.0 and est.h_resid == 0.0 and est.samples == 64 * 64


def test_constant_prediction_has_zero_mi():
    rng = np.random.default_rng(0)
    orig = GrayImage.from_array(rng.integers(0, 256, (32, 32)))
    pred = GrayImage.from_array(np.full((32, 32), 128))
    est = empirical_mi(orig, pred)
    assert est.mi == 0.0 and est.h_pred == 0.0


def test_shifted_edge_matches_histogram_oracle():
    orig, pred = two_tone_pair()
    x = orig.pixels.astype(int).ravel().tolist()
    xp = pred.pixels.astype(int).ravel().tolist()
    ref = oracles.mutual_info(oracles.pair_counts([(b, a - b) for a, b in zip(x, xp)]))
    est = empirical_mi(orig, pred)
    assert ref > 0
    assert est.mi == pytest.approx(ref, abs=1e-12)
    assert est.mi > 0


def test_dimension_mismatch():
    a = GrayImage.from_array(np.zeros((2, 3)))
    b = GrayImage.from_array(np.zeros((3, 2)))
    with pytest.raises(InvalidArgumentError):
        empirical_mi(a, b)


def test_bin_width():
    orig, pred = two_tone_pair()
    coarse = empirical_mi(orig, pred, bin_width=16)
    assert 0 < coarse.mi <= empirical_mi(orig, pred).mi + 1e-12
    with pytest.raises(InvalidArgumentError):
        empirical_mi(orig, pred, bin_width=0)


images = hnp.arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 12)))


@given(images, st.data())
def test_mi_bounds(orig, data):
    pred = data.draw(hnp.arrays(np.uint8, orig.shape))
    est = empirical_mi(GrayImage.from_array(orig), GrayImage.from_array(pred))
    assert 0.0 <= est.mi <= min(est.h_pred, est.h_resid) + 1e-9


@given(images, st.data())
def test_mi_invariant_under_reflection_and_shift(orig, data):
    pred = data.draw(hnp.arrays(np.uint8, orig.shape))
    base = empirical_mi(GrayImage.from_array(orig), GrayImage.from_array(pred)).mi
    flipped = empirical_mi(GrayImage.from_array(255 - orig), GrayImage.from_array(255 - pred)).mi
    assert flipped == pytest.approx(base, abs=1e-9)
    lo, hi = int(min(orig.min(), pred.min())), int(max(orig.max(), pred.max()))
    c = data.draw(st.integers(-lo, 255 - hi))
    shifted = empirical_mi(GrayImage.from_array(orig.astype(int) + c),
                           GrayImage.from_array(pred.astype(int) + c)).mi
    assert shifted == pytest.approx(base, abs=1e-9)


def test_switch_samples_recover_exact_mi():
    j = joint_from_channel(pmf_uniform(256), switch_channel(SwitchSpec(255, 0.5, 0)))
    exact = mutual_information(residual_joint(j))
    x, xp = sample_pairs(j, 10**6, seed=5)
    est = mi_from_samples(xp, x - xp)
    assert abs(est.mi - exact) < 0.05
    assert est.samples == 10**6
