import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from concurrent_codes import ChannelSpec, Codeword, GapRegion, add_flip_noise, add_noise, burst_erase, burst_region


def random_codeword(seed, length=2048, density=0.05):
    return Codeword(np.random.default_rng(seed).random(length) < density)


def test_noise_extremes():
    cw = random_codeword(0)
    assert add_noise(cw, 0.0, 1) == cw
    assert add_noise(cw, 1.0, 1).mark_count == 2048


def test_noise_count_and_overlap():
    cw = random_codeword(1)
    out = add_noise(cw, 0.3, 2)
    added = out.bits & ~cw.bits
    overlap = 614 - added.sum()
    assert out.mark_count == cw.mark_count + 614 - overlap
    assert out.mark_count <= cw.mark_count + 614


@given(st.integers(0, 2**32), st.floats(0, 1))
@settings(max_examples=40)
def test_noise_never_clears_and_is_seeded(seed, mu):
    cw = random_codeword(seed % 97)
    a, b = add_noise(cw, mu, seed), add_noise(cw, mu, seed)
    assert a == b
    assert np.all(a.bits >= cw.bits)


def test_flip_noise_count():
    cw = random_codeword(3)
    out = add_flip_noise(cw, 0.25, 4)
    assert np.count_nonzero(out.bits != cw.bits) == 512


def test_burst_region_arithmetic():
    cw = Codeword(np.ones(2048, bool))
    out = burst_erase(cw, 0.4, start=100)
    assert not out.bits[100:919].any()
    assert out.bits[:100].all() and out.bits[919:].all()
    assert burst_erase(cw, 0.0, start=5) == cw


def test_burst_must_fit():
    with pytest.raises(ValueError):
        burst_erase(Codeword.zeros(100), 0.5, start=60)
    with pytest.raises(ValueError):
        burst_region(100, 1.5)


@given(st.integers(0, 2**32), st.floats(0, 1))
@settings(max_examples=40)
def test_random_burst_fits_never_sets_and_is_seeded(seed, gf):
    cw = random_codeword(seed % 89, 500, 0.5)
    region = burst_region(500, gf, seed=seed)
    assert 0 <= region.start and region.stop <= 500
    out = burst_erase(cw, gf, seed=seed)
    assert out == burst_erase(cw, gf, region.start)
    assert np.all(out.bits <= cw.bits)


def test_channel_spec_applies_noise_then_burst():
    cw = random_codeword(5)
    spec = ChannelSpec(0.2, 0.1, 300, seed=9)
    out, region = spec.apply(cw)
    assert region == GapRegion(300, 205)
    assert not out.bits[300:505].any()
    again, _ = spec.apply(cw)
    assert again == out
    with pytest.raises(ValueError):
        ChannelSpec(noise_fraction=1.2)
