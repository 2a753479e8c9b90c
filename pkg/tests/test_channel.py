import numpy as np
import pytest

from polarflip import ChannelParams, frame_rng, transmit


class TestChannelParams:
    def test_sigma_formula(self):
        p = ChannelParams(2.0, 0.5)
        assert p.sigma == pytest.approx(np.sqrt(1.0 / (2 * 0.5 * 10 ** 0.2)))

    def test_rate_validated(self):
        with pytest.raises(ValueError):
            ChannelParams(1.0, 0.0)
        with pytest.raises(ValueError):
            ChannelParams(1.0, 1.5)


class TestTransmit:
    def test_llr_sign_tracks_bit_at_high_snr(self):
        params = ChannelParams(40.0, 0.5)  # essentially noiseless
        x = np.array([0, 1, 0, 1, 1, 0, 0, 1], dtype=np.uint8)
        llr = transmit(x, params, frame_rng(0, 0))
        assert np.all(np.sign(llr) == (1 - 2 * x.astype(float)))

    def test_deterministic_per_substream(self):
        params = ChannelParams(2.0, 0.5)
        x = np.zeros(64, dtype=np.uint8)
        a = transmit(x, params, frame_rng(9, 17))
        b = transmit(x, params, frame_rng(9, 17))
        assert np.array_equal(a, b)

    def test_different_frames_differ(self):
        params = ChannelParams(2.0, 0.5)
        x = np.zeros(64, dtype=np.uint8)
        a = transmit(x, params, frame_rng(9, 17))
        b = transmit(x, params, frame_rng(9, 18))
        assert not np.array_equal(a, b)

    def test_llr_moments_match_theory(self):
        # E[L|b=0] = 2/sigma^2, Var[L] = 4/sigma^2, both within 3 standard errors
        params = ChannelParams(1.0, 0.5)
        sigma2 = params.sigma**2
        n = 1_000_000
        llr = transmit(np.zeros(n, dtype=np.uint8), params, frame_rng(1234, 0))
        mean_target = 2.0 / sigma2
        var_target = 4.0 / sigma2
        mean_se = np.sqrt(var_target / n)
        assert abs(llr.mean() - mean_target) < 3 * mean_se
        var_se = var_target * np.sqrt(2.0 / (n - 1))
        assert abs(llr.var() - var_target) < 3 * var_se
