import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import logsumexp

from polarflip import (
    ChannelParams,
    InvalidFlipIndexError,
    ScDecoder,
    build_u,
    construct,
    encode_u,
    f_kernel,
    frame_rng,
    g_kernel,
    hard_decision,
    sc_decode,
    transmit,
)
from polarflip.encoding import bit_reversal_permutation
from polarflip.sc import LLR_CAP

from conftest import noiseless_llrs


def all_source_vectors(N):
    out = np.zeros((1 << N, N), dtype=np.uint8)
    for m in range(1 << N):
        out[m] = [(m >> i) & 1 for i in range(N)]
    return out


def marginal_llr_oracle(chan_llrs, u_prefix, i):
    """Decision LLR at leaf i via exhaustive marginalization over all
    completions, conditioned on the decoder's actual prefix decisions."""
    N = chan_llrs.size
    U = all_source_vectors(N)
    X = np.array([encode_u(u) for u in U])
    logw = ((1.0 - 2.0 * X) * (chan_llrs / 2.0)).sum(axis=1)
    match = np.all(U[:, :i] == u_prefix[:i], axis=1)
    num = logsumexp(logw[match & (U[:, i] == 0)])
    den = logsumexp(logw[match & (U[:, i] == 1)])
    return num - den


def reference_sc(chan_llrs, frozen):
    """Independent recursive SC over contiguous halves; returns the decision
    LLR and hard decision per leaf in order."""
    perm = bit_reversal_permutation(int(np.log2(chan_llrs.size)))
    decisions = []

    def f_ref(a, b):
        return np.array([f_kernel(x, y) for x, y in zip(a, b)])

    def g_ref(a, b, bits):
        return np.array([g_kernel(x, y, int(s)) for x, y, s in zip(a, b, bits)])

    def rec(llr):
        if llr.size == 1:
            i = len(decisions)
            ld = float(llr[0])
            u = 0 if frozen[i] else (0 if ld >= 0 else 1)
            decisions.append((ld, u))
            return np.array([u], dtype=np.uint8)
        half = llr.size // 2
        a, b = llr[:half], llr[half:]
        left = rec(f_ref(a, b))
        right = rec(g_ref(a, b, left))
        return np.concatenate([left ^ right, right])

    rec(np.asarray(chan_llrs, dtype=float)[perm])
    return decisions


class TestKernels:
    def test_f_zero_erases(self):
        for x in [-7.0, -1.0, 0.0, 2.5, 40.0]:
            assert f_kernel(0.0, x) == 0.0

    def test_f_reference_value(self):
        want = math.log((math.e**3 + 1) / (math.e + math.e**2))
        assert f_kernel(1.0, 2.0) == pytest.approx(want, abs=1e-9)
        assert want == pytest.approx(0.7354, abs=1e-3)

    @given(st.floats(-40, 40), st.floats(-40, 40))
    @settings(max_examples=100, deadline=None)
    def test_f_symmetric(self, a, b):
        assert f_kernel(a, b) == pytest.approx(f_kernel(b, a), abs=1e-12)

    @given(st.floats(-25, 25), st.floats(-25, 25))
    @settings(max_examples=100, deadline=None)
    def test_f_matches_direct_formula(self, a, b):
        direct = math.log((math.exp(a + b) + 1.0) / (math.exp(a) + math.exp(b)))
        assert f_kernel(a, b) == pytest.approx(direct, abs=1e-9)

    def test_g_values(self):
        assert g_kernel(2.0, 3.0, 0) == 5.0
        assert g_kernel(2.0, 3.0, 1) == 1.0
        assert g_kernel(4.5, 0.0, 1) == -4.5

    def test_saturation(self):
        assert g_kernel(250.0, 250.0, 0) == LLR_CAP
        assert g_kernel(250.0, -250.0, 1) == -LLR_CAP

    def test_hard_decision(self, code_n8):
        frozen_idx = int(np.nonzero(code_n8.frozen_mask)[0][0])
        info_idx = int(code_n8.info_set[0])
        assert hard_decision(frozen_idx, -5.0, code_n8) == 0
        assert hard_decision(info_idx, 0.3, code_n8) == 0
        assert hard_decision(info_idx, -0.3, code_n8) == 1
        assert hard_decision(info_idx, 0.0, code_n8) == 0


class TestScDecode:
    def test_noiseless_clean_pass(self, code_n8):
        payload = np.array([1, 0, 1, 1], dtype=np.uint8)
        u = build_u(code_n8, payload)
        out = sc_decode(noiseless_llrs(encode_u(u)), code_n8)
        assert np.array_equal(out.u_hat, u)
        assert out.path_metric == 0.0
        assert out.crc_ok

    def test_noiseless_flip_pays_exactly_that_llr(self, code_n8):
        payload = np.array([0, 1, 1, 0], dtype=np.uint8)
        u = build_u(code_n8, payload)
        llrs = noiseless_llrs(encode_u(u))
        eng = ScDecoder(code_n8)
        clean = eng.decode(llrs)
        target = int(code_n8.info_set[0])
        flipped = eng.decode(llrs, flips=(target,))
        assert flipped.u_hat[target] == u[target] ^ 1
        assert flipped.path_metric == pytest.approx(abs(clean.leaf_llrs[target]))

    @pytest.mark.parametrize("n,k", [(3, 8), (3, 4), (4, 8), (4, 16)])
    def test_noiseless_inverts_encode_exhaustive(self, n, k):
        cfg = construct(n, k, 0, 3.0)
        eng = ScDecoder(cfg)
        for m in range(1 << k):
            payload = np.array([(m >> i) & 1 for i in range(k)], dtype=np.uint8)
            u = build_u(cfg, payload)
            out = eng.decode(noiseless_llrs(encode_u(u)))
            assert np.array_equal(out.u_hat, u)

    def test_noiseless_inverts_encode_sampled_n32(self):
        cfg = construct(5, 16, 0, 3.0)
        eng = ScDecoder(cfg)
        rng = np.random.default_rng(0)
        for _ in range(10_000):
            payload = rng.integers(0, 2, 16, dtype=np.uint8)
            u = build_u(cfg, payload)
            out = eng.decode(noiseless_llrs(encode_u(u)))
            assert np.array_equal(out.u_hat, u)

    def test_decision_llrs_match_marginalization_oracle(self, code_n8):
        eng = ScDecoder(code_n8)
        params = ChannelParams(2.0, code_n8.rate)
        for t in range(30):
            rng = frame_rng(321, t)
            payload = rng.integers(0, 2, code_n8.K, dtype=np.uint8)
            u = build_u(code_n8, payload)
            llrs = transmit(encode_u(u), params, rng)
            out = eng.decode(llrs)
            for i in range(code_n8.N):
                want = marginal_llr_oracle(llrs, out.u_hat, i)
                assert out.leaf_llrs[i] == pytest.approx(want, abs=1e-6)

    def test_oracle_also_holds_with_flips(self, code_n8):
        eng = ScDecoder(code_n8)
        params = ChannelParams(2.0, code_n8.rate)
        flips = (int(code_n8.info_set[0]), int(code_n8.info_set[2]))
        for t in range(10):
            rng = frame_rng(77, t)
            payload = rng.integers(0, 2, code_n8.K, dtype=np.uint8)
            u = build_u(code_n8, payload)
            llrs = transmit(encode_u(u), params, rng)
            out = eng.decode(llrs, flips=flips)
            for i in range(code_n8.N):
                want = marginal_llr_oracle(llrs, out.u_hat, i)
                assert out.leaf_llrs[i] == pytest.approx(want, abs=1e-6)

    def test_agrees_with_recursive_reference(self):
        cfg = construct(4, 8, 0, 3.0)
        eng = ScDecoder(cfg)
        params = ChannelParams(1.5, cfg.rate)
        for t in range(40):
            rng = frame_rng(55, t)
            payload = rng.integers(0, 2, cfg.K, dtype=np.uint8)
            u = build_u(cfg, payload)
            llrs = transmit(encode_u(u), params, rng)
            out = eng.decode(llrs)
            ref = reference_sc(llrs, cfg.frozen_mask)
            for i, (ld, bit) in enumerate(ref):
                assert out.leaf_llrs[i] == pytest.approx(ld, abs=1e-9)
                assert out.u_hat[i] == bit

    def test_path_metric_accumulation_identity(self, code_n64):
        eng = ScDecoder(code_n64)
        params = ChannelParams(1.0, code_n64.rate)
        for t in range(25):
            rng = frame_rng(99, t)
            payload = rng.integers(0, 2, code_n64.K, dtype=np.uint8)
            u = build_u(code_n64, payload)
            out = eng.decode(transmit(encode_u(u), params, rng))
            sign_dec = (out.leaf_llrs < 0).astype(np.uint8)
            penalty = np.abs(out.leaf_llrs)[out.u_hat != sign_dec].sum()
            assert out.path_metric == pytest.approx(penalty, rel=1e-12)

    def test_path_metric_nonnegative_and_finite(self, code_n64):
        eng = ScDecoder(code_n64)
        params = ChannelParams(0.5, code_n64.rate)
        rng = frame_rng(1, 0)
        payload = rng.integers(0, 2, code_n64.K, dtype=np.uint8)
        u = build_u(code_n64, payload)
        out = eng.decode(transmit(encode_u(u), params, rng))
        assert 0.0 <= out.path_metric < np.inf

    def test_trajectory_prefix_property(self, code_n64):
        eng = ScDecoder(code_n64)
        params = ChannelParams(1.0, code_n64.rate)
        rng = frame_rng(6, 0)
        payload = rng.integers(0, 2, code_n64.K, dtype=np.uint8)
        u = build_u(code_n64, payload)
        llrs = transmit(encode_u(u), params, rng)
        first = int(code_n64.info_set[3])
        later = int(code_n64.info_set[10])
        a = eng.decode(llrs, flips=(first,))
        b = eng.decode(llrs, flips=(first, later))
        assert np.array_equal(a.leaf_llrs[: later + 1], b.leaf_llrs[: later + 1])
        assert np.array_equal(a.u_hat[:later], b.u_hat[:later])

    def test_invalid_flip_indices(self, code_n64):
        eng = ScDecoder(code_n64)
        llrs = np.ones(code_n64.N)
        frozen_idx = int(np.nonzero(code_n64.frozen_mask)[0][0])
        with pytest.raises(InvalidFlipIndexError):
            eng.decode(llrs, flips=(frozen_idx,))
        with pytest.raises(InvalidFlipIndexError):
            eng.decode(llrs, flips=(code_n64.N,))
        with pytest.raises(InvalidFlipIndexError):
            eng.decode(llrs, flips=(int(code_n64.info_set[2]), int(code_n64.info_set[1])))

    def test_min_sum_mode_decodes_noiseless(self, code_n64):
        eng = ScDecoder(code_n64, use_min_sum=True)
        rng = frame_rng(8, 0)
        payload = rng.integers(0, 2, code_n64.K, dtype=np.uint8)
        u = build_u(code_n64, payload)
        out = eng.decode(noiseless_llrs(encode_u(u)))
        assert np.array_equal(out.u_hat, u)

    def test_smooth_path_metric_mode(self, code_n64):
        rng = frame_rng(8, 1)
        payload = rng.integers(0, 2, code_n64.K, dtype=np.uint8)
        u = build_u(code_n64, payload)
        llrs = transmit(encode_u(u), ChannelParams(2.0, code_n64.rate), rng)
        hard = ScDecoder(code_n64).decode(llrs)
        smooth = ScDecoder(code_n64, smooth_pm=True).decode(llrs)
        assert smooth.path_metric > hard.path_metric  # extra log1p terms
        want = np.log1p(np.exp(-(1 - 2 * smooth.u_hat.astype(float)) * smooth.leaf_llrs)).sum()
        assert smooth.path_metric == pytest.approx(want, rel=1e-9)

    def test_info_llrs_alignment(self, code_n64):
        eng = ScDecoder(code_n64)
        rng = frame_rng(12, 0)
        payload = rng.integers(0, 2, code_n64.K, dtype=np.uint8)
        u = build_u(code_n64, payload)
        out = eng.decode(transmit(encode_u(u), ChannelParams(2.0, code_n64.rate), rng))
        assert out.info_llrs.size == code_n64.info_set.size
        assert np.array_equal(out.info_llrs, out.leaf_llrs[code_n64.info_set])
