import numpy as np
import pytest

from polarflip import ChannelParams, ScDecoder, build_u, construct, encode_u, frame_rng


@pytest.fixture(scope="session")
def code_n8():
    """N=8, K=4, no CRC: small enough for exhaustive oracles."""
    return construct(3, 4, 0, 3.0)


@pytest.fixture(scope="session")
def code_n64():
    """N=64 with CRC-16: the workhorse for decoder behavior tests."""
    return construct(6, 24, 16, 3.0)


@pytest.fixture(scope="session")
def code_n1024():
    return construct(10, 512, 16, 3.0)


def noiseless_llrs(x, magnitude=20.0):
    """Channel LLRs with correct signs and uniform confidence."""
    return magnitude * (1.0 - 2.0 * np.asarray(x, dtype=float))


def random_frame(cfg, seed, snr_db):
    """One encoded frame plus its channel LLRs at the given Eb/N0."""
    rng = frame_rng(seed, 0)
    payload = rng.integers(0, 2, cfg.K, dtype=np.uint8)
    u = build_u(cfg, payload)
    llr = transmit_frame(u, cfg, snr_db, rng)
    return payload, u, llr


def transmit_frame(u, cfg, snr_db, rng):
    from polarflip import transmit

    return transmit(encode_u(u), ChannelParams(snr_db, cfg.rate), rng)
