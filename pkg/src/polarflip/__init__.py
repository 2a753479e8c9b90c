"""Polar coding with path-metric-aided bit-flipping decoders.

Library layout:

* construction: GA density-evolution code construction (CodeConfig)
* encoding: CRC-16 and the polar transform
* channel: BPSK/AWGN with reproducible per-frame noise substreams
* sc: the successive-cancellation engine (flip + genie capable)
* metrics: flip metrics and the bounded candidate list
* decoders: scf / dscf / pma-scf / sco on top of the SC engine
* pipeline: cycle-approximate model of the pipelined multi-attempt decoder
* sim: Monte-Carlo sweep harness (also exposed as the `polarflip` CLI)
"""

from .channel import ChannelParams, frame_rng, transmit
from .construction import (
    CodeConfig,
    ReliabilityProfile,
    construct,
    ga_evolve,
    ga_means,
    load_profile,
    save_profile,
)
from .decoders import (
    DecodeReport,
    DecoderBudget,
    dscf_decode,
    get_decoder,
    pma_scf_decode,
    sc_report,
    scf_decode,
    sco_decode,
)
from .encoding import (
    build_u,
    crc16_check,
    crc16_compute,
    encode,
    encode_u,
    polar_transform,
)
from .errors import (
    ConfigurationError,
    DimensionMismatchError,
    InvalidDimensionsError,
    InvalidFlipIndexError,
)
from .metrics import (
    FlipList,
    FlipSet,
    flip_probability,
    initial_flip_metrics,
    list_insert,
    malpha_extend,
    malpha_initial,
)
from .pipeline import (
    CommandStream,
    CycleModel,
    PipelineConfig,
    build_command_stream,
    sc_reference_cycles,
    simulate_latency,
)
from .sc import DecodeOutcome, ScDecoder, f_kernel, g_kernel, hard_decision, sc_decode
from .sim import ExperimentSpec, SimRecord, run_point, run_sweep

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
