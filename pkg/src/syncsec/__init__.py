"""Secrecy through deliberate synchronization errors.

A transmitter injects random insertions/deletions keyed to randomness it
shares with the intended receiver; the eavesdropper faces a
synchronization-error channel. This package simulates the scheme and
numerically lower-bounds the secrecy capacity of the insertion and
deletion/erasure wiretap channels for Markov input sources.
"""

from .bounds import (
    SecrecyBoundReport,
    grid_search_fom,
    secrecy_bound_deletion,
    secrecy_bound_insertion,
    sweep,
)
from .channel import (
    ChannelParams,
    TransmissionRecord,
    apply_erasure_channel,
    assemble_record,
    effective_rate,
    epsilon_delete,
    expected_length,
    resynchronize,
    transmit,
)
from .condent import (
    cond_nll_deletion_exact,
    cond_nll_insertion,
    genie_block_cond_entropy_lb,
    mc_cond_entropy_rate,
)
from .errors import ImpossibleObservation, IntegrityError, StructureError
from .hmm import (
    HiddenMarkovModel,
    build_deletion_hmm,
    build_erasure_hmm,
    build_insertion_hmm,
    forward_nll,
    hmm_sample,
    mc_entropy_rate,
    scale_factor,
    scaled_z_entropy_rate,
)
from .sources import (
    MarkovSource,
    binary_entropy,
    entropy_rate_closed_form,
    sample_path,
    stationary_dist,
)
from .util import ERASURE, EstimateReport, seq_to_text, text_to_seq

__version__ = "0.1.0"

__all__ = [
    "ERASURE",
    "ChannelParams",
    "EstimateReport",
    "HiddenMarkovModel",
    "ImpossibleObservation",
    "IntegrityError",
    "MarkovSource",
    "SecrecyBoundReport",
    "StructureError",
    "TransmissionRecord",
    "apply_erasure_channel",
    "assemble_record",
    "binary_entropy",
    "build_deletion_hmm",
    "build_erasure_hmm",
    "build_insertion_hmm",
    "cond_nll_deletion_exact",
    "cond_nll_insertion",
    "effective_rate",
    "entropy_rate_closed_form",
    "epsilon_delete",
    "expected_length",
    "forward_nll",
    "genie_block_cond_entropy_lb",
    "grid_search_fom",
    "hmm_sample",
    "mc_cond_entropy_rate",
    "mc_entropy_rate",
    "resynchronize",
    "sample_path",
    "scale_factor",
    "scaled_z_entropy_rate",
    "secrecy_bound_deletion",
    "secrecy_bound_insertion",
    "seq_to_text",
    "stationary_dist",
    "sweep",
    "text_to_seq",
    "transmit",
]
