"""Polar codes as monomial codes, their UTL automorphisms, and AE decoding."""

from .automorphism import (
    AffineTransform,
    CodewordPermutation,
    UtlMask,
    admissible_mask,
    affine_structure_count,
    count_automorphisms_bruteforce,
    is_admissible,
    is_automorphism,
    sample_lta,
    to_permutation,
    utl_group,
)
from .channel import SimConfig, SimResult, run, transmit
from .code import CRC, PolarCode, codebook, contains, encode
from .construction import (
    ReliabilitySequence,
    candidate_matrix,
    design_ga,
    load_5g_sequence,
    reed_muller,
    utl_design,
)
from .decoders import BPDecoder, DecodeResult, SCDecoder, SCLDecoder, bp_decode, sc_decode, scl_decode
from .ensemble import AEDecoder, DecoderSpec, Ensemble, ae_decode, build_ensemble, select_best
from .monomials import Monomial, MonomialSet, evaluate, index_of_monomial, is_decreasing, monomial_of_index

__version__ = "0.1.0"
