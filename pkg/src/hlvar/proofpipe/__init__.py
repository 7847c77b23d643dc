"""Stage-by-stage verification of the centered variation bound on concrete step functions."""

from __future__ import annotations

from .grid import GridEntry, LambdaGrid, dyadic_bucket, keylemma_verify, scale_index
from .peaks import (
    EssentialPeak,
    FilterResult,
    Peak,
    PeakSystem,
    essential_filter,
    extract_peaks,
    nonessential_bound,
    sampled_variation,
)
from .propositions import ClassSystem, lemmUV, perp, propA_build, propB_build
from .report import (
    ChainReport,
    ClassEmpty,
    ConstructionFailed,
    EmptyInput,
    HypothesisViolated,
    InvalidWitness,
    OmegaNotAttained,
    PreconditionViolated,
    ProofPipeError,
    StageRecord,
    UnsortedPoints,
    WitnessInvalid,
)
from .trace import TOTAL_CONSTANT, default_sample_points, theorem_trace
from .witnesses import ABWitness, WitnessSUVT, claimAB_split, lemm0_mirror, lemm0_witness, lemmsuvt_construct

__all__ = [name for name in dir() if not name.startswith("_")]
