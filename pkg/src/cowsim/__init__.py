"""Simulator of the coherent one-way QKD protocol and the AND-mask attack."""

from .alice import (
    DECOY,
    DecoyStrategy,
    PulseTrain,
    SlotMap,
    announce_coherence_checks,
    coherent_boundaries,
    encode,
    generate_raw_bits,
    insert_decoys,
)
from .bob import DetectionMode, DetectionRecord, DetectorConfig, decode, receive
from .engine import (
    Attack,
    CompareResult,
    RunStats,
    SimConfig,
    compare_attack,
    run,
    sweep_mu,
)
from .eve import (
    EveMask,
    EveRecord,
    MaskMode,
    apply_and_mask,
    generate_mask,
    observe_transcript,
    reconstruct_key,
)
from .optics import (
    BinAmplitude,
    OpticalParams,
    attenuate,
    beamsplit,
    click_probability,
    detectable_fraction,
    effective_mu,
    monitor_port_mean,
    sample_click,
    splittable_fraction,
    vacuum_overlap,
)
from .sifting import SiftResult, Transcript, compute_qber, run_sifting

__version__ = "0.1.0"
