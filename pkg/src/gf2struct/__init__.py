"""Certified Freiman-type and Balog-Szemeredi-Gowers-type structure in F_2^n."""

from .exact import KParam
from .extraction import ExtractionCertificate, extract_flat, translate_argmax
from .flatness import FlatnessReport, coherent_flatness, delta_threshold
from .fourier import FourierTable, SpectrumThreshold, bias_check, naive_walsh, spectrum, walsh_transform
from .gf2 import (
    DenseSet,
    GF2Vector,
    Subspace,
    coset_representatives,
    dot,
    is_closed_under_addition,
    orthogonal_complement,
    slice_set,
    span_closure,
)
from .pipelines import (
    TheoremResult,
    bsg_pipeline,
    doubling_decrement_step,
    energy_increment_step,
    freiman_pipeline,
    single_set_bsg,
    single_set_freiman,
)
from .stats import brute_energy, cauchy_schwarz_bound, doubling, energy, pair_energy, sumset

__version__ = "0.1.0"
