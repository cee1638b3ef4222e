"""Randomized online CP decomposition of tensors streamed along their last mode."""

from .baselines import batch_cold, batch_hot, cp_als, online_full_init, online_full_update
from .bench import BenchConfig, BenchReport, gen_synthetic, run_benchmark, split_stream
from .errors import DomainError, NumericalFailure, RankDeficiencyWarning, RegularizationWarning
from .factor_model import (
    KruskalModel,
    SampleIndexSet,
    draw_samples,
    exhaustive_samples,
    fitness,
    reconstruct,
    sample_unfolding,
    sampled_khatri_rao,
)
from .online import (
    ComplementaryState,
    init_state,
    rocp_run,
    rocp_update,
    update_last_mode,
    update_other_modes,
)
from .randomized_init import InitResult, cprand_decompose, default_sample_size, solve_sampled_ls
from .tensor_core import (
    decode_index,
    fold,
    frobenius_norm,
    hadamard,
    khatri_rao,
    khatri_rao_list,
    linear_index,
    unfold,
)
from .tensor_io import load_state, read_tensor, save_state, write_tensor

__version__ = "0.1.0"
