"""Crossbar in-memory MVM simulation and benchmarking."""

from .correction import (
    DenoiseConfig,
    EcConfig,
    TriProduct,
    build_differential_matrix,
    corrected_mat_vec_mul,
    denoise_least_square,
    first_order_combine,
)
from .crossbar import (
    Crossbar,
    EncodingMap,
    adjustable_mat_write_and_verify,
    adjustable_vec_write_and_verify,
    analog_mvm,
    decode,
    mca_set_weights,
)
from .device import (
    DEPRESS,
    POTENTIATE,
    DeviceProfile,
    apply_pulse,
    load_profiles,
    program_cell,
    program_cells,
)
from .io import (
    MatrixRecord,
    ResultRow,
    emit_results,
    generate_iperturb,
    load_matrix_market,
    parse_matrix_market,
    read_results,
    sample_input_vector,
    write_matrix_market,
)
from .metrics import (
    RunMetrics,
    UndefinedMetricError,
    aggregate_tile_metrics,
    relative_error,
    replication_summary,
)
from .seeds import derive_seed, make_rng
from .tiling import (
    ChunkPlan,
    TileGrid,
    block_partition,
    distributed_mat_vec_mul,
    generate_mat_chunks_set,
    generate_vec_chunks_set,
    reassignment_factor,
    zero_padding,
)

__version__ = "0.1.0"

__all__ = [
    "DeviceProfile", "apply_pulse", "program_cell", "program_cells",
    "load_profiles", "POTENTIATE", "DEPRESS",
    "Crossbar", "EncodingMap", "mca_set_weights", "decode", "analog_mvm",
    "adjustable_mat_write_and_verify", "adjustable_vec_write_and_verify",
    "TriProduct", "DenoiseConfig", "EcConfig", "first_order_combine",
    "build_differential_matrix", "denoise_least_square", "corrected_mat_vec_mul",
    "TileGrid", "ChunkPlan", "zero_padding", "block_partition",
    "generate_mat_chunks_set", "generate_vec_chunks_set",
    "distributed_mat_vec_mul", "reassignment_factor",
    "RunMetrics", "relative_error", "aggregate_tile_metrics",
    "replication_summary", "UndefinedMetricError",
    "MatrixRecord", "parse_matrix_market", "load_matrix_market",
    "write_matrix_market", "generate_iperturb", "sample_input_vector",
    "ResultRow", "emit_results", "read_results",
    "derive_seed", "make_rng",
]
