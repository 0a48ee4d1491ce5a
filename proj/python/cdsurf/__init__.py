"""Clifford-deformed surface code simulation toolkit."""

from cdsurf._core import (  # noqa: F401
    CodeLayout,
    LatticeSpec,
    Lattice,
    Layout,
    NoiseModel,
    PauliOperator,
    Sublattice,
    Syndrome,
    __version__,
    build_code,
    build_lattice,
    decode,
    extract_syndrome,
    fit_threshold,
    is_logical_failure,
    make_gaussian,
    make_iid,
    make_toy_permutation,
    matched_rectangle,
    min_weight_perfect_matching,
    run_sweep,
    sample_error,
    stabilizer_rank,
    validate_consistency,
)
