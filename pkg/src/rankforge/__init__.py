"""Rank-revealing dense factorizations with exact rational and float arithmetic."""

from .core import (
    DEFAULT_TOL,
    DimensionError,
    Matrix,
    Permutation,
    RegimeError,
    ToleranceContext,
    matmul,
    norm_fro,
    rank_oracle,
    transpose,
)
from .elimination import (
    CRFactors,
    RankNormalForm,
    RrefResult,
    cr_decompose,
    null_space_basis,
    prove_rank_equality_via_cr,
    rank,
    rank_normal_form,
    rref,
)
from .orthogonalization import (
    GramSchmidtResult,
    LQFactors,
    ProjectionResult,
    QRFactors,
    gram_schmidt,
    lq,
    project_onto_subspace,
    project_onto_vector,
    qr,
)
from .report import RankReportEntry
from .skeleton import (
    CURFactors,
    check_intersection_invertible,
    cur_decompose,
    select_independent_columns,
    select_independent_rows,
)
from .subspaces import (
    SubspaceBases,
    four_subspaces,
    prove_rank_equality_elementary,
    split_vector,
    transport_row_basis,
)
from .utv import (
    RankDecompFactors,
    UTVFactors,
    connect_rank_decompositions,
    prove_rank_equality_via_ulv,
    rank_decompose,
    ulv,
    urv,
)
from .verify import VerificationReport, verify_all

__version__ = "0.1.0"
