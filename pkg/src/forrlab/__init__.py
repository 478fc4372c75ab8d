"""forrlab: exact forrelation laboratory.

Build extremal forrelation instances from masked inner-product (bent)
functions, evaluate forrelation exactly in dyadic arithmetic, simulate the
one-query quantum test, measure classical query adversaries, and verify
the construction exhaustively at small arity and statistically at moderate
arity.
"""

from .boolfun import Dyadic, Spectrum, TruthTable, dual_from_bent, forrelation, is_bent, wht
from .f2linalg import (
    BitMatrix,
    BitVector,
    HardMatrices,
    SingularMatrixError,
    invert,
    mat_mat,
    mat_vec,
    rank,
    sample_hard_matrices,
    sample_invertible,
)
from .instances import (
    BudgetExceededError,
    HardParams,
    HFamilySpec,
    Oracle,
    eval_f,
    eval_g,
    materialize,
    sample_instance,
    sample_params,
)
from .quantum_sim import accept_probability, sample_outcome, statevector_accept_probability

__version__ = "0.1.0"

__all__ = [
    "BitMatrix",
    "BitVector",
    "BudgetExceededError",
    "Dyadic",
    "HFamilySpec",
    "HardMatrices",
    "HardParams",
    "Oracle",
    "SingularMatrixError",
    "Spectrum",
    "TruthTable",
    "accept_probability",
    "dual_from_bent",
    "eval_f",
    "eval_g",
    "forrelation",
    "invert",
    "is_bent",
    "mat_mat",
    "mat_vec",
    "materialize",
    "rank",
    "sample_hard_matrices",
    "sample_instance",
    "sample_invertible",
    "sample_outcome",
    "sample_params",
    "statevector_accept_probability",
    "wht",
]
