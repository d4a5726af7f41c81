"""ramsplit: exact combinatorics for splitting ramification of Brauer classes.

Pirutka-matrix verification, search, and construction; star and
barycentric subdivision of abstract simplicial complexes; dual-complex
blowup modeling with short presentations; symbolic tame residues,
Kummer pullbacks, and splitting certificates.
"""

from .errors import BudgetExceededError, InputError, NotPirutkaError, RamsplitError
from .zmodl import IntMatrix, PrimeModulus, minor_gcd, rank_mod, solve_mod
from .pirutka import (
    BadPrimeSet,
    CheckReport,
    ExponentBound,
    PirutkaCandidate,
    SearchResult,
    bad_primes,
    bound_exponent,
    builtin_matrix,
    exhaustive_search,
    greedy_construct,
    is_pirutka,
    square_minor_oracle,
    stacked_identity,
)
from .simplicial import (
    Barycenter,
    ColoringReport,
    IsoReport,
    Original,
    SimplicialComplex,
    barycentric,
    check_natural_iso,
    color_by_dimension,
    order_complex,
    star_subdivision,
)
from .dualcomplex import (
    DualComplex,
    Presentation,
    blowup,
    reduce_presentation,
    stratified_blowup_sequence,
)
from .splitting import (
    Monomial,
    ResidueVector,
    SplitReport,
    SplittingCertificate,
    StratumPoint,
    SymbolClass,
    VerifyResult,
    find_certificate,
    kummer_pullback,
    normal_form,
    residue_along,
    universal_split_check,
    verify_certificate,
)

__version__ = "0.1.0"
