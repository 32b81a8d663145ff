"""Phase arithmetic, exponential sums over primes and linear-sieve tools
for primes p with p + 2 almost prime and alpha p^2 + beta close to an integer."""

__version__ = "0.1.0"

from .arith import FixedReal, UnitFrac, dist_nearest_int, fixed_from_sqrt, frac_mul  # noqa: E402
from .bump import BumpSpec, build_bump, bump_eval_direct, bump_eval_fourier  # noqa: E402
from .diophantine import Convergent, convergents, select_denominator  # noqa: E402
from .errors import (BudgetError, DomainError, PrecisionError, SplitError,  # noqa: E402
                     WindowEmptyError)
from .params import SieveParams, lemma1_params  # noqa: E402
from .primes import factor, sieve_primes  # noqa: E402

__all__ = [
    "BudgetError", "BumpSpec", "Convergent", "DomainError", "FixedReal", "PrecisionError",
    "SieveParams", "SplitError", "UnitFrac", "WindowEmptyError", "build_bump",
    "bump_eval_direct", "bump_eval_fourier", "convergents", "dist_nearest_int", "factor",
    "fixed_from_sqrt", "frac_mul", "lemma1_params", "select_denominator", "sieve_primes",
]
