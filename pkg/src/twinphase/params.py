"""The coupled scale parameters x, theta, rho -> delta, K, Delta, D."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from scipy import optimize

from .errors import DomainError

# Delta = K**LEMMA1_EXPONENT in the twisted-sum family; the exponent is 32 * 34 / 33.
LEMMA1_EXPONENT = 32 * 34 / 33


@dataclass(frozen=True)
class SieveParams:
    """Scale parameters.

    ``delta = x**-theta``, ``K = log(x)**2 / delta``, ``Delta = x**rho`` and
    ``D = sqrt(x) / (Delta * K**4)``.  At any scale a desk computer can
    reach, D is far below 1; :attr:`level_ok` reports it rather than the
    constructor refusing.
    """

    x: float
    theta: float
    rho: float
    delta: float
    K: float
    Delta: float
    D: float
    omega_margin: float = 0.01

    @classmethod
    def from_exponents(cls, x: float, theta: float, rho: float,
                       omega_margin: float = 0.01, strict: bool = True) -> "SieveParams":
        if not x >= 100:
            raise DomainError("SieveParams needs x >= 100")
        lx = math.log(x)
        delta = x ** -theta
        K = lx * lx / delta
        Delta = x ** rho
        D = math.sqrt(x) / (Delta * K ** 4)
        params = cls(float(x), theta, rho, delta, K, Delta, D, omega_margin)
        if strict:
            params.validate()
        return params

    def constraint_violations(self) -> list[str]:
        """The coupling constraints on theta and rho that fail."""
        out = []
        if not 0 < self.theta < 1 / 200:
            out.append("0 < theta < 1/200")
        if not self.rho > 32 * self.theta:
            out.append("rho > 32 theta")
        if not self.rho + 4 * self.theta < 11 / 54:
            out.append("rho + 4 theta < 11/54")
        if not self.rho + self.theta > 0:
            out.append("rho + theta > 0")
        return out

    def validate(self) -> None:
        bad = self.constraint_violations()
        if bad:
            raise DomainError("parameter constraints violated: " + "; ".join(bad))

    @property
    def level_ok(self) -> bool:
        return self.D >= 1

    @property
    def log_x(self) -> float:
        return math.log(self.x)

    def to_dict(self) -> dict:
        return asdict(self)


def lemma1_params(theta: float, x: float, exponent: float = LEMMA1_EXPONENT,
                  strict: bool = True) -> SieveParams:
    """Parameters of the twisted-sum family at scale x (x is a convergent denominator).

    ``K = x**theta * log(x)**2``, ``Delta = K**exponent``,
    ``D = sqrt(x) / (Delta * K**4)``.  ``rho`` is recorded as
    ``exponent * theta``, the power of x in Delta once logarithms are
    absorbed, and that is what the constraint check sees.
    """
    if not 0 < theta < 0.005:
        raise DomainError("lemma1_params needs 0 < theta < 0.005")
    if not x >= 100:
        raise DomainError("lemma1_params needs x >= 100")
    lx = math.log(x)
    K = x ** theta * lx * lx
    Delta = K ** exponent
    D = math.sqrt(x) / (Delta * K ** 4)
    params = SieveParams(float(x), theta, exponent * theta, x ** -theta, K, Delta, D)
    if strict:
        params.validate()
    return params


def lemma1_level_threshold(theta: float, exponent: float = LEMMA1_EXPONENT) -> float:
    """log x above which the family's level D reaches 1.

    Solves ``log(x)/2 = (exponent + 4) * (theta log x + 2 log log x)``.
    Returned as log x because x itself overflows a double.
    """
    c = exponent + 4
    if not c * theta < 0.5:
        raise DomainError("D < 1 for every x at this theta")

    def gap(L):
        return 0.5 * L - c * (theta * L + 2 * math.log(L))

    hi = 10.0
    while gap(hi) <= 0:
        hi *= 2
    return optimize.brentq(gap, 10.0, hi, xtol=1e-12, rtol=1e-14)
