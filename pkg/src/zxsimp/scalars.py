"""Exact scalar arithmetic over the 24th cyclotomic integers.

Every multiplicative factor produced by the stabilizer rewrite rules lives in
the ring Z[zeta] extended by half-integer powers of 2 and 3, where
zeta = exp(i*pi/12) is a primitive 24th root of unity.  This ring contains
i = zeta^6, omega = exp(2i*pi/3) = zeta^8, exp(i*pi/4) = zeta^3,
exp(i*pi/6) = zeta^2, and (via the half powers) sqrt(2) and sqrt(3), which
covers every normalization the qubit and qutrit fragments need.

Elements are stored as an integer coefficient vector over the reduced power
basis zeta^0..zeta^7 (the 24th cyclotomic polynomial is x^8 - x^4 + 1, so
zeta^8 = zeta^4 - 1) together with two half-power exponents.  The canonical
form divides out sqrt(2) and sqrt(3) from the coefficient vector, which makes
structural equality coincide with value equality.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

DEGREE = 8  # phi(24)

_ZETA = cmath.exp(1j * math.pi / 12)


def _reduce(poly: list[int]) -> tuple[int, ...]:
    """Reduce an integer polynomial in zeta to the basis zeta^0..zeta^7."""
    coeffs = list(poly)
    for k in range(len(coeffs) - 1, DEGREE - 1, -1):
        c = coeffs[k]
        if c:
            # zeta^k = zeta^(k-8) * (zeta^4 - 1)
            coeffs[k - 4] += c
            coeffs[k - 8] -= c
        coeffs.pop()
    while len(coeffs) < DEGREE:
        coeffs.append(0)
    return tuple(coeffs)


@lru_cache(maxsize=64)
def _zeta_power(k: int) -> tuple[int, ...]:
    k %= 24
    poly = [0] * (k + 1)
    poly[k] = 1
    return _reduce(poly)


def _mul_vec(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    prod = [0] * (2 * DEGREE - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] += ai * bj
    return _reduce(prod)


def _add_zeta_multiple(acc: list[int], k: int, c: int) -> None:
    for idx, v in enumerate(_zeta_power(k)):
        acc[idx] += c * v


# sqrt(2) = zeta^3 + zeta^21, sqrt(3) = zeta^2 + zeta^22
_SQRT2 = _reduce([0, 0, 0, 1] + [0] * 17 + [1])
_SQRT3 = _reduce([0, 0, 1] + [0] * 19 + [1])


def _try_divide(vec: tuple[int, ...], surd: tuple[int, ...], n: int) -> tuple[int, ...] | None:
    """Divide vec by sqrt(n) exactly (multiply by sqrt(n), divide by n), or None."""
    prod = _mul_vec(vec, surd)
    if all(c % n == 0 for c in prod):
        return tuple(c // n for c in prod)
    return None


@dataclass(frozen=True)
class ExactScalar:
    """A number of the form (sum_k c_k zeta^k) * 2^(pow2/2) * 3^(pow3/2)."""

    coeffs: tuple[int, ...]
    pow2: int = 0
    pow3: int = 0

    def __post_init__(self):
        vec = _reduce(list(self.coeffs))
        p2, p3 = self.pow2, self.pow3
        if any(vec):
            while True:
                div = _try_divide(vec, _SQRT2, 2)
                if div is None:
                    break
                vec, p2 = div, p2 + 1
            while True:
                div = _try_divide(vec, _SQRT3, 3)
                if div is None:
                    break
                vec, p3 = div, p3 + 1
        else:
            p2 = p3 = 0
        object.__setattr__(self, "coeffs", vec)
        object.__setattr__(self, "pow2", p2)
        object.__setattr__(self, "pow3", p3)

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero() -> "ExactScalar":
        return ExactScalar((0,) * DEGREE)

    @staticmethod
    def one() -> "ExactScalar":
        return ExactScalar((1,) + (0,) * (DEGREE - 1))

    @staticmethod
    def from_int(n: int) -> "ExactScalar":
        return ExactScalar((n,) + (0,) * (DEGREE - 1))

    @staticmethod
    def zeta(k: int) -> "ExactScalar":
        """zeta^k, zeta = exp(i pi/12)."""
        return ExactScalar(_zeta_power(k))

    @staticmethod
    def omega(j: int = 1) -> "ExactScalar":
        """omega^j, omega = exp(2 i pi/3)."""
        return ExactScalar.zeta(8 * j)

    @staticmethod
    def i_power(k: int) -> "ExactScalar":
        return ExactScalar.zeta(6 * k)

    @staticmethod
    def sqrt_d_power(d: int, k: int) -> "ExactScalar":
        """d^(k/2) for d in {2, 3, 4}."""
        if d == 2:
            return ExactScalar.one()._with_pows(k, 0)
        if d == 3:
            return ExactScalar.one()._with_pows(0, k)
        if d == 4:
            return ExactScalar.one()._with_pows(2 * k, 0)
        raise ValueError(f"unsupported dimension {d}")

    @staticmethod
    def monomial(k24: int, pow2: int = 0, pow3: int = 0) -> "ExactScalar":
        return ExactScalar(_zeta_power(k24), pow2, pow3)

    def _with_pows(self, pow2: int, pow3: int) -> "ExactScalar":
        return ExactScalar(self.coeffs, self.pow2 + pow2, self.pow3 + pow3)

    # -- ring operations -------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __mul__(self, other: "ExactScalar") -> "ExactScalar":
        if not isinstance(other, ExactScalar):
            return NotImplemented
        return ExactScalar(_mul_vec(self.coeffs, other.coeffs),
                           self.pow2 + other.pow2, self.pow3 + other.pow3)

    def __add__(self, other: "ExactScalar") -> "ExactScalar":
        if not isinstance(other, ExactScalar):
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        p2, p3 = min(self.pow2, other.pow2), min(self.pow3, other.pow3)
        a = self._raise_vec(self.pow2 - p2, self.pow3 - p3)
        b = other._raise_vec(other.pow2 - p2, other.pow3 - p3)
        return ExactScalar(tuple(x + y for x, y in zip(a, b)), p2, p3)

    def __neg__(self) -> "ExactScalar":
        return ExactScalar(tuple(-c for c in self.coeffs), self.pow2, self.pow3)

    def __sub__(self, other: "ExactScalar") -> "ExactScalar":
        return self + (-other)

    def _raise_vec(self, extra2: int, extra3: int) -> tuple[int, ...]:
        """Coefficient vector after folding extra half powers into it."""
        vec = self.coeffs
        for _ in range(extra2):
            vec = _mul_vec(vec, _SQRT2)
        for _ in range(extra3):
            vec = _mul_vec(vec, _SQRT3)
        return vec

    def conjugate(self) -> "ExactScalar":
        acc = [0] * DEGREE
        for j, c in enumerate(self.coeffs):
            if c:
                _add_zeta_multiple(acc, (24 - j) % 24, c)
        return ExactScalar(tuple(acc), self.pow2, self.pow3)

    def __pow__(self, n: int) -> "ExactScalar":
        if n < 0:
            inv = self.inverse_monomial()
            return inv ** (-n)
        out = ExactScalar.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_monomial(self) -> int | None:
        """Return k if this equals zeta^k * 2^(pow2/2) * 3^(pow3/2), else None."""
        for k in range(24):
            if self.coeffs == _zeta_power(k):
                return k
        for k in range(24):
            if self.coeffs == tuple(-c for c in _zeta_power(k)):
                return (k + 12) % 24
        return None

    def inverse_monomial(self) -> "ExactScalar":
        """Exact inverse, defined for monomials zeta^k 2^(a/2) 3^(b/2) only."""
        k = self.is_monomial()
        if k is None:
            raise ValueError("only monomial scalars are invertible exactly")
        return ExactScalar.monomial((24 - k) % 24, -self.pow2, -self.pow3)

    # -- numerics ----------------------------------------------------------

    def to_complex(self) -> complex:
        z = sum(c * _ZETA ** k for k, c in enumerate(self.coeffs) if c)
        return z * 2.0 ** (self.pow2 / 2) * 3.0 ** (self.pow3 / 2)

    def __repr__(self) -> str:
        if self.is_zero:
            return "ExactScalar(0)"
        return (f"ExactScalar({list(self.coeffs)}, 2^{self.pow2}/2,"
                f" 3^{self.pow3}/2 ~ {self.to_complex():.6g})")

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {"coeffs": list(self.coeffs), "pow2": self.pow2, "pow3": self.pow3}

    @staticmethod
    def from_json(obj: dict) -> "ExactScalar":
        return ExactScalar(tuple(obj["coeffs"]), obj["pow2"], obj["pow3"])


ZERO = ExactScalar.zero()
ONE = ExactScalar.one()


def snap_to_lattice(z: complex, tol: float = 1e-9) -> ExactScalar | None:
    """Snap a complex number to the nearest monomial zeta^k 2^(a/2) 3^(b/2).

    Returns None when nothing on the candidate lattice matches within the
    relative tolerance.  Zero snaps to the exact zero.
    """
    mag = abs(z)
    if mag < tol:
        return ZERO
    best = None
    log_mag = math.log(mag)
    for a in range(-16, 17):
        for b in range(-16, 17):
            r = log_mag - a * math.log(2) / 2 - b * math.log(3) / 2
            if abs(r) > 1e-6:
                continue
            ang = cmath.phase(z) / (math.pi / 12)
            k = round(ang) % 24
            cand = ExactScalar.monomial(k, a, b)
            if abs(cand.to_complex() - z) <= tol * mag:
                score = abs(a) + abs(b)
                if best is None or score < best[0]:
                    best = (score, cand)
    return best[1] if best else None
