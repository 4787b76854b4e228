"""Semirings selecting how path weights combine in a transitive closure.

``times`` combines consecutive edges along a path, ``plus`` combines
alternative paths. Both operate elementwise on numpy arrays. The five
built-in choices are:

================  =========  =========  ======  ======
name              plus       times      zero    one
================  =========  =========  ======  ======
boolean           or (max)   and (min)  0       1
pollution         +          *          0       1
influence         max        *          0       1
shortest_path     min        +          inf     0
max_capacity      max        min        0       inf
================  =========  =========  ======  ======
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import SemiringViolation

__all__ = ["Semiring", "SEMIRINGS", "get_semiring", "check_semiring"]


def _identity(w):
    return np.asarray(w, dtype=float)


@dataclass(frozen=True)
class Semiring:
    """The algebra ``(plus, times, zero, one)``.

    ``sample(rng, size)`` draws operands from the carrier set for the
    randomized law checks. ``encode`` maps raw edge weights into the
    carrier set before closing (boolean maps every edge to 1).
    """

    name: str
    plus: Callable
    times: Callable
    zero: float
    one: float
    sample: Callable
    idempotent: bool = False
    encode: Callable = field(default=_identity)

    @property
    def is_ufunc(self):
        return isinstance(self.plus, np.ufunc) and isinstance(self.times, np.ufunc)

    def check(self, n_triples=200, tol=1e-9, seed=0):
        check_semiring(self, n_triples=n_triples, tol=tol, seed=seed)
        return self


def _sample_boolean(rng, size):
    return rng.integers(0, 2, size=size).astype(float)


def _sample_signed(rng, size):
    return rng.uniform(-1.0, 1.0, size=size)


def _sample_unit(rng, size):
    x = rng.uniform(0.0, 1.0, size=size)
    x[rng.random(size) < 0.1] = 0.0
    return x


def _sample_extended_positive(rng, size):
    x = rng.exponential(3.0, size=size)
    x[rng.random(size) < 0.1] = np.inf
    x[rng.random(size) < 0.1] = 0.0
    return x


SEMIRINGS = {
    "boolean": Semiring(
        "boolean", np.maximum, np.minimum, 0.0, 1.0, _sample_boolean,
        idempotent=True, encode=lambda w: (np.asarray(w) != 0).astype(float),
    ),
    "pollution": Semiring("pollution", np.add, np.multiply, 0.0, 1.0, _sample_signed),
    "influence": Semiring("influence", np.maximum, np.multiply, 0.0, 1.0, _sample_unit, idempotent=True),
    "shortest_path": Semiring(
        "shortest_path", np.minimum, np.add, np.inf, 0.0, _sample_extended_positive, idempotent=True,
    ),
    "max_capacity": Semiring(
        "max_capacity", np.maximum, np.minimum, 0.0, np.inf, _sample_extended_positive, idempotent=True,
    ),
}

_ALIASES = {
    "shortest-path": "shortest_path",
    "shortestpath": "shortest_path",
    "capacity": "max_capacity",
    "max-capacity": "max_capacity",
}


def get_semiring(which) -> Semiring:
    """Return a built-in semiring by name (CLI spellings accepted) or pass a Semiring through."""
    if isinstance(which, Semiring):
        return which
    key = _ALIASES.get(str(which).lower(), str(which).lower())
    try:
        return SEMIRINGS[key]
    except KeyError:
        raise ValueError(f"unknown semiring {which!r}; choose from {sorted(SEMIRINGS)}") from None


def _close(a, b, tol):
    return np.isclose(a, b, rtol=tol, atol=tol) | ((a == b) & np.isinf(a))


def check_semiring(s: Semiring, n_triples=200, tol=1e-9, seed=0):
    """Randomized check of the semiring laws; raises SemiringViolation on the first failure."""
    rng = np.random.default_rng(seed)
    u, v, w = (np.asarray(s.sample(rng, n_triples), dtype=float) for _ in range(3))
    zero = np.full(n_triples, s.zero)
    one = np.full(n_triples, s.one)
    P, T = s.plus, s.times
    with np.errstate(invalid="ignore", over="ignore"):
        laws = {
            "plus commutative": (P(u, v), P(v, u)),
            "plus associative": (P(P(u, v), w), P(u, P(v, w))),
            "plus identity": (P(u, zero), u),
            "times associative": (T(T(u, v), w), T(u, T(v, w))),
            "times left identity": (T(one, u), u),
            "times right identity": (T(u, one), u),
            "left distributive": (T(u, P(v, w)), P(T(u, v), T(u, w))),
            "right distributive": (T(P(u, v), w), P(T(u, w), T(v, w))),
            "zero annihilates left": (T(zero, u), zero),
            "zero annihilates right": (T(u, zero), zero),
        }
        for law, (lhs, rhs) in laws.items():
            ok = _close(np.asarray(lhs, dtype=float), np.asarray(rhs, dtype=float), tol)
            if not np.all(ok):
                i = int(np.flatnonzero(~ok)[0])
                raise SemiringViolation(
                    f"semiring {s.name!r} violates {law} at u={u[i]}, v={v[i]}, w={w[i]}"
                )
