"""Scalar nonlinearity catalogue with growth-envelope metadata.

Each :class:`Nonlinearity` bundles a scalar function applied componentwise,
an optional inverse, and the constants of a growth envelope

    |f(y)| <= alpha * |y|**e + beta        for all real y,

where ``e`` is the declared ``exponent_role``.  Bounded functions carry
``alpha = 0`` and a free exponent (``exponent_role = None``), meaning the
envelope holds for any exponent in ``[0, 1]``.  The envelope constants feed
the stability checker; callers may tighten or override them when they know
more about the operating range.

``zeros`` lists the isolated real roots of the function when they are known
in closed form (used to regularise reciprocal weights); ``None`` marks a
function whose root set is not a finite set of isolated points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import FunctionDomainError

ArrayLike = "np.ndarray | float"


@dataclass(frozen=True)
class Nonlinearity:
    """A componentwise scalar function plus envelope metadata.

    Instances compare equal when kind and parameters match, which lets
    vector evaluators group identical nodes and evaluate them in one shot.
    """

    kind: str
    params: tuple[float, ...] = ()
    envelope: tuple[float, float] | None = None
    exponent_role: float | None = None
    invertible: bool = False
    zeros: tuple[float, ...] | None = ()

    def __post_init__(self):
        if self.envelope is not None:
            alpha, beta = self.envelope
            if alpha < 0 or beta < 0:
                raise ValueError(f"envelope constants must be >= 0, got {self.envelope}")
        if self.exponent_role is not None and not 0 <= self.exponent_role <= 1:
            raise ValueError(
                f"exponent_role must lie in [0, 1], got {self.exponent_role}"
            )

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, y):
        """Apply the function elementwise to ``y`` (scalar or array)."""
        out = _EVAL[self.kind](np.asarray(y, dtype=float), *self.params)
        return float(out) if np.isscalar(y) or np.ndim(y) == 0 else out

    def evaluate_inverse(self, y):
        """Apply the inverse elementwise; raises on out-of-domain input.

        Only functions with ``invertible=True`` support this.  Domain
        violations raise :class:`FunctionDomainError` naming the first
        offending value.
        """
        if not self.invertible:
            raise ValueError(f"{self.kind}{self.params} has no implemented inverse")
        arr = np.asarray(y, dtype=float)
        bad = _INV_DOMAIN[self.kind](arr, *self.params)
        if bad is not None and np.any(bad):
            idx = np.unravel_index(int(np.argmax(bad)), arr.shape) if arr.ndim else ()
            value = float(arr[idx]) if arr.ndim else float(arr)
            raise FunctionDomainError(
                f"input outside the domain of {self.describe()} inverse", value
            )
        out = _INV[self.kind](arr, *self.params)
        return float(out) if np.isscalar(y) or np.ndim(y) == 0 else out

    def inverse_domain_mask(self, y: np.ndarray) -> np.ndarray | None:
        """Boolean mask of entries outside the inverse domain (None = all ok)."""
        if not self.invertible:
            raise ValueError(f"{self.kind}{self.params} has no implemented inverse")
        return _INV_DOMAIN[self.kind](np.asarray(y, dtype=float), *self.params)

    def describe(self) -> str:
        if self.params:
            inner = ", ".join(f"{p:g}" for p in self.params)
            return f"{self.kind}({inner})"
        return self.kind

    def with_envelope(self, alpha: float, beta: float,
                      exponent_role: float | None = None) -> "Nonlinearity":
        """Copy of this function with overridden envelope constants."""
        return Nonlinearity(
            kind=self.kind,
            params=self.params,
            envelope=(float(alpha), float(beta)),
            exponent_role=exponent_role if exponent_role is not None else self.exponent_role,
            invertible=self.invertible,
            zeros=self.zeros,
        )


def _signed_power(y, a):
    return np.copysign(np.abs(y) ** a, y)


_EVAL: dict[str, Callable] = {
    "identity": lambda y: y,
    "constant_one": lambda y: np.ones_like(y),
    "sign_power": _signed_power,
    "tanh": np.tanh,
    "tanh_shifted": lambda y, c: np.tanh(y) + c,
    "limiter": lambda y, lo, hi: np.clip(y, lo, hi),
    "sin_plus_sign_power": lambda y, freq, a: np.sin(freq * y) + _signed_power(y, a),
}

_INV: dict[str, Callable] = {
    "identity": lambda y: y,
    "sign_power": lambda y, a: _signed_power(y, 1.0 / a),
    "tanh": np.arctanh,
    "tanh_shifted": lambda y, c: np.arctanh(y - c),
}

# Per kind: mask of inputs outside the inverse's domain (None when the
# inverse is defined on the whole line).
_INV_DOMAIN: dict[str, Callable] = {
    "identity": lambda y: None,
    "sign_power": lambda y, a: None,
    "tanh": lambda y: np.abs(y) >= 1.0,
    "tanh_shifted": lambda y, c: np.abs(y - c) >= 1.0,
}


# -- catalogue -------------------------------------------------------------

def identity() -> Nonlinearity:
    """f(y) = y."""
    return Nonlinearity(
        kind="identity",
        envelope=(1.0, 0.0),
        exponent_role=1.0,
        invertible=True,
        zeros=(0.0,),
    )


def constant_one() -> Nonlinearity:
    """f(y) = 1."""
    return Nonlinearity(
        kind="constant_one",
        envelope=(0.0, 1.0),
        exponent_role=None,
        invertible=False,
        zeros=(),
    )


def sign_power(a: float) -> Nonlinearity:
    """f(y) = sign(y) |y|**a with a > 0.

    For ``a < 1`` the conservative global envelope ``|y|**a <= |y| + 1``
    is declared (alpha=1, beta=1; the bound ``alpha=1, beta=0`` would fail
    inside the unit interval); ``a = 1`` is the identity with its tight
    envelope.  For ``a > 1`` no linear-growth envelope exists and none is
    declared.  The inverse is ``sign_power(1/a)``.
    """
    if a <= 0:
        raise ValueError(f"sign_power exponent must be > 0, got {a}")
    bounded_growth = a <= 1.0
    if a == 1.0:
        env = (1.0, 0.0)
    elif a < 1.0:
        env = (1.0, 1.0)
    else:
        env = None
    return Nonlinearity(
        kind="sign_power",
        params=(float(a),),
        envelope=env,
        exponent_role=float(a) if bounded_growth else None,
        invertible=True,
        zeros=(0.0,),
    )


def tanh() -> Nonlinearity:
    """f(y) = tanh(y); bounded, inverse defined on (-1, 1)."""
    return Nonlinearity(
        kind="tanh",
        envelope=(0.0, 1.0),
        exponent_role=None,
        invertible=True,
        zeros=(0.0,),
    )


def tanh_shifted(c: float) -> Nonlinearity:
    """f(y) = tanh(y) + c; bounded with range (c - 1, c + 1)."""
    c = float(c)
    if abs(c) < 1.0:
        fn_zeros: tuple[float, ...] | None = (math.atanh(-c),)
    else:
        fn_zeros = ()
    return Nonlinearity(
        kind="tanh_shifted",
        params=(c,),
        envelope=(0.0, 1.0 + abs(c)),
        exponent_role=None,
        invertible=True,
        zeros=fn_zeros,
    )


def limiter(lo: float = -1.0, hi: float = 1.0) -> Nonlinearity:
    """f(y) = clamp(y, lo, hi); bounded and non-invertible."""
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        raise ValueError(f"limiter needs lo < hi, got ({lo}, {hi})")
    if lo < 0.0 < hi:
        fn_zeros: tuple[float, ...] | None = (0.0,)
    elif lo == 0.0 or hi == 0.0:
        # The function is zero on a half-line, not at isolated points.
        fn_zeros = None
    else:
        fn_zeros = ()
    return Nonlinearity(
        kind="limiter",
        params=(lo, hi),
        envelope=(0.0, max(abs(lo), abs(hi))),
        exponent_role=None,
        invertible=False,
        zeros=fn_zeros,
    )


def sin_plus_sign_power(freq: float, a: float) -> Nonlinearity:
    """f(y) = sin(freq * y) + sign(y) |y|**a with 0 < a <= 1.

    Envelope ``|f(y)| <= |y|**a + 1``.  The only real root is 0: for
    ``y > 0`` the power term dominates the sine's most negative values, and
    the function is odd.
    """
    if not 0 < a <= 1:
        raise ValueError(f"sin_plus_sign_power exponent must lie in (0, 1], got {a}")
    return Nonlinearity(
        kind="sin_plus_sign_power",
        params=(float(freq), float(a)),
        envelope=(1.0, 1.0),
        exponent_role=float(a),
        invertible=False,
        zeros=(0.0,),
    )


_FACTORIES: dict[str, Callable[..., Nonlinearity]] = {
    "identity": identity,
    "constant_one": constant_one,
    "sign_power": sign_power,
    "tanh": tanh,
    "tanh_shifted": tanh_shifted,
    "limiter": limiter,
    "sin_plus_sign_power": sin_plus_sign_power,
}


def from_spec(spec: "str | dict") -> Nonlinearity:
    """Build a nonlinearity from a plain-data spec.

    A string is a parameterless kind; a dict holds ``kind`` plus positional
    ``params`` and optional ``envelope``/``exponent_role`` overrides.
    """
    if isinstance(spec, str):
        spec = {"kind": spec}
    if "kind" not in spec:
        raise ValueError(f"nonlinearity spec missing 'kind': {spec!r}")
    kind = spec["kind"]
    if kind not in _FACTORIES:
        raise ValueError(
            f"unknown nonlinearity kind {kind!r}; "
            f"expected one of {sorted(_FACTORIES)}"
        )
    params = spec.get("params", ())
    try:
        fn = _FACTORIES[kind](*params)
    except TypeError as exc:
        raise ValueError(f"bad params for {kind!r}: {params!r}") from exc
    if "envelope" in spec and spec["envelope"] is not None:
        alpha, beta = spec["envelope"]
        fn = fn.with_envelope(alpha, beta, spec.get("exponent_role"))
    elif "exponent_role" in spec and spec["exponent_role"] is not None:
        if fn.envelope is None:
            raise ValueError(
                f"exponent_role override for {kind!r} requires an envelope"
            )
        fn = fn.with_envelope(*fn.envelope, spec["exponent_role"])
    return fn


def to_spec(fn: Nonlinearity) -> dict:
    """Plain-data spec of a nonlinearity, inverse of :func:`from_spec`."""
    spec: dict = {"kind": fn.kind}
    if fn.params:
        spec["params"] = list(fn.params)
    reference = _FACTORIES[fn.kind](*fn.params)
    if fn.envelope != reference.envelope or fn.exponent_role != reference.exponent_role:
        spec["envelope"] = list(fn.envelope) if fn.envelope else None
        spec["exponent_role"] = fn.exponent_role
    return spec
