"""Scalars of the three involutive division rings: reals, complexes, quaternions.

A quaternion is stored as four reals ``(w, x, y, z)`` meaning ``w + x i + y j + z k``.
The complex split used by the adjoint embedding is ``q = a + b j`` with
``a = w + x i`` and ``b = y + z i``; ``b`` sits to the LEFT of ``j``.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass

__all__ = [
    "ScalarKind",
    "KindMismatchError",
    "Scalar",
    "quat_to_complex_pair",
    "complex_pair_to_quat",
    "parse_scalar",
    "format_scalar",
]


class ScalarKind(enum.Enum):
    REAL = "real"
    COMPLEX = "complex"
    QUATERNION = "quaternion"

    @property
    def ncomp(self) -> int:
        """Number of real components per scalar."""
        return _NCOMP[self]

    @classmethod
    def parse(cls, text: str | ScalarKind) -> ScalarKind:
        if isinstance(text, ScalarKind):
            return text
        key = text.strip().lower()
        aliases = {"r": "real", "c": "complex", "h": "quaternion", "q": "quaternion"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValueError(f"unknown scalar kind {text!r}") from None


_NCOMP = {ScalarKind.REAL: 1, ScalarKind.COMPLEX: 2, ScalarKind.QUATERNION: 4}


class KindMismatchError(TypeError):
    """Raised when values of different scalar kinds are combined."""


def _hamilton(p: tuple[float, ...], q: tuple[float, ...]) -> tuple[float, ...]:
    pw, px, py, pz = p
    qw, qx, qy, qz = q
    return (
        pw * qw - px * qx - py * qy - pz * qz,
        pw * qx + px * qw + py * qz - pz * qy,
        pw * qy - px * qz + py * qw + pz * qx,
        pw * qz + px * qy - py * qx + pz * qw,
    )


@dataclass(frozen=True)
class Scalar:
    """An element of R, C or H with value semantics."""

    kind: ScalarKind
    comps: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.comps) != self.kind.ncomp:
            raise ValueError(
                f"{self.kind.value} scalar needs {self.kind.ncomp} components, "
                f"got {len(self.comps)}"
            )
        object.__setattr__(self, "comps", tuple(float(c) for c in self.comps))

    @classmethod
    def real(cls, w: float) -> Scalar:
        return cls(ScalarKind.REAL, (w,))

    @classmethod
    def complex(cls, w: float, x: float = 0.0) -> Scalar:
        return cls(ScalarKind.COMPLEX, (w, x))

    @classmethod
    def quaternion(cls, w: float, x: float = 0.0, y: float = 0.0, z: float = 0.0) -> Scalar:
        return cls(ScalarKind.QUATERNION, (w, x, y, z))

    @classmethod
    def zero(cls, kind: ScalarKind) -> Scalar:
        return cls(kind, (0.0,) * kind.ncomp)

    @classmethod
    def one(cls, kind: ScalarKind) -> Scalar:
        return cls(kind, (1.0,) + (0.0,) * (kind.ncomp - 1))

    def _check(self, other: Scalar) -> None:
        if not isinstance(other, Scalar):
            raise TypeError(f"expected Scalar, got {type(other).__name__}")
        if other.kind is not self.kind:
            raise KindMismatchError(f"{self.kind.value} vs {other.kind.value}")

    def __add__(self, other: Scalar) -> Scalar:
        self._check(other)
        return Scalar(self.kind, tuple(a + b for a, b in zip(self.comps, other.comps)))

    def __sub__(self, other: Scalar) -> Scalar:
        return self + (-other)

    def __neg__(self) -> Scalar:
        return Scalar(self.kind, tuple(-a for a in self.comps))

    def __mul__(self, other: Scalar) -> Scalar:
        self._check(other)
        if self.kind is ScalarKind.REAL:
            return Scalar.real(self.comps[0] * other.comps[0])
        if self.kind is ScalarKind.COMPLEX:
            z = complex(*self.comps) * complex(*other.comps)
            return Scalar.complex(z.real, z.imag)
        return Scalar(self.kind, _hamilton(self.comps, other.comps))

    def conj(self) -> Scalar:
        return Scalar(self.kind, (self.comps[0],) + tuple(-a for a in self.comps[1:]))

    def norm2(self) -> float:
        """Squared modulus, equal to the real part of ``q * conj(q)``."""
        return sum(a * a for a in self.comps)

    def __abs__(self) -> float:
        return math.sqrt(self.norm2())

    def inv(self) -> Scalar:
        n2 = self.norm2()
        if n2 == 0.0:
            raise ZeroDivisionError("inverse of zero scalar")
        return Scalar(self.kind, tuple(c / n2 for c in self.conj().comps))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.kind is other.kind and self.comps == other.comps

    def __hash__(self) -> int:
        return hash((self.kind, self.comps))

    def isclose(self, other: Scalar, tol: float = 1e-12) -> bool:
        self._check(other)
        return abs(self - other) <= tol * (1.0 + abs(other))

    def to_python(self) -> float | complex | tuple[float, ...]:
        if self.kind is ScalarKind.REAL:
            return self.comps[0]
        if self.kind is ScalarKind.COMPLEX:
            return complex(*self.comps)
        return self.comps

    def __str__(self) -> str:
        return format_scalar(self)


def quat_to_complex_pair(q: Scalar) -> tuple[Scalar, Scalar]:
    """Split ``q = a + b j`` into complex ``(a, b)``."""
    if q.kind is not ScalarKind.QUATERNION:
        raise KindMismatchError(f"expected quaternion, got {q.kind.value}")
    w, x, y, z = q.comps
    return Scalar.complex(w, x), Scalar.complex(y, z)


def complex_pair_to_quat(a: Scalar, b: Scalar) -> Scalar:
    for s in (a, b):
        if s.kind is not ScalarKind.COMPLEX:
            raise KindMismatchError(f"expected complex, got {s.kind.value}")
    return Scalar.quaternion(*a.comps, *b.comps)


_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_TERM = re.compile(rf"\s*([+-]?)\s*({_NUM})?\s*([ijk]?)\s*")
_UNIT_INDEX = {"": 0, "i": 1, "j": 2, "k": 3}
_UNIT_KIND = {0: ScalarKind.REAL, 1: ScalarKind.COMPLEX, 2: ScalarKind.QUATERNION,
              3: ScalarKind.QUATERNION}


def parse_scalar(text: str | float | int, kind: ScalarKind | None = None) -> Scalar:
    """Parse a scalar literal such as ``1.5``, ``1.5+2i`` or ``1-j+0.5k``.

    Without ``kind`` the narrowest kind holding every unit used is returned.
    With ``kind`` the value is promoted to it; units outside the kind are an error.
    """
    if isinstance(text, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(text, (int, float)):
        comps = [float(text), 0.0, 0.0, 0.0]
        used = 0
    else:
        s = text.strip()
        if not s:
            raise ValueError("empty scalar literal")
        comps = [0.0, 0.0, 0.0, 0.0]
        used = 0
        pos = 0
        while pos < len(s):
            m = _TERM.match(s, pos)
            if m is None or m.end() == pos or not (m.group(2) or m.group(3)):
                raise ValueError(f"malformed scalar literal {text!r}")
            sign = -1.0 if m.group(1) == "-" else 1.0
            if pos > 0 and not m.group(1):
                raise ValueError(f"missing sign between terms in {text!r}")
            mag = float(m.group(2)) if m.group(2) else 1.0
            idx = _UNIT_INDEX[m.group(3)]
            comps[idx] += sign * mag
            used = max(used, idx)
            pos = m.end()
    natural = _UNIT_KIND[used]
    if kind is None:
        kind = natural
    elif natural.ncomp > kind.ncomp:
        raise ValueError(f"literal {text!r} does not fit a {kind.value} scalar")
    return Scalar(kind, tuple(comps[: kind.ncomp]))


def _fmt(v: float) -> str:
    return format(v, ".17g")


def format_scalar(q: Scalar) -> str:
    """Render with 17 significant digits; zero imaginary parts are dropped."""
    out = _fmt(q.comps[0])
    parts = [out] if q.comps[0] != 0.0 else []
    for c, unit in zip(q.comps[1:], "ijk"):
        if c == 0.0:
            continue
        t = _fmt(c) + unit
        if parts and not t.startswith("-"):
            t = "+" + t
        parts.append(t)
    return "".join(parts) if parts else out
