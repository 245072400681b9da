"""Vertex weights, gauge transformations and six-vertex configurations.

Conventions used throughout the package:

* Vertex ``(i, j)`` sits in column ``i`` and row ``j`` (0-based here, rows
  counted from the bottom).
* A vertex is described by the occupancy quadruple ``(i1, j1; i2, j2)``:
  bottom, left (incoming) and top, right (outgoing) edges.
* Column ``i`` carries spectral parameter ``x[i]``, row ``j`` carries ``y[j]``,
  and the vertex uses ``u = x[i] * y[j]``.
"""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Protocol, Sequence, Union

import numpy as np

SINGULAR_TOL = 1e-14


class SingularParameterError(ValueError):
    """Raised when weights hit a pole (1 - t u = 0) or a division by zero."""


class ConfigurationError(ValueError):
    """Raised for edge grids violating path conservation or boundary data."""


class VertexType(enum.IntEnum):
    A1 = 0
    A2 = 1
    B1 = 2
    B2 = 3
    C1 = 4
    C2 = 5

    @property
    def edges(self) -> tuple[int, int, int, int]:
        return VERTEX_EDGES[self]

    @property
    def symbol(self) -> str:
        return str(int(self) + 1)

    @classmethod
    def from_edges(cls, i1: int, j1: int, i2: int, j2: int) -> "VertexType":
        try:
            return _EDGES_TO_TYPE[(i1, j1, i2, j2)]
        except KeyError:
            raise ConfigurationError(
                f"occupancies ({i1},{j1};{i2},{j2}) are not a six-vertex state"
            ) from None


# (bottom, left; top, right)
VERTEX_EDGES = {
    VertexType.A1: (0, 0, 0, 0),
    VertexType.A2: (1, 1, 1, 1),
    VertexType.B1: (1, 0, 1, 0),
    VertexType.B2: (0, 1, 0, 1),
    VertexType.C1: (1, 0, 0, 1),
    VertexType.C2: (0, 1, 1, 0),
}
_EDGES_TO_TYPE = {v: k for k, v in VERTEX_EDGES.items()}

# Lookup indexed by bottom*8 + left*4 + top*2 + right; -1 marks forbidden states.
TYPE_LOOKUP = np.full(16, -1, dtype=np.int64)
for _vt, (_b, _l, _t, _r) in VERTEX_EDGES.items():
    TYPE_LOOKUP[_b * 8 + _l * 4 + _t * 2 + _r] = int(_vt)


@dataclass(frozen=True)
class WeightTable:
    a1: complex
    a2: complex
    b1: complex
    b2: complex
    c1: complex
    c2: complex

    def as_array(self) -> np.ndarray:
        """Weights ordered as :class:`VertexType` (a1, a2, b1, b2, c1, c2)."""
        return np.array(
            [self.a1, self.a2, self.b1, self.b2, self.c1, self.c2], dtype=complex
        )

    def __getitem__(self, vt: VertexType) -> complex:
        return self.as_array()[int(vt)]

    def delta(self) -> complex:
        return delta(self)

    def gauge_invariants(self) -> tuple[complex, complex]:
        """The two measure-determining ratios a1a2/b1b2 and a1a2/c1c2."""
        a = self.a1 * self.a2
        return a / (self.b1 * self.b2), a / (self.c1 * self.c2)

    @classmethod
    def uniform(cls, value: complex = 1.0) -> "WeightTable":
        return cls(value, value, value, value, value, value)

    @classmethod
    def symmetric(cls, a: complex, b: complex, c: complex) -> "WeightTable":
        return cls(a, a, b, b, c, c)


@dataclass(frozen=True)
class SpectralParams:
    u: complex
    t: complex

    def __post_init__(self):
        if abs(1 - self.t * self.u) < SINGULAR_TOL:
            raise SingularParameterError(f"1 - t*u vanishes for u={self.u}, t={self.t}")

    @property
    def regime(self) -> Optional[str]:
        """'real-positive', 'unit-circle', or None when no positivity regime applies."""
        u, t = complex(self.u), complex(self.t)
        if abs(u.imag) < 1e-14 and abs(t.imag) < 1e-14:
            ur, tr = u.real, t.real
            if (0 < ur < 1 and 0 < tr < 1) or (ur > 1 and tr > 1):
                return "real-positive"
        if abs(abs(u) - 1) < 1e-12 and abs(abs(t) - 1) < 1e-12:
            return "unit-circle"
        return None


def weights_from_spectral(p: SpectralParams) -> WeightTable:
    u, t = p.u, p.t
    den = 1 - t * u
    if abs(den) < SINGULAR_TOL:
        raise SingularParameterError(f"1 - t*u vanishes for u={u}, t={t}")
    return WeightTable(
        a1=1.0 + 0j,
        a2=1.0 + 0j,
        b1=complex((1 - u) / den),
        b2=complex(t * (1 - u) / den),
        c1=complex(u * (1 - t) / den),
        c2=complex((1 - t) / den),
    )


def spectral_weight_array(u, t) -> np.ndarray:
    """Vectorised weights: array of shape ``u.shape + (6,)`` in VertexType order."""
    u = np.asarray(u, dtype=complex)
    den = 1 - t * u
    if np.any(np.abs(den) < SINGULAR_TOL):
        raise SingularParameterError("1 - t*u vanishes at some site")
    out = np.empty(u.shape + (6,), dtype=complex)
    out[..., 0] = 1.0
    out[..., 1] = 1.0
    out[..., 2] = (1 - u) / den
    out[..., 3] = t * (1 - u) / den
    out[..., 4] = u * (1 - t) / den
    out[..., 5] = (1 - t) / den
    return out


def _sqrt_positive(z: complex) -> complex:
    z = complex(z)
    if abs(z.imag) <= 1e-14 * max(1.0, abs(z)) and z.real > 0:
        return complex(np.sqrt(z.real))
    return cmath.sqrt(z)


def delta(w: WeightTable) -> complex:
    """Anisotropy (a1a2 + b1b2 - c1c2) / (2 sqrt(a1a2b1b2)).

    The square root takes its positive value whenever the radicand is a
    positive real, otherwise the principal branch.
    """
    prod = w.a1 * w.a2 * w.b1 * w.b2
    if abs(prod) < SINGULAR_TOL:
        raise ZeroDivisionError("delta undefined: a1*a2*b1*b2 vanishes")
    num = w.a1 * w.a2 + w.b1 * w.b2 - w.c1 * w.c2
    return num / (2 * _sqrt_positive(prod))


GAUGE_KINDS = ("global-scale", "c-tilt", "a-tilt", "b-tilt")


def gauge_transform(w: WeightTable, kind: str, alpha: complex) -> WeightTable:
    if alpha == 0:
        raise ValueError("gauge parameter alpha must be nonzero")
    if kind == "global-scale":
        return WeightTable(*(alpha * x for x in (w.a1, w.a2, w.b1, w.b2, w.c1, w.c2)))
    if kind == "c-tilt":
        return WeightTable(w.a1, w.a2, w.b1, w.b2, alpha * w.c1, w.c2 / alpha)
    if kind == "a-tilt":
        return WeightTable(alpha * w.a1, w.a2 / alpha, w.b1, w.b2, w.c1, w.c2)
    if kind == "b-tilt":
        return WeightTable(w.a1, w.a2, alpha * w.b1, w.b2 / alpha, w.c1, w.c2)
    raise ValueError(f"unknown gauge kind {kind!r}; expected one of {GAUGE_KINDS}")


# ---------------------------------------------------------------------------
# site-indexed weights


class WeightField(Protocol):
    def array(self, width: int, height: int) -> np.ndarray:
        """Complex array of shape (width, height, 6)."""


@dataclass(frozen=True)
class UniformField:
    weights: WeightTable

    def array(self, width: int, height: int) -> np.ndarray:
        return np.broadcast_to(self.weights.as_array(), (width, height, 6)).copy()


@dataclass(frozen=True)
class SpectralField:
    """Inhomogeneous spectral weights with u = x[i] * y[j]."""

    x: tuple
    y: tuple
    t: complex

    def __init__(self, x: Iterable, y: Iterable, t: complex):
        object.__setattr__(self, "x", tuple(complex(v) for v in x))
        object.__setattr__(self, "y", tuple(complex(v) for v in y))
        object.__setattr__(self, "t", complex(t))

    def u(self) -> np.ndarray:
        return np.outer(np.array(self.x), np.array(self.y))

    def array(self, width: int, height: int) -> np.ndarray:
        if len(self.x) != width or len(self.y) != height:
            raise ValueError(
                f"field is {len(self.x)}x{len(self.y)}, domain is {width}x{height}"
            )
        return spectral_weight_array(self.u(), self.t)


Weights = Union[WeightTable, WeightField]


def as_field(w: Weights) -> WeightField:
    return UniformField(w) if isinstance(w, WeightTable) else w


# ---------------------------------------------------------------------------
# boundaries and configurations


def _bits(v) -> Optional[tuple]:
    if v is None:
        return None
    return tuple(int(b) for b in v)


@dataclass(frozen=True)
class BoundaryData:
    """Boundary occupancies; ``top_out``/``right_out`` may be None for free exits."""

    bottom_in: tuple
    left_in: tuple
    top_out: Optional[tuple] = None
    right_out: Optional[tuple] = None

    def __post_init__(self):
        for name in ("bottom_in", "left_in", "top_out", "right_out"):
            object.__setattr__(self, name, _bits(getattr(self, name)))
        for name in ("bottom_in", "left_in", "top_out", "right_out"):
            v = getattr(self, name)
            if v is not None and any(b not in (0, 1) for b in v):
                raise ConfigurationError(f"{name} must be a 0/1 vector")
        if self.top_out is not None and len(self.top_out) != len(self.bottom_in):
            raise ConfigurationError("top and bottom boundaries differ in width")
        if self.right_out is not None and len(self.right_out) != len(self.left_in):
            raise ConfigurationError("left and right boundaries differ in height")
        if self.is_fixed and (
            sum(self.bottom_in) + sum(self.left_in)
            != sum(self.top_out) + sum(self.right_out)
        ):
            raise ConfigurationError("boundary data does not conserve paths")

    @property
    def width(self) -> int:
        return len(self.bottom_in)

    @property
    def height(self) -> int:
        return len(self.left_in)

    @property
    def is_fixed(self) -> bool:
        return self.top_out is not None and self.right_out is not None

    @classmethod
    def dwbc(cls, n: int) -> "BoundaryData":
        """Paths enter through every bottom edge and leave through every right edge."""
        return cls((1,) * n, (0,) * n, (0,) * n, (1,) * n)

    @classmethod
    def step_free(cls, width: int, height: Optional[int] = None) -> "BoundaryData":
        """Step initial condition (all bottom edges occupied) with free exits."""
        height = width if height is None else height
        return cls((1,) * width, (0,) * height, None, None)


@dataclass
class SixVertexConfig:
    """Edge-occupancy grids of a configuration.

    ``vertical[i, j]`` is the vertical edge entering row ``j`` in column ``i``
    from below (``j = height`` is the top exit); ``horizontal[i, j]`` is the
    horizontal edge entering column ``i`` in row ``j`` from the left
    (``i = width`` is the right exit).
    """

    width: int
    height: int
    vertical: np.ndarray
    horizontal: np.ndarray
    boundary: Optional[BoundaryData] = None
    _types: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.vertical = np.asarray(self.vertical, dtype=np.int8)
        self.horizontal = np.asarray(self.horizontal, dtype=np.int8)
        if self.vertical.shape != (self.width, self.height + 1):
            raise ConfigurationError(f"vertical grid must be {(self.width, self.height + 1)}")
        if self.horizontal.shape != (self.width + 1, self.height):
            raise ConfigurationError(
                f"horizontal grid must be {(self.width + 1, self.height)}"
            )
        for grid in (self.vertical, self.horizontal):
            if grid.size and (grid.max() > 1 or grid.min() < 0):
                raise ConfigurationError("edge occupancies must be 0/1")
        self.validate()
        if self.boundary is None:
            self.boundary = self.observed_boundary()
        else:
            self._check_boundary(self.boundary)

    def validate(self) -> None:
        v, h = self.vertical, self.horizontal
        incoming = v[:, :-1] + h[:-1, :]
        outgoing = v[:, 1:] + h[1:, :]
        bad = np.argwhere(incoming != outgoing)
        if bad.size:
            i, j = bad[0]
            raise ConfigurationError(f"path conservation fails at vertex ({i}, {j})")
        self._types = None

    def observed_boundary(self) -> BoundaryData:
        return BoundaryData(
            tuple(self.vertical[:, 0]),
            tuple(self.horizontal[0, :]),
            tuple(self.vertical[:, -1]),
            tuple(self.horizontal[-1, :]),
        )

    def _check_boundary(self, bd: BoundaryData) -> None:
        obs = self.observed_boundary()
        if obs.bottom_in != bd.bottom_in or obs.left_in != bd.left_in:
            raise ConfigurationError("incoming boundary differs from declared data")
        if bd.top_out is not None and obs.top_out != bd.top_out:
            raise ConfigurationError("top boundary differs from declared data")
        if bd.right_out is not None and obs.right_out != bd.right_out:
            raise ConfigurationError("right boundary differs from declared data")

    def vertex_types(self) -> np.ndarray:
        """Integer VertexType codes, shape (width, height)."""
        if self._types is None:
            v, h = self.vertical.astype(np.int64), self.horizontal.astype(np.int64)
            code = v[:, :-1] * 8 + h[:-1, :] * 4 + v[:, 1:] * 2 + h[1:, :]
            self._types = TYPE_LOOKUP[code]
        return self._types

    def vertex_type(self, i: int, j: int) -> VertexType:
        return VertexType(int(self.vertex_types()[i, j]))

    def type_counts(self) -> np.ndarray:
        return np.bincount(self.vertex_types().ravel(), minlength=6)

    def top_exits(self) -> int:
        return int(self.vertical[:, -1].sum())

    def height_function(self) -> np.ndarray:
        """Heights on faces, shape (width+1, height+1), 0 at the bottom-left face.

        Face ``(a, b)`` lies left of column ``a`` and below row ``b``.
        Crossing a path rightward or downward raises the height by one.
        """
        w, hgt = self.width, self.height
        H = np.zeros((w + 1, hgt + 1), dtype=np.int64)
        H[1:, 0] = np.cumsum(self.vertical[:, 0])
        for b in range(1, hgt + 1):
            H[0, b] = H[0, b - 1] - self.horizontal[0, b - 1]
            H[1:, b] = H[0, b] + np.cumsum(self.vertical[:, b])
        return H

    @classmethod
    def from_types(cls, types: np.ndarray) -> "SixVertexConfig":
        types = np.asarray(types, dtype=np.int64)
        w, hgt = types.shape
        v = np.zeros((w, hgt + 1), dtype=np.int8)
        h = np.zeros((w + 1, hgt), dtype=np.int8)
        edges = np.array([VERTEX_EDGES[VertexType(k)] for k in range(6)], dtype=np.int8)
        e = edges[types]
        v[:, :-1] = e[..., 0]
        h[:-1, :] = e[..., 1]
        # neighbouring vertices must agree on the shared edge
        if np.any(e[:, :-1, 2] != e[:, 1:, 0]) or np.any(e[:-1, :, 3] != e[1:, :, 1]):
            raise ConfigurationError("vertex types disagree on a shared edge")
        v[:, -1] = e[:, -1, 2]
        h[-1, :] = e[-1, :, 3]
        return cls(w, hgt, v, h)

    def to_text(self) -> str:
        """Serialize as ``6VX w h`` followed by one line per row, bottom row first."""
        t = self.vertex_types()
        lines = [f"6VX {self.width} {self.height}"]
        for j in range(self.height):
            lines.append("".join(str(int(t[i, j]) + 1) for i in range(self.width)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SixVertexConfig":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        head = lines[0].split()
        if len(head) != 3 or head[0] != "6VX":
            raise ConfigurationError("missing '6VX w h' header")
        w, hgt = int(head[1]), int(head[2])
        rows = lines[1:]
        if len(rows) != hgt or any(len(r) != w for r in rows):
            raise ConfigurationError("grid body does not match header dimensions")
        types = np.empty((w, hgt), dtype=np.int64)
        for j, row in enumerate(rows):
            for i, ch in enumerate(row):
                if ch not in "123456":
                    raise ConfigurationError(f"bad vertex symbol {ch!r}")
                types[i, j] = int(ch) - 1
        return cls.from_types(types)

    @classmethod
    def dwbc_identity(cls, n: int) -> "SixVertexConfig":
        """The DWBC state whose path from column i turns right in row i."""
        i = np.arange(n)[:, None]
        v = (np.arange(n + 1)[None, :] <= i).astype(np.int8)
        h = (np.arange(n + 1)[:, None] > np.arange(n)[None, :]).astype(np.int8)
        return cls(n, n, v, h, BoundaryData.dwbc(n))


def boltzmann_weight(cfg: SixVertexConfig, w: Weights) -> complex:
    """Product of vertex weights; ``w`` is a WeightTable or a site-indexed field."""
    arr = as_field(w).array(cfg.width, cfg.height)
    t = cfg.vertex_types()
    ii, jj = np.indices(t.shape)
    return complex(np.prod(arr[ii, jj, t]))


def asm_count(n: int) -> int:
    """Number of n x n alternating sign matrices (= DWBC configurations)."""
    from math import factorial

    num, den = 1, 1
    for i in range(n):
        num *= factorial(3 * i + 1)
        den *= factorial(n + i)
    return num // den
