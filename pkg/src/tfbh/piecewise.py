"""Piecewise functions on [0, 1] whose pieces are sums of c * x**e terms.

Exponents may be non-negative reals, which is what Caputo differentiation
produces when applied to ordinary polynomials.  Evaluation at an interior
breakpoint uses the piece to the LEFT of the breakpoint; this convention is
fixed and relied on by the tests (adjacent pieces agree at breakpoints for
every function built from the kernel formulas, so the choice only matters
for determinism).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UnsupportedOperationError

_EXP_INT_TOL = 1e-12


def _is_int(e: float) -> bool:
    return abs(e - round(e)) < _EXP_INT_TOL


@dataclass(frozen=True)
class PiecewiseFracPoly:
    """Piecewise sum-of-power-terms function on [0, 1].

    breakpoints: strictly increasing, breakpoints[0] == 0, breakpoints[-1] == 1.
    pieces: one term list per interval; each term is (coefficient, exponent),
            exponent >= 0 and distinct within a piece.
    """

    breakpoints: tuple[float, ...]
    pieces: tuple[tuple[tuple[float, float], ...], ...]
    singular_points: tuple[float, ...] = field(default=(), compare=False)

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        if bp.size < 2 or bp[0] != 0.0 or bp[-1] != 1.0:
            raise ValueError("breakpoints must span [0, 1]")
        if np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if len(self.pieces) != bp.size - 1:
            raise ValueError("need exactly one piece per interval")
        for terms in self.pieces:
            exps = [e for _, e in terms]
            if any(e < 0 for e in exps):
                raise ValueError("exponents must be non-negative")
            if len(set(round(e, 12) for e in exps)) != len(exps):
                raise ValueError("exponents within a piece must be distinct")

    @classmethod
    def from_pieces(cls, breakpoints, pieces, singular_points=()):
        """Build from float-ish inputs, dropping zero terms."""
        clean = tuple(
            tuple((float(c), float(e)) for c, e in terms if c != 0.0)
            for terms in pieces
        )
        return cls(tuple(float(b) for b in breakpoints), clean,
                   tuple(float(s) for s in singular_points))

    @classmethod
    def constant(cls, value: float) -> "PiecewiseFracPoly":
        return cls.from_pieces((0.0, 1.0), (((value, 0.0),),))

    def piece_index(self, x: float) -> int:
        idx = int(np.searchsorted(self.breakpoints, x, side="left")) - 1
        return min(max(idx, 0), len(self.pieces) - 1)

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        if np.any(x_arr < -1e-12) or np.any(x_arr > 1 + 1e-12):
            raise DomainError(f"argument outside [0, 1]: {x}")
        x_arr = np.clip(x_arr, 0.0, 1.0)
        scalar = x_arr.ndim == 0
        x_flat = np.atleast_1d(x_arr)
        out = np.zeros_like(x_flat)
        idx = np.searchsorted(self.breakpoints, x_flat, side="left") - 1
        idx = np.clip(idx, 0, len(self.pieces) - 1)
        for j, terms in enumerate(self.pieces):
            mask = idx == j
            if not mask.any():
                continue
            xj = x_flat[mask]
            acc = np.zeros_like(xj)
            for c, e in terms:
                if e == 0.0:
                    acc += c
                else:
                    # 0**e with e > 0 is 0; np.power handles that.
                    acc += c * np.power(xj, e)
            out[mask] = acc
        return float(out[0]) if scalar else out.reshape(x_arr.shape)

    def derivative(self, order: int = 1) -> "PiecewiseFracPoly":
        """Term-by-term power-rule derivative, taken piecewise."""
        if order < 0:
            raise ValueError("order must be non-negative")
        if order == 0:
            return self
        new_pieces = []
        for terms in self.pieces:
            out = []
            for c, e in terms:
                if _is_int(e) and round(e) < order:
                    continue  # vanishes classically
                if e < order:
                    raise UnsupportedOperationError(
                        f"cannot take order-{order} derivative of x**{e} term"
                    )
                coef = c
                for k in range(order):
                    coef *= e - k
                out.append((coef, e - order))
            new_pieces.append(tuple(out))
        return PiecewiseFracPoly.from_pieces(
            self.breakpoints, new_pieces, self.singular_points
        )

    # alias used by the inner-product oracles
    def deriv(self, order: int = 1) -> "PiecewiseFracPoly":
        return self.derivative(order)

    def scale(self, factor: float) -> "PiecewiseFracPoly":
        return PiecewiseFracPoly.from_pieces(
            self.breakpoints,
            tuple(tuple((factor * c, e) for c, e in terms) for terms in self.pieces),
            self.singular_points,
        )

    def __add__(self, other: "PiecewiseFracPoly") -> "PiecewiseFracPoly":
        bp = np.union1d(self.breakpoints, other.breakpoints)
        pieces = []
        for lo, hi in zip(bp[:-1], bp[1:]):
            mid = 0.5 * (lo + hi)
            terms: dict[float, float] = {}
            for src in (self, other):
                for c, e in src.pieces[src.piece_index(mid)]:
                    terms[e] = terms.get(e, 0.0) + c
            pieces.append(tuple((c, e) for e, c in sorted(terms.items()) if c != 0.0))
        return PiecewiseFracPoly.from_pieces(
            bp, pieces, tuple(set(self.singular_points) | set(other.singular_points))
        )

    @property
    def max_exponent(self) -> float:
        return max((e for terms in self.pieces for _, e in terms), default=0.0)

    def has_integer_exponents(self) -> bool:
        return all(_is_int(e) for terms in self.pieces for _, e in terms)
