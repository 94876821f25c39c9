"""F2 linear algebra on rational square classes.

A square class is represented by its signed squarefree kernel; a multiquadratic
field Q(sqrt(a1), ..., sqrt(ar)) is modeled by the F2-span of the classes ai
over coordinates indexed by -1 and the primes.  Containment, composita and
disjointness of such fields all reduce to exact linear algebra here.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import sympy

from .exactpoly import RatPoly, Rational, squarefree_kernel_support


class BaseNotContained(ValueError):
    """disjoint_over called with a base not contained in both subspaces."""


class DepthExhausted(RuntimeError):
    """Every inspected stream element lay in the given span; retry deeper."""


# A coordinate is -1 or a prime.  -1 sorts first, primes in increasing order.
def _coord_key(c: int) -> tuple[int, int]:
    return (0, 0) if c == -1 else (1, c)


@dataclass(frozen=True)
class SquareClass:
    """A rational square class: signed squarefree kernel plus its support."""

    kernel: int
    support: frozenset[int]  # coordinates with odd exponent: -1 and/or primes

    @classmethod
    def trivial(cls) -> "SquareClass":
        return cls(1, frozenset())

    @classmethod
    def from_kernel(cls, k: int) -> "SquareClass":
        """Build from a signed squarefree integer; rejects non-squarefree input."""
        if k == 0:
            raise ValueError("kernel must be nonzero")
        fac = sympy.factorint(abs(k))
        if any(e > 1 for e in fac.values()):
            raise ValueError(f"{k} is not squarefree")
        support = {int(p) for p in fac}
        if k < 0:
            support.add(-1)
        return cls(k, frozenset(support))

    @classmethod
    def _from_support(cls, support: frozenset[int]) -> "SquareClass":
        k = 1
        for c in support:
            k *= c
        return cls(k, support)

    @property
    def is_trivial(self) -> bool:
        return not self.support

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        return SquareClass._from_support(self.support ^ other.support)

    def __str__(self) -> str:
        return str(self.kernel)


def class_of(q: Rational) -> SquareClass:
    """The square class of a nonzero rational."""
    k, primes = squarefree_kernel_support(q)
    support = set(primes)
    if k < 0:
        support.add(-1)
    return SquareClass(k, frozenset(support))


def _pivot(vec: frozenset[int]) -> int:
    return min(vec, key=_coord_key)


def _reduce(vec: frozenset[int], basis: tuple[frozenset[int], ...]) -> frozenset[int]:
    # basis is in reduced echelon form ordered by pivot
    for b in basis:
        if _pivot(b) in vec:
            vec = vec ^ b
    return vec


@dataclass(frozen=True)
class ClassSubspace:
    """An F2-span of square classes in reduced echelon form.

    Models the multiquadratic extension of Q generated by the square roots of
    the basis kernels.  Immutable: extend/compositum return new subspaces.
    """

    basis: tuple[SquareClass, ...] = ()

    @classmethod
    def span(cls, classes: Iterable[SquareClass]) -> "ClassSubspace":
        V = cls()
        for c in classes:
            V = V.extend(c)
        return V

    @classmethod
    def from_kernels(cls, kernels: Iterable[int]) -> "ClassSubspace":
        return cls.span(SquareClass.from_kernel(k) for k in kernels)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _vectors(self) -> tuple[frozenset[int], ...]:
        return tuple(c.support for c in self.basis)

    def member(self, c: SquareClass) -> bool:
        return not _reduce(c.support, self._vectors())

    def extend(self, c: SquareClass) -> "ClassSubspace":
        vecs = list(self._vectors())
        r = _reduce(c.support, tuple(vecs))
        if not r:
            return self
        # keep reduced form: clear the new pivot from existing vectors
        p = _pivot(r)
        vecs = [v ^ r if p in v else v for v in vecs]
        vecs.append(r)
        vecs.sort(key=lambda v: _coord_key(_pivot(v)))
        return ClassSubspace(tuple(SquareClass._from_support(v) for v in vecs))

    def compositum(self, other: "ClassSubspace") -> "ClassSubspace":
        V = self
        for c in other.basis:
            V = V.extend(c)
        return V

    __add__ = compositum

    def contains(self, other: "ClassSubspace") -> bool:
        return all(self.member(c) for c in other.basis)

    def kernels(self) -> list[int]:
        """Sorted basis kernels; the JSON encoding of the subspace."""
        return sorted(c.kernel for c in self.basis)

    def __str__(self) -> str:
        return "span{" + ", ".join(str(k) for k in self.kernels()) + "}"


def member(c: SquareClass, V: ClassSubspace) -> bool:
    return V.member(c)


def extend(V: ClassSubspace, c: SquareClass) -> ClassSubspace:
    return V.extend(c)


def compositum(V: ClassSubspace, W: ClassSubspace) -> ClassSubspace:
    return V.compositum(W)


def intersection_dim(V: ClassSubspace, W: ClassSubspace) -> int:
    return V.dim + W.dim - V.compositum(W).dim


def disjoint_over(V: ClassSubspace, W: ClassSubspace, B: ClassSubspace) -> bool:
    """True iff the spans V and W intersect exactly in B.

    For the exponent-2 abelian extensions modeled here, trivial intersection
    over the base coincides with linear disjointness.
    """
    if not (V.contains(B) and W.contains(B)):
        raise BaseNotContained("base subspace is not contained in both operands")
    return intersection_dim(V, W) == B.dim


@dataclass(frozen=True)
class ClassStream:
    """Deterministic enumerable sequence of square classes.

    The n-th element (0-based) is a pure function of n, so streams can be
    truncated and re-inspected reproducibly.
    """

    name: str
    at: Callable[[int], SquareClass] = field(compare=False)

    def prefix(self, depth: int) -> list[SquareClass]:
        if depth < 1:
            raise ValueError("depth must be >= 1")
        return [self.at(i) for i in range(depth)]


def primes_stream() -> ClassStream:
    return ClassStream("primes", lambda i: class_of(sympy.prime(i + 1)))


def stream_from_name(name: str) -> ClassStream:
    """Resolve a named stream: "primes" or "disc:<poly>:<n>"."""
    if name == "primes":
        return primes_stream()
    if name.startswith("disc:"):
        from .arboreal import disc_stream  # deferred: arboreal imports this module

        parts = name.split(":")
        if len(parts) != 3:
            raise ValueError(f"malformed stream name {name!r}")
        f = RatPoly.parse(parts[1])
        n = int(parts[2].lstrip("n>=≥ "))
        return disc_stream(f, n)
    raise ValueError(f"unknown stream {name!r}")


def vast_witness(L: ClassStream, F: ClassSubspace, depth: int) -> SquareClass:
    """First class among the first `depth` stream elements outside span(F).

    The vastness hypothesis guarantees such a class exists at some depth;
    DepthExhausted only reports that this truncation was too short.
    """
    for c in L.prefix(depth):
        if not F.member(c):
            return c
    raise DepthExhausted(f"no witness among the first {depth} elements of {L.name}")


def cover_fiber_integral(h: RatPoly, c: Rational, F: ClassSubspace) -> bool:
    """Whether the fiber of y^2 = h(t) above t = c is integral over the
    multiquadratic field modeled by F: h(c) nonzero and a nonsquare there."""
    v = h(Fraction(c))
    return v != 0 and not F.member(class_of(v))
