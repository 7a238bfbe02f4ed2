"""Surface group presentations, monodromies, and twisted fibered invariants.

Words over a generating set are tuples of signed, 1-based generator indices:
``(1, -2)`` is ``g1 * g2^{-1}``.  All exported operations keep words freely
reduced.  The central objects are:

* :class:`SurfacePresentation` -- one-relator (closed) or free (bounded)
  surface group presentations;
* :class:`GeneratorEndomorphism` -- monodromy data given by generator images,
  validated exactly (unimodular on homology, relator preserved up to
  conjugacy for closed surfaces);
* :func:`mapping_torus` -- the associated fibered-group presentation with a
  stable letter and its distinguished degree class;
* :class:`FiniteRepresentation` -- exact matrix representations with a
  finiteness certificate by closure enumeration;
* :func:`twisted_alexander` / :func:`twisted_torsion` -- module orders of the
  twisted chain complex in degrees 0..3 via free differential calculus, and
  the alternating-product torsion class built from them.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .kernel import (
    LaurentPolynomial,
    NormalizedTorsionClass,
    PolyMatrix,
    RationalFunction,
    as_exact,
    homology_order,
    normalize_unit_class,
    parse_scalar,
    render_scalar,
    scalar_inverse,
    scalar_is_zero,
    smith_integer,
)
from .torus import Mat2

Word = Tuple[int, ...]

DEFAULT_ORDER_CAP = 20000


# ---------------------------------------------------------------------------
# free word calculus
# ---------------------------------------------------------------------------

def free_reduce(word: Iterable[int]) -> Word:
    """Freely reduce a word (cancel adjacent inverse pairs)."""
    out: List[int] = []
    for letter in word:
        letter = int(letter)
        if letter == 0:
            raise ValueError("generator indices are signed and nonzero")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def word_inverse(word: Iterable[int]) -> Word:
    return tuple(-letter for letter in reversed(tuple(word)))


def word_concat(*words: Iterable[int]) -> Word:
    merged: List[int] = []
    for w in words:
        merged.extend(w)
    return free_reduce(merged)


def cyclic_reduce(word: Iterable[int]) -> Word:
    """Cyclically reduce: free reduction plus cancellation across the ends."""
    w = list(free_reduce(word))
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


def exponent_sum(word: Iterable[int], index: int) -> int:
    if index <= 0:
        raise ValueError("generator index must be positive")
    total = 0
    for letter in word:
        if letter == index:
            total += 1
        elif letter == -index:
            total -= 1
    return total


def fox_derivative(word: Iterable[int], index: int) -> Tuple[Tuple[int, Word], ...]:
    """Free derivative of `word` with respect to generator `index`.

    Returns an integer combination of group elements as (coefficient, word)
    pairs: d(ug)/dg = du/dg + u and d(ug^{-1})/dg = du/dg - ug^{-1}.
    """
    if index <= 0:
        raise ValueError("generator index must be positive")
    terms: List[Tuple[int, Word]] = []
    prefix: Word = ()
    for letter in free_reduce(word):
        if letter == index:
            terms.append((1, prefix))
        elif letter == -index:
            terms.append((-1, free_reduce(prefix + (letter,))))
        prefix = prefix + (letter,)
    return tuple(terms)


def _check_indices(word: Iterable[int], n_generators: int) -> Word:
    w = free_reduce(word)
    for letter in w:
        if abs(letter) > n_generators:
            raise ValueError(
                f"letter {letter} exceeds generator count {n_generators}")
    return w


# ---------------------------------------------------------------------------
# surface presentations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SurfacePresentation:
    """Presentation of a surface group.

    Closed surfaces carry 2*genus generators and the single product-of-
    commutators relator; bounded surfaces are free of rank
    2*genus + boundary_count - 1.
    """

    genus: int
    boundary_count: int
    generators: Tuple[str, ...]
    relators: Tuple[Word, ...]

    def __post_init__(self):
        if self.genus < 0 or self.boundary_count < 0:
            raise ValueError("genus and boundary count must be nonnegative")
        if self.boundary_count == 0:
            if len(self.generators) != 2 * self.genus or len(self.relators) != 1:
                raise ValueError("closed surface needs 2*genus generators "
                                 "and exactly one relator")
        else:
            expected = 2 * self.genus + self.boundary_count - 1
            if len(self.generators) != expected or self.relators:
                raise ValueError("bounded surface group is free of rank "
                                 "2*genus + boundary_count - 1")
        if len(set(self.generators)) != len(self.generators):
            raise ValueError("generator names must be distinct")
        for r in self.relators:
            if _check_indices(r, len(self.generators)) != tuple(r):
                raise ValueError("relators must be freely reduced words")

    @classmethod
    def closed(cls, genus: int) -> "SurfacePresentation":
        if genus < 0:
            raise ValueError("genus must be nonnegative")
        names: List[str] = []
        relator: List[int] = []
        for i in range(1, genus + 1):
            names.extend([f"a{i}", f"b{i}"])
            a, b = 2 * i - 1, 2 * i
            relator.extend([a, b, -a, -b])
        return cls(genus, 0, tuple(names), (tuple(relator),))

    @classmethod
    def with_boundary(cls, genus: int, boundary_count: int) -> "SurfacePresentation":
        if genus < 0 or boundary_count < 1:
            raise ValueError("need nonnegative genus and at least one "
                             "boundary circle")
        names = []
        for i in range(1, genus + 1):
            names.extend([f"a{i}", f"b{i}"])
        for i in range(1, boundary_count):
            names.append(f"c{i}")
        return cls(genus, boundary_count, tuple(names), ())

    @property
    def rank(self) -> int:
        return len(self.generators)

    def to_json(self):
        return {
            "genus": self.genus,
            "boundary_count": self.boundary_count,
            "generators": list(self.generators),
            "relators": [list(r) for r in self.relators],
        }

    @classmethod
    def from_json(cls, data) -> "SurfacePresentation":
        return cls(int(data["genus"]), int(data["boundary_count"]),
                   tuple(data["generators"]),
                   tuple(free_reduce(r) for r in data["relators"]))


# ---------------------------------------------------------------------------
# monodromy endomorphisms on generators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorEndomorphism:
    """A self-map of a surface group given by generator images.

    `inverse_images` optionally witnesses invertibility: when present, the
    two substitutions must compose to the identity on every generator, in
    both orders, at the level of freely reduced words.
    """

    source: SurfacePresentation
    images: Tuple[Word, ...]
    inverse_images: Optional[Tuple[Word, ...]] = None

    def __post_init__(self):
        if len(self.images) != self.source.rank:
            raise ValueError("need exactly one image word per generator")
        reduced = tuple(_check_indices(w, self.source.rank)
                        for w in self.images)
        object.__setattr__(self, "images", reduced)
        if self.inverse_images is not None:
            inv = tuple(_check_indices(w, self.source.rank)
                        for w in self.inverse_images)
            if len(inv) != self.source.rank:
                raise ValueError("inverse witness needs one word per generator")
            object.__setattr__(self, "inverse_images", inv)
            for j in range(1, self.source.rank + 1):
                forward = self.apply(inv[j - 1])
                backward = _substitute(inv, self.images[j - 1])
                if forward != (j,) or backward != (j,):
                    raise ValueError("inverse witness does not invert the "
                                     "generator images")

    @classmethod
    def identity(cls, pres: SurfacePresentation) -> "GeneratorEndomorphism":
        letters = tuple((j,) for j in range(1, pres.rank + 1))
        return cls(pres, letters, letters)

    @classmethod
    def torus_monodromy(cls, matrix: Mat2) -> "GeneratorEndomorphism":
        """Genus-1 monodromy realizing an integer matrix of determinant +-1.

        The matrix is split into elementary shears, the quarter-turn, the
        central flip, and (for determinant -1) the generator swap; the
        corresponding generator substitutions are composed in the same order.
        """
        pres = SurfacePresentation.closed(1)
        det = matrix.det()
        if det not in (1, -1):
            raise ValueError("monodromy matrix must have determinant +1 or -1")
        target = matrix
        ops: List[Tuple] = []
        tail: List[Tuple] = []
        if det == -1:
            target = matrix @ Mat2(0, 1, 1, 0)
            tail = [("W",)]
        ops = _sl2_elementary_word(target) + tail
        endo = cls.identity(pres)
        for op in ops:
            endo = endo.compose(_elementary_endo(pres, op))
        if endo.abelianization() != ((matrix.a, matrix.b), (matrix.c, matrix.d)):
            raise AssertionError("elementary decomposition lost the matrix")
        return endo.validate()

    def apply(self, word: Iterable[int]) -> Word:
        return _substitute(self.images, word)

    def compose(self, inner: "GeneratorEndomorphism") -> "GeneratorEndomorphism":
        """self o inner: apply `inner` first, then `self`."""
        if inner.source != self.source:
            raise ValueError("compose needs endomorphisms of the same group")
        inverse = None
        if self.inverse_images is not None and inner.inverse_images is not None:
            inverse = tuple(
                _substitute(inner.inverse_images, w)
                for w in self.inverse_images)
        return GeneratorEndomorphism(
            self.source, tuple(self.apply(w) for w in inner.images), inverse)

    def inverse(self) -> "GeneratorEndomorphism":
        """Inverse substitution; needs the attached witness."""
        if self.inverse_images is None:
            raise ValueError("no inverse witness attached to this "
                             "endomorphism")
        return GeneratorEndomorphism(self.source, self.inverse_images,
                                     self.images)

    def power(self, m: int) -> "GeneratorEndomorphism":
        if m < 0:
            raise ValueError("only nonnegative powers are defined here")
        endo = GeneratorEndomorphism.identity(self.source)
        for _ in range(m):
            endo = self.compose(endo)
        return endo

    def abelianization(self) -> Tuple[Tuple[int, ...], ...]:
        """Row tuples of the induced matrix on H1; column j is the exponent
        vector of the j-th generator image."""
        n = self.source.rank
        return tuple(
            tuple(exponent_sum(self.images[j], i + 1) for j in range(n))
            for i in range(n))

    def relator_conjugacy(self) -> Tuple[int, Word]:
        """For closed surfaces: (sign, w) with image(relator) = w r^sign w^-1.

        Exact decision: the image is conjugate to r (or its inverse) if and
        only if their cyclic reductions agree up to rotation.  Raises
        ValueError when the relator is not preserved.
        """
        if self.source.boundary_count != 0:
            raise ValueError("relator conjugacy only concerns closed surfaces")
        relator = self.source.relators[0]
        image = self.apply(relator)
        trimmed = list(image)
        peeled: List[int] = []
        while len(trimmed) >= 2 and trimmed[0] == -trimmed[-1]:
            peeled.append(trimmed[0])
            trimmed = trimmed[1:-1]
        core = tuple(trimmed)
        for sign in (1, -1):
            base = relator if sign == 1 else word_inverse(relator)
            if len(core) != len(base):
                continue
            for j in range(max(1, len(base))):
                if core == base[j:] + base[:j]:
                    conj = word_concat(tuple(peeled), word_inverse(base[:j]))
                    rebuilt = word_concat(conj, base, word_inverse(conj))
                    if rebuilt != image:
                        raise AssertionError("conjugator reconstruction failed")
                    return sign, conj
        raise ValueError("generator images do not carry the surface relator "
                         "to a conjugate of itself or its inverse")

    def validate(self) -> "GeneratorEndomorphism":
        """Check the automorphism conditions; return self or raise ValueError."""
        rows = [list(r) for r in self.abelianization()]
        diag, _, _ = smith_integer(rows)
        if not all(d == 1 for d in diag) or len(diag) < self.source.rank:
            raise ValueError("generator images are not unimodular on homology")
        if self.source.boundary_count == 0 and self.source.genus >= 1:
            self.relator_conjugacy()
        return self

    def to_json(self):
        data = {"images": [list(w) for w in self.images]}
        if self.inverse_images is not None:
            data["inverse_images"] = [list(w) for w in self.inverse_images]
        return data

    @classmethod
    def from_json(cls, pres: SurfacePresentation, data) -> "GeneratorEndomorphism":
        inverse = data.get("inverse_images")
        return cls(pres, tuple(free_reduce(w) for w in data["images"]),
                   None if inverse is None
                   else tuple(free_reduce(w) for w in inverse))


def _substitute(images: Sequence[Word], word: Iterable[int]) -> Word:
    pieces: List[int] = []
    for letter in free_reduce(word):
        image = images[abs(letter) - 1]
        pieces.extend(image if letter > 0 else word_inverse(image))
    return free_reduce(pieces)


def _power_word(index: int, q: int) -> Word:
    return (index,) * q if q >= 0 else (-index,) * (-q)


def _elementary_endo(pres: SurfacePresentation, op: Tuple) -> GeneratorEndomorphism:
    kind = op[0]
    if kind == "S":                       # quarter turn: a -> b, b -> a^-1
        images = ((2,), (-1,))
        inverse = ((-2,), (1,))
    elif kind == "N":                     # central flip: invert both
        images = ((-1,), (-2,))
        inverse = images
    elif kind == "W":                     # swap (determinant -1)
        images = ((2,), (1,))
        inverse = images
    elif kind == "R":                     # b -> a^q b
        images = ((1,), _power_word(1, op[1]) + (2,))
        inverse = ((1,), _power_word(1, -op[1]) + (2,))
    elif kind == "L":                     # a -> a b^q
        images = ((1,) + _power_word(2, op[1]), (2,))
        inverse = ((1,) + _power_word(2, -op[1]), (2,))
    else:  # pragma: no cover - internal alphabet
        raise AssertionError(f"unknown elementary operation {op!r}")
    return GeneratorEndomorphism(pres, images, inverse)


_S_INVERSE = Mat2(0, 1, -1, 0)


def _sl2_elementary_word(matrix: Mat2) -> List[Tuple]:
    """Factor a determinant +1 matrix into S / L^q / R^q / -I letters."""
    if matrix.det() != 1:
        raise ValueError("elementary factorization needs determinant +1")
    cur = matrix
    ops: List[Tuple] = []
    for _ in range(4096):
        if cur.c == 0:
            break
        if cur.a == 0 or cur.c // cur.a == 0:
            ops.append(("S",))
            cur = _S_INVERSE @ cur
        else:
            q = cur.c // cur.a
            ops.append(("L", q))
            cur = Mat2(1, 0, -q, 1) @ cur
    else:  # pragma: no cover - Euclidean descent always terminates
        raise AssertionError("elementary factorization did not terminate")
    if cur.a == -1:
        ops.append(("N",))
        cur = -cur
    if not (cur.a == 1 and cur.d == 1 and cur.c == 0):
        raise AssertionError("factorization left a non-shear remainder")
    if cur.b != 0:
        ops.append(("R", cur.b))
    return ops


# ---------------------------------------------------------------------------
# the fibered presentation with stable letter
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MappingTorusPresentation:
    """Group presentation of a fibered 3-complex with distinguished degree map.

    Generators are the fiber generators followed (initially) by the stable
    letter; `fiber_values` records the degree class, which evaluates to 1 on
    the stable letter and to 0 on fiber generators.  Relators are the fiber
    relator (closed case) plus one commutation relator per fiber generator:
    t g t^-1 image(g)^-1.
    """

    generators: Tuple[str, ...]
    relators: Tuple[Word, ...]
    fiber_values: Tuple[int, ...]
    fiber: SurfacePresentation
    monodromy: GeneratorEndomorphism
    stable_index: int

    def __post_init__(self):
        n = len(self.generators)
        if len(self.fiber_values) != n:
            raise ValueError("need one degree value per generator")
        if not (1 <= self.stable_index <= n):
            raise ValueError("stable letter index out of range")
        if self.fiber_values[self.stable_index - 1] != 1:
            raise ValueError("degree class must evaluate to 1 on the stable letter")
        object.__setattr__(
            self, "relators",
            tuple(_check_indices(r, n) for r in self.relators))
        for r in self.relators:
            if self.degree(r) != 0:
                raise ValueError("every relator must have degree zero")

    @property
    def rank(self) -> int:
        return len(self.generators)

    def degree(self, word: Iterable[int]) -> int:
        """Evaluate the distinguished degree class on a word."""
        total = 0
        for letter in word:
            value = self.fiber_values[abs(letter) - 1]
            total += value if letter > 0 else -value
        return total

    def abelianization(self) -> Tuple[int, Tuple[int, ...]]:
        """(free rank, torsion invariant factors > 1) of the abelianized group."""
        rows = [[exponent_sum(r, j + 1) for j in range(self.rank)]
                for r in self.relators]
        diag, _, _ = smith_integer(rows)
        nonzero = [d for d in diag if d != 0]
        free_rank = self.rank - len(nonzero)
        torsion = tuple(d for d in nonzero if d > 1)
        return free_rank, torsion

    # -- presentation moves (all preserve the presented group) ---------------

    def cycle_relator(self, index: int, shift: int) -> "MappingTorusPresentation":
        r = self.relators[index]
        if not r:
            return self
        shift %= len(r)
        moved = r[shift:] + r[:shift]
        return dataclasses.replace(self, relators=self._swap(index, free_reduce(moved)))

    def invert_relator(self, index: int) -> "MappingTorusPresentation":
        return dataclasses.replace(
            self, relators=self._swap(index, word_inverse(self.relators[index])))

    def conjugate_relator(self, index: int, word: Iterable[int]) -> "MappingTorusPresentation":
        w = _check_indices(word, self.rank)
        moved = word_concat(w, self.relators[index], word_inverse(w))
        return dataclasses.replace(self, relators=self._swap(index, moved))

    def add_generator(self, name: str, word: Iterable[int]) -> "MappingTorusPresentation":
        """Adjoin a redundant generator x with defining relator x * word^-1."""
        if name in self.generators:
            raise ValueError(f"generator name {name!r} already in use")
        w = _check_indices(word, self.rank)
        new_index = self.rank + 1
        relator = free_reduce((new_index,) + word_inverse(w))
        return dataclasses.replace(
            self,
            generators=self.generators + (name,),
            fiber_values=self.fiber_values + (self.degree(w),),
            relators=self.relators + (relator,),
        )

    def _swap(self, index: int, new_relator: Word) -> Tuple[Word, ...]:
        relators = list(self.relators)
        relators[index] = new_relator
        return tuple(relators)

    def to_json(self):
        return {
            "generators": list(self.generators),
            "relators": [list(r) for r in self.relators],
            "fiber_values": list(self.fiber_values),
            "stable_index": self.stable_index,
            "fiber": self.fiber.to_json(),
            "monodromy": self.monodromy.to_json(),
        }

    @classmethod
    def from_json(cls, data) -> "MappingTorusPresentation":
        fiber = SurfacePresentation.from_json(data["fiber"])
        monodromy = GeneratorEndomorphism.from_json(fiber, data["monodromy"])
        return cls(
            generators=tuple(data["generators"]),
            relators=tuple(free_reduce(r) for r in data["relators"]),
            fiber_values=tuple(int(v) for v in data["fiber_values"]),
            fiber=fiber,
            monodromy=monodromy,
            stable_index=int(data["stable_index"]),
        )


def mapping_torus(pres: SurfacePresentation,
                  phi: GeneratorEndomorphism) -> MappingTorusPresentation:
    """Present the fibered group of a validated monodromy.

    Generators: fiber generators plus a fresh stable letter t (last);
    relators: the fiber relator (closed case) and t g t^-1 phi(g)^-1 for each
    fiber generator g.  The abelianization is checked against the semidirect
    block structure: cokernel of (A - I) on fiber homology plus one free
    factor from the stable letter.
    """
    if phi.source != pres:
        raise ValueError("monodromy must act on the given presentation")
    phi.validate()
    g = pres.rank
    name = "t"
    while name in pres.generators:
        name += "'"
    t = g + 1
    relators: List[Word] = list(pres.relators)
    for j in range(1, g + 1):
        relators.append(word_concat((t, j, -t), word_inverse(phi.images[j - 1])))
    mt = MappingTorusPresentation(
        generators=pres.generators + (name,),
        relators=tuple(relators),
        fiber_values=(0,) * g + (1,),
        fiber=pres,
        monodromy=phi,
        stable_index=t,
    )
    rows = [list(r) for r in phi.abelianization()]
    for i in range(g):
        rows[i][i] -= 1
    diag, _, _ = smith_integer(rows)
    nonzero = [d for d in diag if d != 0]
    predicted = (1 + g - len(nonzero), tuple(d for d in nonzero if d > 1))
    if mt.abelianization() != predicted:
        raise AssertionError("abelianization disagrees with the semidirect "
                             "block structure")
    return mt


# ---------------------------------------------------------------------------
# exact finite matrix representations
# ---------------------------------------------------------------------------

ScalarMatrix = Tuple[Tuple[object, ...], ...]


def _mat_freeze(rows, dimension: int) -> ScalarMatrix:
    frozen = tuple(tuple(as_exact(e) for e in row) for row in rows)
    if len(frozen) != dimension or any(len(r) != dimension for r in frozen):
        raise ValueError(f"expected a {dimension}x{dimension} matrix")
    return frozen


def _mat_identity(k: int) -> ScalarMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(k)) for i in range(k))


def _mat_mul(a: ScalarMatrix, b: ScalarMatrix) -> ScalarMatrix:
    k = len(a)
    return tuple(
        tuple(as_exact(sum(a[i][l] * b[l][j] for l in range(k)))
              if k else 0 for j in range(k))
        for i in range(k))


def _mat_inverse(m: ScalarMatrix) -> ScalarMatrix:
    """Exact Gauss-Jordan inverse; raises ValueError when singular."""
    k = len(m)
    left = [list(row) for row in m]
    right = [list(row) for row in _mat_identity(k)]
    for col in range(k):
        pivot = next((r for r in range(col, k)
                      if not scalar_is_zero(left[r][col])), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        left[col], left[pivot] = left[pivot], left[col]
        right[col], right[pivot] = right[pivot], right[col]
        inv = scalar_inverse(left[col][col])
        left[col] = [as_exact(e * inv) for e in left[col]]
        right[col] = [as_exact(e * inv) for e in right[col]]
        for r in range(k):
            if r == col:
                continue
            factor = left[r][col]
            if scalar_is_zero(factor):
                continue
            left[r] = [as_exact(x - factor * y)
                       for x, y in zip(left[r], left[col])]
            right[r] = [as_exact(x - factor * y)
                        for x, y in zip(right[r], right[col])]
    return tuple(tuple(row) for row in right)


@dataclass(frozen=True)
class FiniteRepresentation:
    """Exact matrix images for the generators of a fibered presentation.

    `order_cap` bounds the closure enumeration certifying that the generated
    matrix group is finite; exceeding it is an error, not a silent pass.
    """

    dimension: int
    matrices: Tuple[ScalarMatrix, ...]
    order_cap: int = DEFAULT_ORDER_CAP

    def __post_init__(self):
        if self.dimension < 0:
            raise ValueError("dimension must be nonnegative")
        if self.order_cap < 1:
            raise ValueError("order cap must be positive")
        object.__setattr__(
            self, "matrices",
            tuple(_mat_freeze(m, self.dimension) for m in self.matrices))

    @classmethod
    def trivial(cls, mt: MappingTorusPresentation,
                order_cap: int = DEFAULT_ORDER_CAP) -> "FiniteRepresentation":
        one = ((1,),)
        return cls(1, tuple(one for _ in mt.generators), order_cap)

    @classmethod
    def fibered_character(cls, mt: MappingTorusPresentation, unit,
                          order_cap: int = DEFAULT_ORDER_CAP) -> "FiniteRepresentation":
        """Rank-1 representation g -> unit^(degree g); the fiber is invisible."""
        mats = tuple(((as_exact(unit) ** v if v >= 0
                       else scalar_inverse(as_exact(unit)) ** (-v),),)
                     for v in mt.fiber_values)
        return cls(1, mats, order_cap)

    def matrix(self, letter: int) -> ScalarMatrix:
        if letter > 0:
            return self.matrices[letter - 1]
        return _mat_inverse(self.matrices[-letter - 1])

    def evaluate_word(self, word: Iterable[int]) -> ScalarMatrix:
        acc = _mat_identity(self.dimension)
        for letter in word:
            acc = _mat_mul(acc, self.matrix(letter))
        return acc

    def validate(self, mt: MappingTorusPresentation) -> "FiniteRepresentation":
        """Check arity, invertibility, relator kills, and finite closure."""
        if len(self.matrices) != mt.rank:
            raise ValueError("need exactly one matrix per generator")
        inverses = [_mat_inverse(m) for m in self.matrices]
        ident = _mat_identity(self.dimension)
        for r in mt.relators:
            if mt.degree(r) != 0:
                raise ValueError("relator with nonzero degree cannot die")
            if self.evaluate_word(r) != ident:
                raise ValueError("representation violates a relator")
        seen = {ident}
        frontier = [ident]
        step_set = list(self.matrices) + inverses
        while frontier:
            fresh = []
            for m in frontier:
                for s in step_set:
                    p = _mat_mul(m, s)
                    if p not in seen:
                        if len(seen) >= self.order_cap:
                            raise ValueError(
                                "matrix group not certified finite within "
                                f"cap {self.order_cap}")
                        seen.add(p)
                        fresh.append(p)
            frontier = fresh
        return self

    def conjugate(self, change_of_basis) -> "FiniteRepresentation":
        x = _mat_freeze(change_of_basis, self.dimension)
        x_inv = _mat_inverse(x)
        return FiniteRepresentation(
            self.dimension,
            tuple(_mat_mul(_mat_mul(x, m), x_inv) for m in self.matrices),
            self.order_cap)

    def with_generator(self, word: Iterable[int]) -> "FiniteRepresentation":
        """Extend by the image of a word (for redundant-generator moves)."""
        return FiniteRepresentation(
            self.dimension,
            self.matrices + (self.evaluate_word(word),),
            self.order_cap)

    def restricted(self, indices: Sequence[int]) -> "FiniteRepresentation":
        return FiniteRepresentation(
            self.dimension,
            tuple(self.matrices[i - 1] for i in indices),
            self.order_cap)

    def to_json(self):
        return {
            "dimension": self.dimension,
            "order_cap": self.order_cap,
            "matrices": [[[render_scalar(e) for e in row] for row in m]
                         for m in self.matrices],
        }

    @classmethod
    def from_json(cls, data) -> "FiniteRepresentation":
        return cls(
            int(data["dimension"]),
            tuple(tuple(tuple(parse_scalar(e) for e in row) for row in m)
                  for m in data["matrices"]),
            int(data.get("order_cap", DEFAULT_ORDER_CAP)))


# ---------------------------------------------------------------------------
# the twisted chain complex and its module orders
# ---------------------------------------------------------------------------

def group_ring_image(mt: MappingTorusPresentation, rep: FiniteRepresentation,
                     combo: Iterable[Tuple[int, Word]]) -> PolyMatrix:
    """Image of an integer combination of group elements: each word w maps to
    t^(degree w) times its matrix image; results live in k x k Laurent
    matrices."""
    k = rep.dimension
    acc = PolyMatrix.zero(k, k)
    for coeff, word in combo:
        mat = rep.evaluate_word(word)
        exp = mt.degree(word)
        block = PolyMatrix.build(
            k, k,
            lambda i, j, mat=mat, exp=exp, coeff=coeff:
            LaurentPolynomial.t_power(exp, as_exact(coeff * mat[i][j])))
        acc = acc + block
    return acc


def _boundary_one(mt: MappingTorusPresentation,
                  rep: FiniteRepresentation) -> PolyMatrix:
    """Degree-1 boundary: columns are transposed (image(g) - 1) blocks."""
    k = rep.dimension
    blocks = [group_ring_image(mt, rep, ((1, (j,)), (-1, ())))
              .grid_transpose()
              for j in range(1, mt.rank + 1)]
    out = PolyMatrix.zero(k, 0)
    for b in blocks:
        out = out.hstack(b)
    return out


def fox_alexander_matrix(mt: MappingTorusPresentation,
                         rep: FiniteRepresentation) -> PolyMatrix:
    """Block matrix of free-derivative images, one block row per relator and
    one block column per generator; presents the degree-1 twisted module of
    the presentation complex with respect to row-vector coefficients."""
    rep.validate(mt)
    k = rep.dimension
    if k == 0 or not mt.relators:
        return PolyMatrix.zero(k * len(mt.relators), k * mt.rank)
    grid = [[group_ring_image(mt, rep, fox_derivative(r, j))
             for j in range(1, mt.rank + 1)]
            for r in mt.relators]
    return PolyMatrix.from_blocks(grid)


def _boundary_two(mt: MappingTorusPresentation,
                  rep: FiniteRepresentation) -> PolyMatrix:
    """Degree-2 boundary: full transpose of the free-derivative block matrix."""
    k = rep.dimension
    if k == 0 or not mt.relators:
        return PolyMatrix.zero(k * mt.rank, k * len(mt.relators))
    grid = [[group_ring_image(mt, rep, fox_derivative(r, j))
             for j in range(1, mt.rank + 1)]
            for r in mt.relators]
    return PolyMatrix.from_blocks(grid).grid_transpose()


def twisted_alexander(mt: MappingTorusPresentation, rep: FiniteRepresentation,
                      n: int) -> LaurentPolynomial:
    """Order of the degree-n twisted homology module, n in 0..3.

    Degrees 0 and 1 come from the presentation complex; degrees 2 and 3 from
    the three-dimensional cellular model of the fibered space (see module
    `cellular`).  Returns 0 exactly when the module has positive rank,
    otherwise a monic-normal representative.
    """
    if n not in (0, 1, 2, 3):
        raise ValueError(f"unsupported degree {n}: expected 0, 1, 2, or 3")
    rep.validate(mt)
    if rep.dimension == 0:
        return LaurentPolynomial.one()
    if n == 0:
        return homology_order(_boundary_one(mt, rep), None)
    if n == 1:
        return homology_order(_boundary_two(mt, rep), _boundary_one(mt, rep))
    from .cellular import mapping_torus_boundaries
    _, d2, d3 = mapping_torus_boundaries(mt, rep)
    if n == 2:
        return homology_order(d3, d2)
    return homology_order(None, d3)


def twisted_torsion(mt: MappingTorusPresentation,
                    rep: FiniteRepresentation) -> NormalizedTorsionClass:
    """Alternating-product torsion class Delta_1 Delta_3 / (Delta_0 Delta_2),
    normalized; zero exactly when some degree has positive-rank homology."""
    deltas = [twisted_alexander(mt, rep, n) for n in range(4)]
    if any(d.is_zero() for d in deltas):
        return normalize_unit_class(RationalFunction.zero())
    numerator = deltas[1] * deltas[3]
    denominator = deltas[0] * deltas[2]
    return normalize_unit_class(RationalFunction(numerator, denominator))
