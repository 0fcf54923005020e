"""Exact rational linear algebra for symmetric bilinear forms.

Intersection forms, cohomology classes, congruence diagonalization over the
rationals, inertia, and the construction of an integral class that is
positive and orthogonal to a given symplectic class.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from dhlab.errors import (
    DimensionMismatch,
    InputError,
    InsufficientBPlus,
    InternalInconsistency,
    NotPositive,
    ZeroVector,
)

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]
Matrix = List[List[Fraction]]


def to_rational(value: Union[int, str, Fraction]) -> Fraction:
    """Convert an exact scalar (int, Fraction or "p/q" string) to a Fraction.

    Args:
        value: The scalar to convert

    Returns:
        The value as a Fraction in canonical form

    Raises:
        InputError: If the value is a float, a bool or not a number
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise InputError(f"not an exact scalar: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise InputError(f"not a rational: {value!r}") from e
    raise InputError(f"not an exact scalar: {value!r}")


@dataclass(frozen=True)
class ClassVector:
    """A cohomology class as exact rational coordinates in a declared basis."""

    coords: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(to_rational(c) for c in self.coords))

    @classmethod
    def of(cls, *values: Scalar) -> "ClassVector":
        return cls(tuple(values))

    @classmethod
    def zero(cls, dimension: int) -> "ClassVector":
        return cls((0,) * dimension)

    @classmethod
    def basis_vector(cls, dimension: int, index: int) -> "ClassVector":
        return cls(tuple(1 if i == index else 0 for i in range(dimension)))

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.coords)

    def __getitem__(self, index: int) -> Fraction:
        return self.coords[index]

    def __add__(self, other: "ClassVector") -> "ClassVector":
        _require_same_length(self, other)
        return ClassVector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "ClassVector") -> "ClassVector":
        _require_same_length(self, other)
        return ClassVector(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "ClassVector":
        return ClassVector(tuple(-a for a in self.coords))

    def scale(self, factor: Scalar) -> "ClassVector":
        factor = to_rational(factor)
        return ClassVector(tuple(factor * a for a in self.coords))

    __rmul__ = scale

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coords)

    def is_integral(self) -> bool:
        """True when every coordinate is an integer (an integral class)."""
        return all(a.denominator == 1 for a in self.coords)

    def __str__(self) -> str:
        return "(" + ", ".join(str(a) for a in self.coords) + ")"


def _require_same_length(x: Sequence, y: Sequence) -> None:
    if len(x) != len(y):
        raise DimensionMismatch(f"vectors of length {len(x)} and {len(y)}")


@dataclass(frozen=True)
class IntegerSymmetricForm:
    """The intersection form Q on H^2 of a closed 4-manifold, as an exact integer matrix."""

    entries: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        n = len(rows)
        if n == 0:
            raise DimensionMismatch("form must have positive dimension")
        for i, row in enumerate(rows):
            if len(row) != n:
                raise DimensionMismatch(f"row {i} has {len(row)} entries, expected {n}")
            for value in row:
                if isinstance(value, bool) or not isinstance(value, int):
                    raise InputError(f"row {i} holds non-integer entry {value!r}")
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise InputError(f"form is not symmetric at ({i}, {j})")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntegerSymmetricForm":
        return cls(tuple(tuple(row) for row in rows))

    @classmethod
    def diagonal(cls, *values: int) -> "IntegerSymmetricForm":
        n = len(values)
        return cls(tuple(tuple(values[i] if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def hyperbolic(cls, copies: int = 1) -> "IntegerSymmetricForm":
        """H ⊕ ... ⊕ H with H = [[0, 1], [1, 0]]; three copies is the form of T^4."""
        return cls.direct_sum(*[cls(((0, 1), (1, 0)))] * copies)

    @classmethod
    def direct_sum(cls, *forms: "IntegerSymmetricForm") -> "IntegerSymmetricForm":
        n = sum(form.dimension for form in forms)
        rows = [[0] * n for _ in range(n)]
        offset = 0
        for form in forms:
            for i, row in enumerate(form.entries):
                for j, value in enumerate(row):
                    rows[offset + i][offset + j] = value
            offset += form.dimension
        return cls.from_rows(rows)

    @property
    def dimension(self) -> int:
        return len(self.entries)

    def apply(self, x: ClassVector) -> ClassVector:
        """Return Q·x."""
        if len(x) != self.dimension:
            raise DimensionMismatch(f"class of length {len(x)} paired with form of dimension {self.dimension}")
        return ClassVector(tuple(sum(q * a for q, a in zip(row, x.coords)) for row in self.entries))

    def as_fractions(self) -> Matrix:
        return [[Fraction(v) for v in row] for row in self.entries]

    def is_nondegenerate(self) -> bool:
        return inertia(self).b_zero == 0


@dataclass(frozen=True)
class Diagonalization:
    """B with Bᵀ Q B = diag(d); positives first, then negatives, then zeros."""

    basis: Tuple[Tuple[Fraction, ...], ...]
    diagonal: Tuple[Fraction, ...]
    b_plus: int
    b_minus: int
    b_zero: int

    @property
    def signature(self) -> int:
        return self.b_plus - self.b_minus

    def column(self, index: int) -> ClassVector:
        """The index-th new basis vector."""
        return ClassVector(tuple(row[index] for row in self.basis))


class Inertia(NamedTuple):
    b_plus: int
    b_minus: int
    b_zero: int
    signature: int


def evaluate(form: IntegerSymmetricForm, x: ClassVector, y: ClassVector) -> Fraction:
    """Evaluate Q(x, y) = xᵀ Q y exactly.

    Args:
        form: The intersection form
        x: First class
        y: Second class

    Returns:
        The pairing as a Fraction

    Raises:
        DimensionMismatch: If either class has the wrong length
    """
    if len(x) != form.dimension or len(y) != form.dimension:
        raise DimensionMismatch(
            f"classes of length {len(x)} and {len(y)} paired with form of dimension {form.dimension}"
        )
    return _bilinear(form.entries, x.coords, y.coords)


def _bilinear(entries: Sequence[Sequence[Scalar]], x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for i, row in enumerate(entries):
        if x[i] == 0:
            continue
        total += x[i] * sum((q * b for q, b in zip(row, y)), Fraction(0))
    return total


def identity(n: int) -> Matrix:
    return [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]


def transpose(matrix: Sequence[Sequence[Fraction]]) -> Matrix:
    return [list(column) for column in zip(*matrix)]


def matmul(a: Sequence[Sequence[Scalar]], b: Sequence[Sequence[Scalar]]) -> Matrix:
    columns = transpose(b)
    return [[sum((Fraction(x) * y for x, y in zip(row, column)), Fraction(0)) for column in columns] for row in a]


def _add_basis_vector(a: Matrix, basis: Matrix, source: int, target: int, factor: Fraction) -> None:
    # e_target <- e_target + factor * e_source, applied as a congruence
    n = len(a)
    for r in range(n):
        a[r][target] += factor * a[r][source]
    for c in range(n):
        a[target][c] += factor * a[source][c]
    for r in range(n):
        basis[r][target] += factor * basis[r][source]


def _swap_basis_vectors(a: Matrix, basis: Matrix, i: int, j: int) -> None:
    if i == j:
        return
    for row in a:
        row[i], row[j] = row[j], row[i]
    a[i], a[j] = a[j], a[i]
    for row in basis:
        row[i], row[j] = row[j], row[i]


def congruence_reduce(gram: Sequence[Sequence[Scalar]]) -> Tuple[Matrix, List[Fraction]]:
    """Symmetric Gaussian elimination over the rationals.

    A nonzero remaining diagonal entry is always preferred as pivot. When all
    remaining diagonal entries vanish but some Q(e_i, e_j) does not, the move
    e_i <- e_i + e_j produces the diagonal entry 2 Q(e_i, e_j) != 0.

    Args:
        gram: Symmetric matrix of rationals

    Returns:
        (basis, diagonal) with basisᵀ · gram · basis = diag(diagonal), unordered
    """
    n = len(gram)
    a = [[Fraction(v) for v in row] for row in gram]
    basis = identity(n)
    for k in range(n):
        pivot = next((i for i in range(k, n) if a[i][i] != 0), None)
        if pivot is None:
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            _add_basis_vector(a, basis, source=j, target=i, factor=Fraction(1))
            pivot = i
        _swap_basis_vectors(a, basis, k, pivot)
        for j in range(k + 1, n):
            if a[k][j] != 0:
                _add_basis_vector(a, basis, source=k, target=j, factor=-a[k][j] / a[k][k])
    return basis, [a[i][i] for i in range(n)]


def _sign_order(diagonal: Sequence[Fraction]) -> List[int]:
    positives = [i for i, d in enumerate(diagonal) if d > 0]
    negatives = [i for i, d in enumerate(diagonal) if d < 0]
    zeros = [i for i, d in enumerate(diagonal) if d == 0]
    return positives + negatives + zeros


def diagonalize(form: IntegerSymmetricForm) -> Diagonalization:
    """Diagonalize Q by congruence over the rationals.

    Args:
        form: The intersection form

    Returns:
        Diagonalization with positive entries first, then negative, then zero
    """
    basis, diagonal = congruence_reduce(form.entries)
    order = _sign_order(diagonal)
    ordered_diagonal = tuple(diagonal[i] for i in order)
    ordered_basis = tuple(tuple(row[i] for i in order) for row in basis)
    result = Diagonalization(
        basis=ordered_basis,
        diagonal=ordered_diagonal,
        b_plus=sum(1 for d in ordered_diagonal if d > 0),
        b_minus=sum(1 for d in ordered_diagonal if d < 0),
        b_zero=sum(1 for d in ordered_diagonal if d == 0),
    )
    logger.debug(f"Diagonalized form of dimension {form.dimension}: d={[str(d) for d in ordered_diagonal]}")
    return result


def inertia(form: IntegerSymmetricForm) -> Inertia:
    """Return (b⁺, b⁻, b₀, σ) of Q."""
    result = diagonalize(form)
    return Inertia(result.b_plus, result.b_minus, result.b_zero, result.signature)


def clear_denominators(vector: ClassVector) -> ClassVector:
    """Scale by the least common multiple of the coordinate denominators."""
    multiplier = lcm(*(a.denominator for a in vector.coords))
    return vector.scale(multiplier)


def find_positive_orthogonal_class(form: IntegerSymmetricForm, omega: ClassVector) -> ClassVector:
    """Find an integral class c with Q(c, c) > 0 and Q(c, ω) = 0.

    The form is diagonalized on the Q-orthogonal complement of ω (spanned by
    the projections e_i - Q(e_i, ω)/Q(ω, ω)·ω); the first positive direction
    in elimination order is taken and its denominators are cleared.

    Args:
        form: Intersection form with b⁺ >= 2
        omega: Class with Q(ω, ω) > 0

    Returns:
        The integral class c

    Raises:
        ZeroVector: If ω = 0
        NotPositive: If Q(ω, ω) <= 0
        InsufficientBPlus: If b⁺(Q) < 2
    """
    n = form.dimension
    if len(omega) != n:
        raise DimensionMismatch(f"class of length {len(omega)} paired with form of dimension {n}")
    if omega.is_zero():
        raise ZeroVector("omega is the zero vector")
    norm = evaluate(form, omega, omega)
    if norm <= 0:
        raise NotPositive(f"Q(omega, omega) = {norm} is not positive")
    b_plus = inertia(form).b_plus
    if b_plus < 2:
        raise InsufficientBPlus(f"b+ = {b_plus}, at least 2 required")

    q_omega = form.apply(omega)
    projected = [
        [Fraction(1 if r == i else 0) - q_omega[i] / norm * omega[r] for r in range(n)]
        for i in range(n)
    ]
    gram = [[_bilinear(form.entries, projected[i], projected[j]) for j in range(n)] for i in range(n)]
    basis, diagonal = congruence_reduce(gram)
    index = _sign_order(diagonal)[0]
    if diagonal[index] <= 0:
        raise InternalInconsistency("complement of omega has no positive direction although b+ >= 2")

    direction = [sum((basis[i][index] * projected[i][r] for i in range(n)), Fraction(0)) for r in range(n)]
    c = clear_denominators(ClassVector(tuple(direction)))
    if evaluate(form, c, c) <= 0 or evaluate(form, c, omega) != 0:
        raise InternalInconsistency(f"class {c} fails the positivity/orthogonality contract")
    logger.info(f"Positive class orthogonal to {omega}: c={c}, Q(c,c)={evaluate(form, c, c)}")
    return c


def row_reduce(matrix: Sequence[Sequence[Scalar]], columns: Optional[int] = None) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form over the rationals.

    Args:
        matrix: Rows of the matrix
        columns: Column count, needed when the matrix has no rows

    Returns:
        (rref rows, pivot column indices)
    """
    rows = [[Fraction(v) for v in row] for row in matrix]
    width = columns if columns is not None else (len(rows[0]) if rows else 0)
    pivots: List[int] = []
    r = 0
    for c in range(width):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][c]
        rows[r] = [v / lead for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(matrix: Sequence[Sequence[Scalar]], columns: Optional[int] = None) -> int:
    return len(row_reduce(matrix, columns)[1])


def nullspace(matrix: Sequence[Sequence[Scalar]], columns: Optional[int] = None) -> List[List[Fraction]]:
    """Basis of the kernel {x : matrix · x = 0}, one vector per free column."""
    width = columns if columns is not None else (len(matrix[0]) if matrix else 0)
    rows, pivots = row_reduce(matrix, width)
    free = [c for c in range(width) if c not in pivots]
    kernel = []
    for f in free:
        vector = [Fraction(0)] * width
        vector[f] = Fraction(1)
        for row_index, p in enumerate(pivots):
            vector[p] = -rows[row_index][f]
        kernel.append(vector)
    return kernel
