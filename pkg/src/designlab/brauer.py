"""Brauer diagrams: pairings of 2t points, composition and loop counting.

Points ``1..t`` form the bottom (input) row and ``t+1..2t`` the top (output)
row.  A permutation ``pi`` of ``{0..t-1}`` is the diagram pairing bottom point
``k+1`` with top point ``t+pi[k]+1``, which matches the operator convention
``P(pi)|i_1..i_t> = |i_{pi^-1(1)}..i_{pi^-1(t)}>``.
"""
from dataclasses import dataclass
from itertools import permutations
import math
import re

from .errors import DimensionError, DomainError, ValidationError

MAX_T = 8


@dataclass(frozen=True, order=True)
class Pairing:
    """A perfect matching of ``{1..2t}`` stored canonically."""

    t: int
    pairs: tuple

    def __post_init__(self):
        if self.t < 1:
            raise ValidationError("t must be positive")
        pairs = tuple(sorted(tuple(sorted((int(a), int(b)))) for a, b in self.pairs))
        points = [p for pair in pairs for p in pair]
        if sorted(points) != list(range(1, 2 * self.t + 1)) or len(pairs) != self.t:
            raise ValidationError(f"{self.pairs!r} is not a perfect matching of 1..{2 * self.t}")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def identity(cls, t):
        return cls.from_permutation(tuple(range(t)))

    @classmethod
    def from_permutation(cls, perm):
        t = len(perm)
        return cls(t, tuple((k + 1, t + perm[k] + 1) for k in range(t)))

    def to_permutation(self):
        """One-line form of the encoded permutation, or ``None``."""
        if not is_permutation(self):
            return None
        perm = [0] * self.t
        for a, b in self.pairs:
            perm[a - 1] = b - self.t - 1
        return tuple(perm)

    def transpose(self):
        """Flip the diagram upside down (bottom <-> top)."""
        t = self.t

        def flip(p):
            return p + t if p <= t else p - t

        return Pairing(t, tuple((flip(a), flip(b)) for a, b in self.pairs))

    def partner(self, point):
        for a, b in self.pairs:
            if a == point:
                return b
            if b == point:
                return a
        raise ValidationError(f"point {point} not in diagram")

    def __str__(self):
        return f"{self.t}; " + "".join(f"({a},{b})" for a, b in self.pairs)

    @classmethod
    def parse(cls, text):
        head, _, body = text.partition(";")
        try:
            t = int(head.strip())
        except ValueError as exc:
            raise ValidationError(f"bad diagram text {text!r}") from exc
        pairs = re.findall(r"\((\d+),(\d+)\)", body.replace(" ", ""))
        if "".join(f"({a},{b})" for a, b in pairs) != body.replace(" ", ""):
            raise ValidationError(f"bad diagram text {text!r}")
        return cls(t, tuple((int(a), int(b)) for a, b in pairs))


@dataclass(frozen=True)
class WeightedDiagram:
    """A diagram times ``delta**loop_power``."""

    diagram: Pairing
    loop_power: int = 0

    def __post_init__(self):
        if self.loop_power < 0:
            raise ValidationError("loop_power must be non-negative")


def _matchings(points):
    if not points:
        yield ()
        return
    first, rest = points[0], points[1:]
    for i, other in enumerate(rest):
        for tail in _matchings(rest[:i] + rest[i + 1:]):
            yield ((first, other),) + tail


def enumerate_pairings(t):
    """All ``(2t-1)!!`` Brauer diagrams, permutations first.

    Permutations come in lexicographic one-line order (so index 0 is the
    identity), followed by the remaining diagrams sorted by their canonical
    pair lists.
    """
    if not 1 <= t <= MAX_T:
        raise DomainError(f"t={t} outside the supported range 1..{MAX_T}")
    perms = [Pairing.from_permutation(p) for p in permutations(range(t))]
    seen = set(perms)
    rest = sorted(
        p for p in (Pairing(t, m) for m in _matchings(tuple(range(1, 2 * t + 1))))
        if p not in seen
    )
    return perms + rest


def double_factorial_odd(t):
    """``(2t-1)!!``."""
    return math.prod(range(1, 2 * t, 2))


def compose(a, b):
    """Stack ``b`` under ``a`` (``b`` acts first) and remove closed loops.

    Uses union-find over the ``3t`` points of the stacked picture: ``b``'s
    bottom row, the shared middle row, and ``a``'s top row.
    """
    if a.t != b.t:
        raise DimensionError(f"cannot compose diagrams of size {a.t} and {b.t}")
    t = a.t
    parent = list(range(3 * t))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def lower(p):  # b's rows -> nodes 0..2t-1
        return p - 1

    def upper(p):  # a's rows -> nodes t..3t-1
        return p - 1 + t

    for x, y in b.pairs:
        parent[find(lower(x))] = find(lower(y))
    for x, y in a.pairs:
        parent[find(upper(x))] = find(upper(y))

    ends = {}
    for node in range(3 * t):
        if node < t or node >= 2 * t:
            ends.setdefault(find(node), []).append(node)
    pairs = []
    for nodes in ends.values():
        u, v = nodes
        pairs.append((u + 1 if u < t else u - t + 1, v + 1 if v < t else v - t + 1))
    middle_roots = {find(node) for node in range(t, 2 * t)}
    loops = len(middle_roots - set(ends))
    return WeightedDiagram(Pairing(t, tuple(pairs)), loops)


def propagating_number(sigma):
    """Number of strands joining the bottom row to the top row."""
    return sum(1 for a, b in sigma.pairs if a <= sigma.t < b)


def is_permutation(sigma):
    return propagating_number(sigma) == sigma.t


def crossing_number(sigma):
    """Crossings when the 2t points sit on a circle (bottom 1..t, top t..1).

    For a permutation this is its inversion count.
    """
    t = sigma.t

    def position(p):
        return p if p <= t else 3 * t + 1 - p

    chords = [tuple(sorted((position(a), position(b)))) for a, b in sigma.pairs]
    count = 0
    for i, (a, b) in enumerate(chords):
        for x, y in chords[i + 1:]:
            if a < x < b < y or x < a < y < b:
                count += 1
    return count


@dataclass
class TableCheck:
    ok: bool
    counterexample: dict = None

    def __bool__(self):
        return self.ok


def composition_table_check(t):
    """Check closure of the permutation / non-permutation split under composition.

    Verifies ``S.S in S``, ``S.J in J``, ``J.S in J``, ``J.J in J`` for every
    ordered pair of diagrams and that the indicator of ``S`` is multiplicative.
    """
    if not 1 <= t <= 5:
        raise DomainError("composition table check supports 1 <= t <= 5")
    diagrams = enumerate_pairings(t)
    for a in diagrams:
        ra = is_permutation(a)
        for b in diagrams:
            rb = is_permutation(b)
            product = compose(a, b)
            rc = is_permutation(product.diagram)
            if rc != (ra and rb):
                return TableCheck(False, {"a": str(a), "b": str(b), "product": str(product.diagram)})
            # permutations never close loops
            if ra and rb and product.loop_power != 0:
                return TableCheck(False, {"a": str(a), "b": str(b), "loops": product.loop_power})
    return TableCheck(True)
