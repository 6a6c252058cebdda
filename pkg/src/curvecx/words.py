"""Words and conjugacy in the surface group pi_1 of a closed genus-g surface.

The group is presented as  < a_1, b_1, ..., a_g, b_g | prod_i [a_i, b_i] >.
Letters are stored as signed integers: a_i <-> 2i-1, b_i <-> 2i, inverses
negative.  The defining relator has length 4g and satisfies a small
cancellation condition (any common subword of two distinct cyclic rotations
of R or R^-1 has length <= 1 for g >= 2), so Dehn's greedy shortening solves
the word problem and cyclic Dehn reduction plus half-relator swaps solves
conjugacy.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence, Tuple

Letters = Tuple[int, ...]


@dataclass(frozen=True)
class GeneratorLetter:
    """A single generator or inverse: kind 'a' or 'b', 1-based handle index."""

    kind: str
    index: int
    exponent: int

    def __post_init__(self):
        if self.kind not in ("a", "b"):
            raise ValueError(f"bad generator kind {self.kind!r}")
        if self.exponent not in (1, -1):
            raise ValueError(f"exponent must be +-1, got {self.exponent}")
        if self.index < 1:
            raise ValueError(f"index must be >= 1, got {self.index}")

    def encode(self) -> int:
        base = 2 * (self.index - 1) + (1 if self.kind == "a" else 2)
        return base * self.exponent

    @staticmethod
    def decode(v: int) -> "GeneratorLetter":
        base = abs(v)
        index = (base + 1) // 2
        kind = "a" if base % 2 == 1 else "b"
        return GeneratorLetter(kind, index, 1 if v > 0 else -1)


def _letter_key(v: int) -> int:
    # spec order a_1 < a_1^-1 < b_1 < b_1^-1 < a_2 < ...
    return 2 * (abs(v) - 1) + (0 if v > 0 else 1)


def free_reduce(letters: Iterable[int]) -> Letters:
    out: list[int] = []
    for v in letters:
        if out and out[-1] == -v:
            out.pop()
        else:
            out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class GroupWord:
    """A word in pi_1(Sigma_g); not necessarily reduced."""

    genus: int
    letters: Letters

    def __post_init__(self):
        if self.genus < 1:
            raise ValueError("genus must be >= 1")
        for v in self.letters:
            if v == 0 or abs(v) > 2 * self.genus:
                raise ValueError(f"letter {v} out of range for genus {self.genus}")

    @staticmethod
    def from_ints(genus: int, letters: Iterable[int]) -> "GroupWord":
        return GroupWord(genus, tuple(letters))

    @staticmethod
    def identity(genus: int) -> "GroupWord":
        return GroupWord(genus, ())

    @staticmethod
    def from_generator_letters(genus: int, ls: Sequence[GeneratorLetter]) -> "GroupWord":
        return GroupWord(genus, tuple(l.encode() for l in ls))

    def to_generator_letters(self) -> list[GeneratorLetter]:
        return [GeneratorLetter.decode(v) for v in self.letters]

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        if self.genus != other.genus:
            raise ValueError("genus mismatch")
        return GroupWord(self.genus, free_reduce(self.letters + other.letters))

    def inverse(self) -> "GroupWord":
        return GroupWord(self.genus, tuple(-v for v in reversed(self.letters)))

    def conjugate_by(self, c: "GroupWord") -> "GroupWord":
        return c * self * c.inverse()

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        parts = []
        for v in self.letters:
            g = GeneratorLetter.decode(v)
            parts.append(f"{g.kind}{g.index}" + ("" if g.exponent == 1 else "^-1"))
        return "*".join(parts)


def relator(genus: int) -> GroupWord:
    """The defining relator prod_i [a_i, b_i]."""
    ls: list[int] = []
    for i in range(1, genus + 1):
        a, b = 2 * i - 1, 2 * i
        ls += [a, b, -a, -b]
    return GroupWord(genus, tuple(ls))


@lru_cache(maxsize=None)
def _rotation_table(genus: int):
    """The relator, its inverse, and a 2-letter window index.

    Returns (bases, seed): bases = (R, R^-1) as letter tuples read cyclically;
    seed maps each adjacent letter pair to its unique (base_id, position).
    Uniqueness is the piece-length-1 small cancellation property of the
    surface relator, checked at build time.
    """
    R = relator(genus).letters
    n = len(R)
    bases = (R, tuple(-v for v in reversed(R)))
    seed: dict[Tuple[int, int], Tuple[int, int]] = {}
    for bid, base in enumerate(bases):
        for p in range(n):
            w = (base[p], base[(p + 1) % n])
            if w in seed:
                raise AssertionError(f"piece condition failed: window {w} repeats")
            seed[w] = (bid, p)
    return bases, seed


def _longest_relator_match(letters: Letters, pos: int, genus: int) -> Tuple[int, Optional[Tuple[int, int]]]:
    """Length of the longest cyclic-relator subword matching letters[pos:]."""
    bases, seed = _rotation_table(genus)
    n = len(letters)
    if pos + 1 >= n:
        return (1 if pos < n else 0), None
    key = (letters[pos], letters[pos + 1])
    hit = seed.get(key)
    if hit is None:
        return 1, None
    bid, p = hit
    base = bases[bid]
    L = len(base)
    m = 2
    while pos + m < n and m < L and base[(p + m) % L] == letters[pos + m]:
        m += 1
    return m, (bid, p)


def reduce_word(w: GroupWord) -> GroupWord:
    """Free reduction only; same group element."""
    return GroupWord(w.genus, free_reduce(w.letters))


def dehn_shorten(w: GroupWord) -> GroupWord:
    """Greedy Dehn shortening: replace any piece longer than half the relator.

    The result represents the same element, contains no subword longer than
    half of any relator rotation, and is empty iff w is trivial in the group.
    """
    if w.genus < 2:
        raise ValueError("Dehn's algorithm requires genus >= 2")
    bases, _ = _rotation_table(w.genus)
    half = 2 * w.genus
    letters = free_reduce(w.letters)
    changed = True
    while changed:
        changed = False
        i = 0
        n = len(letters)
        while i < n:
            m, hit = _longest_relator_match(letters, i, w.genus)
            if m > half and hit is not None:
                bid, p = hit
                base = bases[bid]
                L = len(base)
                # matched piece u starts at base position p; u * t is a cyclic
                # rotation of the relator, so u = t^-1 in the group
                tail = tuple(base[(p + k) % L] for k in range(m, L))
                repl = tuple(-v for v in reversed(tail))
                letters = free_reduce(letters[:i] + repl + letters[i + m:])
                changed = True
                break
            i += 1
    return GroupWord(w.genus, letters)


def is_trivial(w: GroupWord) -> bool:
    return len(dehn_shorten(w)) == 0


def words_equal(u: GroupWord, v: GroupWord) -> bool:
    """Equality in the group (not as words)."""
    return is_trivial(u * v.inverse())


def _cyclic_free_reduce(letters: Letters) -> Tuple[Letters, Letters]:
    """Cyclically reduce; returns (core, conj) with word = conj * core * conj^-1."""
    core = list(free_reduce(letters))
    conj: list[int] = []
    while len(core) >= 2 and core[0] == -core[-1]:
        conj.append(core[0])
        core = core[1:-1]
    return tuple(core), tuple(conj)


def _min_rotation(letters: Letters) -> Tuple[Letters, int]:
    """Lexicographically least rotation by the spec letter order.

    Returns (rotated, s) where rotated = letters[s:] + letters[:s].
    """
    n = len(letters)
    if n == 0:
        return letters, 0
    keys = [_letter_key(v) for v in letters] * 2
    best = 0
    for cand in range(1, n):
        # compare rotation cand against rotation best
        for k in range(n):
            x, y = keys[cand + k], keys[best + k]
            if x != y:
                if x < y:
                    best = cand
                break
    return letters[best:] + letters[:best], best


def _cyclic_dehn_reduce(letters: Letters, genus: int) -> Tuple[Letters, Letters]:
    """Cyclic Dehn reduction; returns (core, conj), word = conj*core*conj^-1."""
    bases, _ = _rotation_table(genus)
    half = 2 * genus
    core, conj = _cyclic_free_reduce(letters)
    conj_l = list(conj)
    changed = True
    while changed:
        changed = False
        n = len(core)
        if n == 0:
            break
        doubled = core + core
        for i in range(n):
            m, hit = _longest_relator_match(doubled, i, genus)
            m = min(m, n)  # a match may not use more than the whole cyclic word
            if m > half and hit is not None:
                bid, p = hit
                base = bases[bid]
                L = len(base)
                tail = tuple(base[(p + k) % L] for k in range(m, L))
                repl = tuple(-v for v in reversed(tail))
                # rotate so the match starts at 0: core' = core[i:] + core[:i]
                conj_l += list(core[:i])
                rotated = core[i:] + core[:i]
                new = free_reduce(repl + rotated[m:]) if m <= n else repl
                core, extra = _cyclic_free_reduce(new)
                conj_l += list(extra)
                changed = True
                break
    return core, free_reduce(tuple(conj_l))


def _half_swaps(letters: Letters, genus: int) -> Iterator[Letters]:
    """All words obtained by swapping an exactly-half relator subword.

    A cyclic subword u of length 2g matching half of a rotation u*t of the
    relator set is replaced by t^-1 (same length, same group element).
    """
    bases, _ = _rotation_table(genus)
    half = 2 * genus
    n = len(letters)
    if n < half:
        return
    doubled = letters + letters
    for i in range(n):
        m, hit = _longest_relator_match(doubled, i, genus)
        if hit is None:
            continue
        m = min(m, n)
        if m >= half:
            bid, p = hit
            base = bases[bid]
            L = len(base)
            tail = tuple(base[(p + half + k) % L] for k in range(L - half))
            repl = tuple(-v for v in reversed(tail))
            rotated = doubled[i:i + n]
            yield free_reduce(repl + rotated[half:])


class _ConjClosure:
    """BFS closure of a cyclic word under rotation + half-relator swaps.

    Members are cyclically Dehn-reduced tuples in minimal-rotation form; the
    closure of a geodesic cyclic word is exactly the set of geodesic cyclic
    words of its conjugacy class, so two words are conjugate iff their
    closures share a member.
    """

    def __init__(self, genus: int, letters: Letters, cap: int = 200000):
        self.genus = genus
        self.cap = cap
        core, conj = _cyclic_dehn_reduce(letters, genus)
        self.restarts = 0
        self._build(core, conj)

    def _build(self, core: Letters, conj: Letters):
        genus = self.genus
        start, s = _min_rotation(core)
        # word = conj * core * conj^-1 ; rotating by s conjugates by prefix
        start_conj = free_reduce(conj + core[:s])
        seen: dict[Letters, Letters] = {start: start_conj}
        frontier = [start]
        while frontier:
            nxt: list[Letters] = []
            for cur in frontier:
                cur_conj = seen[cur]
                # _half_swaps scans the doubled word, so every rotation of cur
                # is covered by a single pass
                for swapped in _half_swaps(cur, genus):
                    core2, extra = _cyclic_dehn_reduce(swapped, genus)
                    if len(core2) < len(start):
                        # shorter representative found; restart closure there
                        self.restarts += 1
                        self._build(core2, free_reduce(cur_conj + extra))
                        return
                    canon, s2 = _min_rotation(core2)
                    if canon not in seen:
                        if len(seen) >= self.cap:
                            raise RuntimeError("conjugacy closure exceeded cap")
                        seen[canon] = free_reduce(cur_conj + extra + core2[:s2])
                        nxt.append(canon)
            frontier = nxt
        self.members = seen
        self.canonical = min(seen.keys(), key=lambda t: [_letter_key(v) for v in t])

    def witness_to(self, member: Letters) -> Letters:
        return self.members[member]


def _linear_half_swaps(letters: Letters, genus: int) -> Iterator[Letters]:
    """Non-cyclic version of _half_swaps: swap exactly-half relator subwords."""
    bases, _ = _rotation_table(genus)
    half = 2 * genus
    n = len(letters)
    for i in range(n - half + 1):
        m, hit = _longest_relator_match(letters, i, genus)
        if hit is None or m < half:
            continue
        bid, p = hit
        base = bases[bid]
        L = len(base)
        tail = tuple(base[(p + half + k) % L] for k in range(L - half))
        repl = tuple(-v for v in reversed(tail))
        yield free_reduce(letters[:i] + repl + letters[i + half:])


def element_canonical(w: GroupWord) -> GroupWord:
    """Canonical geodesic spelling of a group element.

    All geodesic spellings of an element differ by swaps of exactly-half
    relator subwords; the canonical form is the lexicographically least
    member of the swap closure of the Dehn-shortened word.
    """
    start = dehn_shorten(w).letters
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for cur in frontier:
            for swapped in _linear_half_swaps(cur, w.genus):
                if len(swapped) < len(start):
                    # shouldn't happen for a Dehn-reduced start, but be safe
                    return element_canonical(GroupWord(w.genus, swapped))
                if swapped not in seen:
                    seen.add(swapped)
                    nxt.append(swapped)
        frontier = nxt
    best = min(seen, key=lambda t: [_letter_key(v) for v in t])
    return GroupWord(w.genus, best)


def cyclic_canonical(w: GroupWord) -> GroupWord:
    """Canonical representative of the conjugacy class (oriented)."""
    cl = _ConjClosure(w.genus, w.letters)
    return GroupWord(w.genus, cl.canonical)


def conjugacy_witness(u: GroupWord, v: GroupWord) -> Optional[GroupWord]:
    """A word t with u = t v t^-1 in the group, or None if not conjugate."""
    if u.genus != v.genus:
        raise ValueError("genus mismatch")
    cu = _ConjClosure(u.genus, u.letters)
    cv = _ConjClosure(v.genus, v.letters)
    common = set(cu.members) & set(cv.members)
    if not common:
        return None
    m = next(iter(common))
    # u = pu * m * pu^-1 and v = pv * m * pv^-1  =>  u = (pu pv^-1) v (...)^-1
    pu = GroupWord(u.genus, cu.witness_to(m))
    pv = GroupWord(v.genus, cv.witness_to(m))
    return dehn_shorten(pu * pv.inverse())


def is_conjugate(u: GroupWord, v: GroupWord) -> bool:
    """Conjugacy of oriented elements of pi_1."""
    if u.genus != v.genus:
        raise ValueError("genus mismatch")
    cu = _ConjClosure(u.genus, u.letters)
    cv = _ConjClosure(v.genus, v.letters)
    if len(next(iter(cu.members), ())) != len(next(iter(cv.members), ())):
        return False
    return bool(set(cu.members) & set(cv.members))


@dataclass(frozen=True)
class CyclicWord:
    """Unoriented conjugacy-class representative.

    Cyclically reduced, stored as the lexicographically least rotation over
    the word and its inverse; re-canonicalization is the identity.
    """

    genus: int
    letters: Letters

    @staticmethod
    def of(w: GroupWord) -> "CyclicWord":
        core, _ = _cyclic_dehn_reduce(w.letters, w.genus) if w.genus >= 2 else (_cyclic_free_reduce(w.letters)[0], ())
        fwd, _ = _min_rotation(core)
        inv_core = tuple(-v for v in reversed(core))
        bwd, _ = _min_rotation(inv_core)
        best = min(fwd, bwd, key=lambda t: [_letter_key(v) for v in t])
        return CyclicWord(w.genus, best)

    def as_word(self) -> GroupWord:
        return GroupWord(self.genus, self.letters)

    def __len__(self) -> int:
        return len(self.letters)


def classes_conjugate_unoriented(genus: int, x: Letters, y: Letters) -> bool:
    """Conjugacy of unoriented classes: x ~ y or x ~ y^-1."""
    u = GroupWord(genus, x)
    v = GroupWord(genus, y)
    return is_conjugate(u, v) or is_conjugate(u, v.inverse())


@dataclass(frozen=True)
class HomologyClass:
    """Integer vector in H_1 coordinates [a_1],[b_1],...,[a_g],[b_g]."""

    genus: int
    coordinates: Tuple[int, ...]

    def __post_init__(self):
        if len(self.coordinates) != 2 * self.genus:
            raise ValueError("homology vector length must be 2g")

    def __add__(self, other: "HomologyClass") -> "HomologyClass":
        return HomologyClass(self.genus, tuple(x + y for x, y in zip(self.coordinates, other.coordinates)))

    def __neg__(self) -> "HomologyClass":
        return HomologyClass(self.genus, tuple(-x for x in self.coordinates))

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.coordinates)


def homology_class(w: GroupWord) -> HomologyClass:
    """Exponent-sum vector; a homomorphism onto Z^{2g}."""
    coords = [0] * (2 * w.genus)
    for v in w.letters:
        coords[abs(v) - 1] += 1 if v > 0 else -1
    return HomologyClass(w.genus, tuple(coords))


def symplectic_pairing(x: HomologyClass, y: HomologyClass) -> int:
    """Standard symplectic form: <[a_i],[b_i]> = 1, all other basis pairs 0."""
    if x.genus != y.genus:
        raise ValueError("genus mismatch")
    total = 0
    for i in range(x.genus):
        total += x.coordinates[2 * i] * y.coordinates[2 * i + 1]
        total -= x.coordinates[2 * i + 1] * y.coordinates[2 * i]
    return total
