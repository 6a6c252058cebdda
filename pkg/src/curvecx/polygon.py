"""Piecewise-linear curve workbench on the one-vertex 4g-gon model.

The closed genus-g surface is the regular 4g-gon with boundary word
prod_i [a_i, b_i] read counterclockwise and paired sides glued by the
parameter flip t <-> 1-t.  Curves are cyclic sequences of side crossings
joined by straight chords; all geometry is exact over Q, so crossing data
(points, order, signs) is combinatorially reliable.

Crossing the side at position k applies the deck transformation
J_k = prefix(k+1) * prefix(partner(k))^-1, so the free-homotopy class of a
drawn curve is just the product of its jump words.  That makes the model a
word-level workbench: Dehn-twist images, neighborhood boundaries and
generator loops are all computed here without hyperbolic geometry.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import cos, sin, pi
from typing import Iterable, List, Optional, Sequence, Tuple

from .words import (
    GroupWord,
    Letters,
    dehn_shorten,
    element_canonical,
    free_reduce,
    relator,
    words_equal,
)

Point = Tuple[Fraction, Fraction]


@lru_cache(maxsize=None)
def polygon_model(genus: int) -> "PolygonModel":
    return PolygonModel(genus)


class PolygonModel:
    def __init__(self, genus: int):
        if genus < 1:
            raise ValueError("genus must be >= 1")
        self.genus = genus
        self.n = 4 * genus
        self.boundary: Letters = relator(genus).letters
        self.partner: List[int] = [-1] * self.n
        for k, v in enumerate(self.boundary):
            for m, w in enumerate(self.boundary):
                if m != k and w == -v:
                    self.partner[k] = m
        assert all(p >= 0 for p in self.partner)
        # prefix(k) = product of the first k boundary letters
        self.prefix: List[Letters] = [()]
        for v in self.boundary:
            self.prefix.append(free_reduce(self.prefix[-1] + (v,)))
        # jump word applied when a curve exits through side k
        self.jump: List[Letters] = []
        for k in range(self.n):
            inv = tuple(-v for v in reversed(self.prefix[self.partner[k]]))
            self.jump.append(free_reduce(self.prefix[k + 1] + inv))
        # rational convex approximation of the regular 4g-gon
        self.vertices: List[Point] = []
        scale = 10 ** 6
        for j in range(self.n):
            ang = 2 * pi * j / self.n
            self.vertices.append(
                (Fraction(round(scale * cos(ang)), scale), Fraction(round(scale * sin(ang)), scale))
            )
        assert self._is_convex(), "rounded polygon lost convexity"

    def _is_convex(self) -> bool:
        pts = self.vertices
        n = self.n
        for j in range(n):
            ax, ay = pts[j]
            bx, by = pts[(j + 1) % n]
            cx, cy = pts[(j + 2) % n]
            cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
            if cross <= 0:
                return False
        return True

    def side_point(self, k: int, t: Fraction) -> Point:
        if not (0 < t < 1):
            raise ValueError("side parameter must be interior")
        ax, ay = self.vertices[k]
        bx, by = self.vertices[(k + 1) % self.n]
        return (ax + t * (bx - ax), ay + t * (by - ay))

    def glue(self, k: int, t: Fraction) -> Tuple[int, Fraction]:
        return self.partner[k], 1 - t

    def jump_word(self, k: int) -> GroupWord:
        return GroupWord(self.genus, self.jump[k])


@dataclass(frozen=True)
class Crossing:
    """One transversal pass through a glued side pair: exits via `side`."""

    side: int
    t: Fraction


class PLPath:
    """A PL path in the glued polygon: basepoint -> crossings -> endpoint.

    If `cyclic` is true there is no basepoint and the crossings are cyclic;
    otherwise the path starts and ends at `base` (a point in the open
    polygon).
    """

    def __init__(self, model: PolygonModel, crossings: Sequence[Crossing], cyclic: bool, base: Optional[Point] = None):
        self.model = model
        self.crossings = list(crossings)
        self.cyclic = cyclic
        if not cyclic and base is None:
            base = (Fraction(1, 97), Fraction(1, 89))
        self.base = base
        seen = {}
        for c in self.crossings:
            seen.setdefault((c.side, c.t), 0)
            seen[(c.side, c.t)] += 1
            p = model.partner[c.side]
            seen.setdefault((p, 1 - c.t), 0)
            seen[(p, 1 - c.t)] += 1
        if any(v > 1 for v in seen.values()):
            raise ValueError("duplicate side parameters in one path")

    def segments(self) -> List[Tuple[Point, Point]]:
        m = self.model
        segs: List[Tuple[Point, Point]] = []
        cs = self.crossings
        if self.cyclic:
            if not cs:
                return []
            for i in range(len(cs)):
                cur, nxt = cs[i], cs[(i + 1) % len(cs)]
                start = m.side_point(*m.glue(cur.side, cur.t))
                end = m.side_point(nxt.side, nxt.t)
                segs.append((start, end))
        else:
            pts: List[Point] = [self.base]
            for c in cs:
                pts.append(m.side_point(c.side, c.t))
                pts.append(m.side_point(*m.glue(c.side, c.t)))
            pts.append(self.base)
            for i in range(0, len(pts), 2):
                segs.append((pts[i], pts[i + 1]))
        return segs

    def word(self) -> GroupWord:
        ls: list[int] = []
        for c in self.crossings:
            ls.extend(self.model.jump[c.side])
        return GroupWord(self.model.genus, free_reduce(tuple(ls)))

    def rotated_word_from(self, idx: int) -> GroupWord:
        """For cyclic paths: the class word read starting after crossing idx."""
        assert self.cyclic
        n = len(self.crossings)
        ls: list[int] = []
        for k in range(n):
            c = self.crossings[(idx + 1 + k) % n]
            ls.extend(self.model.jump[c.side])
        return GroupWord(self.model.genus, free_reduce(tuple(ls)))


def _seg_intersection(p1: Point, p2: Point, q1: Point, q2: Point):
    """Proper interior intersection of two segments, or None.

    Returns (s, u, sign): parameters along each segment in (0,1) and the
    orientation sign of (p-direction, q-direction).
    """
    d1 = (p2[0] - p1[0], p2[1] - p1[1])
    d2 = (q2[0] - q1[0], q2[1] - q1[1])
    den = d1[0] * d2[1] - d1[1] * d2[0]
    if den == 0:
        return None
    w = (q1[0] - p1[0], q1[1] - p1[1])
    s = (w[0] * d2[1] - w[1] * d2[0]) / den
    u = (w[0] * d1[1] - w[1] * d1[0]) / den
    if not (0 < s < 1 and 0 < u < 1):
        if s in (0, 1) and 0 <= u <= 1 or u in (0, 1) and 0 <= s <= 1:
            raise ValueError("degenerate endpoint intersection; perturb parameters")
        return None
    return s, u, (1 if den > 0 else -1)


@dataclass(frozen=True)
class PathIntersection:
    seg_a: int
    s_a: Fraction
    seg_b: int
    s_b: Fraction
    sign: int


def path_intersections(a: PLPath, b: PLPath) -> List[PathIntersection]:
    """All transversal crossings between two PL paths (a may equal b)."""
    segs_a, segs_b = a.segments(), b.segments()
    self_mode = a is b
    out: List[PathIntersection] = []
    for i, (p1, p2) in enumerate(segs_a):
        for j, (q1, q2) in enumerate(segs_b):
            if self_mode and j <= i:
                continue
            hit = _seg_intersection(p1, p2, q1, q2)
            if hit is not None:
                s, u, sign = hit
                out.append(PathIntersection(i, s, j, u, sign))
    return out


@lru_cache(maxsize=None)
def _jump_ball(genus: int, depth: int):
    """Map element canonical form -> shortest jump sequence reaching it."""
    model = polygon_model(genus)
    reach: dict[Letters, Tuple[int, ...]] = {(): ()}
    frontier: list[Tuple[Letters, Tuple[int, ...]]] = [((), ())]
    for _ in range(depth):
        nxt = []
        for elem, path in frontier:
            for k in range(model.n):
                cand = free_reduce(elem + model.jump[k])
                canon = element_canonical(GroupWord(genus, cand)).letters
                if canon not in reach:
                    reach[canon] = path + (k,)
                    nxt.append((canon, path + (k,)))
        frontier = nxt
    return reach


@lru_cache(maxsize=None)
def generator_loop_sides(genus: int, letter: int) -> Tuple[int, ...]:
    """A crossing sequence from the basepoint whose class is the generator.

    Found by a meet-in-the-middle search over tile-to-tile jumps; cached per
    genus and letter.
    """
    model = polygon_model(genus)
    target = element_canonical(GroupWord(genus, (letter,))).letters
    for depth in (2, 3):
        fwd = _jump_ball(genus, depth)
        if target in fwd:
            return fwd[target]
        for elem, path in fwd.items():
            y = GroupWord(genus, elem).inverse() * GroupWord(genus, target)
            back = fwd.get(element_canonical(y).letters)
            if back is not None:
                seq = path + back
                w = GroupWord(genus, free_reduce(tuple(sum((model.jump[k] for k in seq), ()))))
                if words_equal(w, GroupWord(genus, (letter,))):
                    return seq
    raise RuntimeError(f"no generator loop found for letter {letter} at genus {genus}")


def based_loop_for_word(model: PolygonModel, w: GroupWord, order_salt: int = 0) -> PLPath:
    """A based PL loop representing the given word.

    Concatenates generator loops letter by letter; side parameters are
    assigned in visit order inside small disjoint windows so distinct loops
    can be overlaid without parameter collisions.
    """
    sides: list[int] = []
    for v in w.letters:
        seq = generator_loop_sides(model.genus, abs(v))
        if v > 0:
            sides.extend(seq)
        else:
            sides.extend(model.partner[k] for k in reversed(seq))
    return path_from_sides(model, sides, cyclic=False, order_salt=order_salt)


def path_from_sides(model: PolygonModel, sides: Sequence[int], cyclic: bool, order_salt: int = 0, params: Optional[Sequence[Fraction]] = None) -> PLPath:
    """Build a PLPath from a side sequence with automatically distinct params.

    The i-th crossing through a given side pair gets parameter
    (i+1)/(N+1) shifted into a salt-dependent window, guaranteeing
    distinctness inside the path and across paths with different salts.
    """
    if params is not None:
        cs = [Crossing(k, t) for k, t in zip(sides, params)]
        return PLPath(model, cs, cyclic)
    per_pair_count: dict[int, int] = {}
    order: list[int] = []
    for k in sides:
        pair = min(k, model.partner[k])
        per_pair_count[pair] = per_pair_count.get(pair, 0) + 1
        order.append(per_pair_count[pair])
    cs = []
    # crossing parameters live in disjoint sub-windows of (0, 1/2), one per
    # salt, so glued images (mirrored into (1/2, 1)) can never collide with
    # crossing parameters of any other overlaid path
    lo = Fraction(1, order_salt + 3)
    hi = Fraction(1, order_salt + 2)
    for k, idx in zip(sides, order):
        pair = min(k, model.partner[k])
        total = per_pair_count[pair]
        t = lo + (hi - lo) * Fraction(idx, total + 1)
        cs.append(Crossing(k, t))
    return PLPath(model, cs, cyclic)


def twist_image_word(model: PolygonModel, core: PLPath, x: PLPath, handedness: int = 1) -> GroupWord:
    """The image of the based loop x under the Dehn twist about core.

    Walks x and, at each transversal crossing with the core, splices in the
    core's cycle word read from the crossing point, oriented by the crossing
    sign times the global handedness.
    """
    assert core.cyclic and not x.cyclic
    inters = path_intersections(x, core)
    by_seg: dict[int, list[PathIntersection]] = {}
    for it in inters:
        by_seg.setdefault(it.seg_a, []).append(it)
    for lst in by_seg.values():
        lst.sort(key=lambda it: it.s_a)
    ls: list[int] = []
    nsegs = len(x.crossings) + 1
    for seg in range(nsegs):
        for it in by_seg.get(seg, ()):
            rot = core.rotated_word_from(it.seg_b)
            piece = rot if handedness * it.sign > 0 else rot.inverse()
            ls.extend(piece.letters)
        if seg < len(x.crossings):
            ls.extend(model.jump[x.crossings[seg].side])
    return dehn_shorten(GroupWord(model.genus, free_reduce(tuple(ls))))
