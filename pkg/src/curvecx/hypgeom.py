"""Hyperbolic realization of the surface group and geometric intersections.

The group acts on the Poincare disk with fundamental domain the regular
4g-gon of the {4g, 4g} tessellation; side-pairing isometries are rebuilt
from corner correspondences of the combinatorial model in polygon.py, so
both models share side indices and jump words.

Geometric intersection numbers are computed by the annular-position count:
i(u, v) is the number of translates of the axis of v that cross one period
of the axis of u, i.e. the number of double cosets <u> h <v> whose axes
link on the boundary circle.  Candidate translates are enumerated from the
tiles met by the two axes, which is a complete superset; linking is decided
on boundary angles with margin checks and automatic precision escalation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath as mp

from .words import (
    CyclicWord,
    GroupWord,
    Letters,
    classes_conjugate_unoriented,
    dehn_shorten,
    free_reduce,
    relator,
)
from .polygon import generator_loop_sides, polygon_model


class PrecisionError(RuntimeError):
    pass


@lru_cache(maxsize=1 << 18)
def _canon_word_cached(genus: int, letters: Letters) -> Letters:
    from .words import element_canonical

    return element_canonical(GroupWord(genus, letters)).letters


def _canon_word(genus: int, letters: Letters) -> Letters:
    return _canon_word_cached(genus, free_reduce(letters))


def _mobius_apply(M, z):
    a, b, c, d = M[0], M[1], M[2], M[3]
    return (a * z + b) / (c * z + d)


def _mat_mul(A, B):
    return (
        A[0] * B[0] + A[1] * B[2],
        A[0] * B[1] + A[1] * B[3],
        A[2] * B[0] + A[3] * B[2],
        A[2] * B[1] + A[3] * B[3],
    )


def _mat_inv(M):
    # SU(1,1)-like matrices have det 1 after normalization; rescale anyway
    det = M[0] * M[3] - M[1] * M[2]
    return (M[3] / det, -M[1] / det, -M[2] / det, M[0] / det)


def _translate_to_zero(z0):
    # disk isometry w -> (w - z0) / (1 - conj(z0) w)
    return (mp.mpc(1), -z0, -mp.conj(z0), mp.mpc(1))


class FuchsianModel:
    """Matrices for one genus at one working precision."""

    def __init__(self, genus: int, dps: int = 40):
        if genus < 2:
            raise ValueError("hyperbolic model needs genus >= 2")
        self.genus = genus
        self.dps = dps
        self.poly = polygon_model(genus)
        n = self.poly.n
        with mp.workdps(dps):
            # a generically perturbed fundamental 4g-gon: paired sides keep
            # equal angular increments (hence equal lengths at common radius)
            # and the vertex angle sum is tuned to 2*pi by bisection on the
            # radius.  The perturbation kills the regular polygon's
            # symmetries, so catalogue axes no longer run through vertices.
            incr = [mp.mpf(1)] * n
            wobble = [mp.mpf("0.037"), mp.mpf("-0.053"), mp.mpf("0.029"), mp.mpf("-0.011"),
                      mp.mpf("0.047"), mp.mpf("-0.023"), mp.mpf("0.017"), mp.mpf("-0.041")]
            pair_ids = sorted({min(k, self.poly.partner[k]) for k in range(n)})
            for j, pid in enumerate(pair_ids):
                w = 1 + wobble[j % len(wobble)] * (1 + mp.mpf(j) / 17)
                incr[pid] = w
                incr[self.poly.partner[pid]] = w
            total = sum(incr)
            incr = [x * 2 * mp.pi / total for x in incr]
            angles = [mp.mpf(0)]
            for k in range(n - 1):
                angles.append(angles[-1] + incr[k])

            def angle_sum(r):
                coshr, sinhr = mp.cosh(r), mp.sinh(r)
                total = mp.mpf(0)
                for j in range(n):
                    for d in (incr[j % n], incr[(j - 1) % n]):
                        coshl = coshr * coshr - sinhr * sinhr * mp.cos(d)
                        sinhl = mp.sqrt(coshl * coshl - 1)
                        # base angle of the isoceles triangle (0, V, V')
                        cosa = (coshr * coshl - coshr) / (sinhr * sinhl)
                        total += mp.acos(cosa)
                return total

            cot = mp.cot(mp.pi / n)
            r_reg = mp.acosh(cot * cot)
            lo, hi = r_reg / 2, r_reg * 2
            assert angle_sum(lo) > 2 * mp.pi > angle_sum(hi)
            for _ in range(dps * 7 // 2):
                mid = (lo + hi) / 2
                if angle_sum(mid) > 2 * mp.pi:
                    lo = mid
                else:
                    hi = mid
            r = (lo + hi) / 2
            self.eucl_radius = mp.tanh(r / 2)
            self.corners = [
                self.eucl_radius * mp.exp(1j * angles[j]) for j in range(n)
            ]
            self.jump_mats: List[Tuple] = []
            for k in range(n):
                p = self.poly.partner[k]
                M = self._isometry_two_points(
                    self.corners[p], self.corners[(p + 1) % n],
                    self.corners[(k + 1) % n], self.corners[k],
                )
                self.jump_mats.append(M)
            self.letter_mats: Dict[int, Tuple] = {}
            for letter in range(1, 2 * genus + 1):
                seq = generator_loop_sides(genus, letter)
                M = (mp.mpc(1), mp.mpc(0), mp.mpc(0), mp.mpc(1))
                for k in seq:
                    M = _mat_mul(M, self.jump_mats[k])
                self.letter_mats[letter] = M
                self.letter_mats[-letter] = _mat_inv(M)
            # sanity: the relator must act as +-identity
            R = relator(genus).letters
            MR = self.word_matrix(R)
            scale = max(abs(MR[0]), abs(MR[1]), abs(MR[2]), abs(MR[3]))
            err = min(
                max(abs(MR[0] / scale - s), abs(MR[3] / scale - s), abs(MR[1] / scale), abs(MR[2] / scale))
                for s in (1, -1)
            )
            if err > mp.mpf(10) ** (-dps + 12):
                raise AssertionError(f"relator does not act trivially, err={err}")

    def _isometry_two_points(self, P, Q, P2, Q2):
        """The orientation-preserving isometry with P -> P2, Q -> Q2."""
        T1 = _translate_to_zero(P)
        T2 = _translate_to_zero(P2)
        q1 = _mobius_apply(T1, Q)
        q2 = _mobius_apply(T2, Q2)
        if abs(q1) < mp.mpf(10) ** (-self.dps + 8) or abs(q2) < mp.mpf(10) ** (-self.dps + 8):
            raise AssertionError("coincident corner points")
        rot = q2 / q1
        rot = rot / abs(rot)
        Rm = (mp.sqrt(rot), mp.mpc(0), mp.mpc(0), 1 / mp.sqrt(rot))
        return _mat_mul(_mat_inv(T2), _mat_mul(Rm, T1))

    def word_matrix(self, letters: Sequence[int]):
        M = (mp.mpc(1), mp.mpc(0), mp.mpc(0), mp.mpc(1))
        for v in letters:
            M = _mat_mul(M, self.letter_mats[v])
        return M


@lru_cache(maxsize=None)
def _model(genus: int, dps: int) -> FuchsianModel:
    return FuchsianModel(genus, dps)


def _poincare_to_klein(z):
    return 2 * z / (1 + abs(z) ** 2)


@dataclass
class _Axis:
    attracting: object  # unit complex
    repelling: object

    def klein_chord(self):
        return self.attracting, self.repelling


def _fixed_points(M, eps):
    """Attracting and repelling fixed points of a hyperbolic disk isometry."""
    a, b, c, d = M
    # fixed points of (az+b)/(cz+d) = z  ->  c z^2 + (d-a) z - b = 0
    if abs(c) < eps * eps:
        raise PrecisionError("matrix too close to identity/rotation")
    disc = mp.sqrt((d - a) ** 2 + 4 * b * c)
    z1 = (-(d - a) + disc) / (2 * c)
    z2 = (-(d - a) - disc) / (2 * c)
    if abs(abs(z1) - 1) > mp.mpf("1e-8") or abs(abs(z2) - 1) > mp.mpf("1e-8"):
        raise PrecisionError("fixed points not on the boundary circle")
    z1 /= abs(z1)
    z2 /= abs(z2)
    # |derivative| at z is |det| / |cz+d|^2; attracting iff < 1
    det = a * d - b * c
    if abs(c * z1 + d) ** 2 > abs(det):
        return z1, z2
    return z2, z1


def _angles_link(p: Tuple, q: Tuple, eps) -> Optional[bool]:
    """Do boundary pairs p and q separate each other on the circle?

    Returns None if any pair of points is closer than eps (caller escalates).
    """
    pts = [(mp.arg(p[0]), 0), (mp.arg(p[1]), 0), (mp.arg(q[0]), 1), (mp.arg(q[1]), 1)]
    for i in range(4):
        for j in range(i + 1, 4):
            d = abs(pts[i][0] - pts[j][0])
            d = min(d, abs(d - 2 * mp.pi))
            if d < eps:
                return None
    pts.sort(key=lambda t: t[0])
    labels = [t[1] for t in pts]
    return labels[0] != labels[1]


class _Walker:
    """Tile walking in the Klein model, with exact-side margin checks."""

    def __init__(self, fm: FuchsianModel, eps):
        self.fm = fm
        self.eps = eps
        self.base_corners_k = [_poincare_to_klein(c) for c in fm.corners]

    def tile_corners(self, M):
        return [_poincare_to_klein(_mobius_apply(M, c)) for c in self.fm.corners]

    @staticmethod
    def _side(a, b, p):
        return (b.real - a.real) * (p.imag - a.imag) - (b.imag - a.imag) * (p.real - a.real)

    def locate(self, point_k, max_steps: int = 100000):
        """Find the tile containing point_k by walking the segment 0 -> point.

        Crossing parameters along the fixed segment increase strictly, so the
        walk terminates; a vertex graze raises for precision escalation.
        """
        fm = self.fm
        n = fm.poly.n
        word: Letters = ()
        M = (mp.mpc(1), mp.mpc(0), mp.mpc(0), mp.mpc(1))
        # generic interior start point breaks symmetric-configuration grazes
        P = mp.mpc(mp.mpf(1) / 73, mp.mpf(1) / 91)
        D = point_k - P
        L2 = D.real ** 2 + D.imag ** 2
        if L2 < self.eps:
            return word, M

        def seg_side(p):
            return D.real * (p.imag - P.imag) - D.imag * (p.real - P.real)

        def seg_param(z):
            return ((z.real - P.real) * D.real + (z.imag - P.imag) * D.imag) / L2

        t_cur = mp.mpf(0)  # the start point sits at parameter 0
        for _ in range(max_steps):
            corners = self.tile_corners(M)
            if all(
                self._side(corners[k], corners[(k + 1) % n], point_k) > 0
                for k in range(n)
            ):
                return word, M
            best = None
            for k in range(n):
                a, b = corners[k], corners[(k + 1) % n]
                sa = seg_side(a)
                sb = seg_side(b)
                if (sa > 0) == (sb > 0):
                    continue
                if min(abs(sa), abs(sb)) < self.eps * min(1, abs(sa - sb)):
                    raise PrecisionError("location segment grazes a vertex")
                t = seg_param(a + (sa / (sa - sb)) * (b - a))
                if t > t_cur + self.eps and (best is None or t < best[0]):
                    best = (t, k)
            if best is None:
                raise PrecisionError("location walk found no forward exit")
            t_cur, k = best
            word = _canon_word(fm.genus, word + fm.poly.jump[k])
            M = _mat_mul(M, fm.jump_mats[k])
        raise PrecisionError("point location did not terminate")

    def axis_tiles(self, A: _Axis, s_lo, s_hi, max_tiles: int = 20000):
        """All tiles whose interior the axis segment [s_lo, s_hi] meets.

        s is the hyperbolic coordinate along the axis: for Klein chord
        parameter t in (0,1) from repelling to attracting endpoint,
        s(t) = ln(t/(1-t))/2 (the Hilbert metric on the chord), so windows
        stay compact however close the chord runs to the circle.  Branches
        at near-vertex passes; the result is a superset of the tiles met.
        """
        fm = self.fm
        n = fm.poly.n
        frame = _AxisFrame(A)
        pad = mp.mpf("0.2")
        start_pt = frame.chord_point(frame.t_of_s((s_lo + s_hi) / 2))
        word0, M0 = self.locate(start_pt)
        seen = {word0: M0}
        frontier = [(word0, M0)]
        out = [(word0, M0)]
        while frontier:
            nxt = []
            for word, M in frontier:
                corners = self.tile_corners(M)
                for k in range(n):
                    a, b = corners[k], corners[(k + 1) % n]
                    sa = frame.side(a)
                    sb = frame.side(b)
                    if sa > self.eps and sb > self.eps:
                        continue
                    if sa < -self.eps and sb < -self.eps:
                        continue
                    den = sa - sb
                    if abs(den) < self.eps * self.eps:
                        continue
                    t = frame.param(a + (sa / den) * (b - a))
                    if not (0 < t < 1):
                        continue
                    sc = frame.s_of_t(t)
                    if sc < s_lo - pad or sc > s_hi + pad:
                        continue
                    w2 = _canon_word(fm.genus, word + fm.poly.jump[k])
                    if w2 in seen:
                        continue
                    if len(seen) >= max_tiles:
                        raise PrecisionError("axis band exceeded tile cap")
                    M2 = _mat_mul(M, fm.jump_mats[k])
                    seen[w2] = M2
                    nxt.append((w2, M2))
                    out.append((w2, M2))
            frontier = nxt
        return out


class _AxisFrame:
    """Chord frame of an axis: params, sides and hyperbolic coordinates."""

    def __init__(self, A: _Axis):
        self.Pk = _poincare_to_klein(A.repelling)
        self.Qk = _poincare_to_klein(A.attracting)
        d = self.Qk - self.Pk
        self.dx, self.dy = d.real, d.imag
        self.L2 = self.dx ** 2 + self.dy ** 2

    def param(self, z):
        return ((z.real - self.Pk.real) * self.dx + (z.imag - self.Pk.imag) * self.dy) / self.L2

    def side(self, p):
        a, b = self.Pk, self.Qk
        return (b.real - a.real) * (p.imag - a.imag) - (b.imag - a.imag) * (p.real - a.real)

    @staticmethod
    def s_of_t(t):
        return mp.log(t / (1 - t)) / 2

    @staticmethod
    def t_of_s(s):
        e = mp.e ** (2 * s)
        return e / (1 + e)

    def chord_point(self, t):
        return mp.mpc(self.Pk.real + t * self.dx, self.Pk.imag + t * self.dy)

    def s_of_point(self, z):
        t = self.param(z)
        if not (0 < t < 1):
            raise PrecisionError("point escaped the chord window")
        return self.s_of_t(t)

    def foot_param(self):
        """Chord parameter of the Euclidean foot of the origin."""
        return (-(self.Pk.real) * self.dx + (-(self.Pk.imag)) * self.dy) / self.L2


def _norm_mat(M):
    s = max(abs(M[0]), abs(M[1]), abs(M[2]), abs(M[3]))
    return (M[0] / s, M[1] / s, M[2] / s, M[3] / s)


def _is_proper_power(letters: Letters) -> bool:
    w = CyclicWord  # cyclic periodicity of the reduced cyclic word
    n = len(letters)
    for p in range(1, n // 2 + 1):
        if n % p == 0 and letters == letters[p:] + letters[:p]:
            return True
    return False


def geometric_intersection_words(genus: int, u: GroupWord, v: GroupWord, dps: int = 40, _depth: int = 0) -> int:
    """i_g of the unoriented free homotopy classes of u and v.

    Both classes must be represented by simple closed curves; this is not
    checked here (callers construct curves as mapping-class images of simple
    base curves).
    """
    cu = CyclicWord.of(u)
    cv = CyclicWord.of(v)
    if len(cu.letters) == 0 or len(cv.letters) == 0:
        return 0
    if classes_conjugate_unoriented(genus, cu.letters, cv.letters):
        return 0
    if _is_proper_power(cu.letters) or _is_proper_power(cv.letters):
        raise ValueError("intersection counting expects primitive classes")
    try:
        return _geom_int_core(genus, cu.letters, cv.letters, dps)
    except PrecisionError:
        if _depth >= 3:
            raise
        return geometric_intersection_words(genus, u, v, dps=dps * 2, _depth=_depth + 1)


def _geom_int_core(genus: int, u: Letters, v: Letters, dps: int) -> int:
    fm = _model(genus, dps)
    with mp.workdps(dps):
        eps = mp.mpf(10) ** (-dps // 2)
        walker = _Walker(fm, eps)
        Mu = fm.word_matrix(u)
        Mv = fm.word_matrix(v)
        au = _Axis(*_fixed_points(Mu, eps))
        av = _Axis(*_fixed_points(Mv, eps))
        fu = _AxisFrame(au)
        fv = _AxisFrame(av)

        def act(M, zk):
            # Klein -> Poincare -> act -> Klein; zk strictly inside the disk
            r2 = zk.real ** 2 + zk.imag ** 2
            zp = zk / (1 + mp.sqrt(1 - r2))
            return _poincare_to_klein(_mobius_apply(M, zp))

        # one period window of each axis in hyperbolic coordinates, centred
        # at the axis point nearest the origin so tile walks start close to
        # the base tile
        q0 = fu.chord_point(fu.t_of_s(fu.s_of_t(fu.foot_param()) + mp.mpf("0.0131719")))
        s0u = fu.s_of_point(q0)
        s1u = fu.s_of_point(act(Mu, q0))
        if s1u < s0u:
            s0u, s1u = s1u, s0u
        band_u = walker.axis_tiles(au, s0u, s1u)
        r0 = fv.chord_point(fv.t_of_s(fv.s_of_t(fv.foot_param()) + mp.mpf("0.0131719")))
        s0v = fv.s_of_point(r0)
        s1v = fv.s_of_point(act(Mv, r0))
        if s1v < s0v:
            s0v, s1v = s1v, s0v
        band_v = walker.axis_tiles(av, s0v, s1v)

        # candidates h = t_u * t_v^-1; every translate h<v> of the v-axis
        # crossing the chosen u-period shares a tile with both bands.  A
        # float prefilter clusters candidates by translated axis endpoints
        # and drops clearly unlinked ones; survivors are re-verified at
        # working precision.
        uend = (au.attracting, au.repelling)
        import numpy as np

        def to_np(M):
            Mn = _norm_mat(M)
            return [complex(Mn[0]), complex(Mn[1]), complex(Mn[2]), complex(Mn[3])]

        A_arr = np.array([to_np(Mt) for _, Mt in band_u], dtype=complex).reshape(-1, 2, 2)
        B_arr = np.array([to_np(_mat_inv(_norm_mat(Mt))) for _, Mt in band_v], dtype=complex).reshape(-1, 2, 2)
        H = np.einsum("aij,bjk->abik", A_arr, B_arr).reshape(-1, 2, 2)
        ev1, ev2 = complex(av.attracting), complex(av.repelling)
        with np.errstate(divide="ignore", invalid="ignore"):
            f1 = np.angle((H[:, 0, 0] * ev1 + H[:, 0, 1]) / (H[:, 1, 0] * ev1 + H[:, 1, 1]))
            f2 = np.angle((H[:, 0, 0] * ev2 + H[:, 0, 1]) / (H[:, 1, 0] * ev2 + H[:, 1, 1]))
        u1 = float(mp.arg(uend[0]))
        u2 = float(mp.arg(uend[1]))
        tau = 2.0 * np.pi
        arc = np.mod(u2 - u1, tau)
        g1 = np.mod(f1 - u1, tau) < arc
        g2 = np.mod(f2 - u1, tau) < arc
        margin = 1e-6

        def near(x, y):
            d = np.mod(x - y, tau)
            return np.minimum(d, tau - d) < margin

        close = near(f1, u1) | near(f1, u2) | near(f2, u1) | near(f2, u2)
        close |= ~np.isfinite(f1) | ~np.isfinite(f2)
        idxs = np.nonzero((g1 != g2) | close)[0]
        clusters: Dict[Tuple[int, int], int] = {}
        for i in idxs:
            lo, hi = (f1[i], f2[i]) if f1[i] <= f2[i] else (f2[i], f1[i])
            key = (int(round(lo * 1e10)), int(round(hi * 1e10)))
            if key not in clusters:
                clusters[key] = int(i)

        nb = len(band_v)
        crossings = []  # (s along u-axis in [s0u, s1u), endpoint angle pair)
        Mu_inv = _mat_inv(Mu)
        span = s1u - s0u
        for flat in clusters.values():
            iu, iv = flat // nb, flat % nb
            Mh = _mat_mul(_norm_mat(band_u[iu][1]), _mat_inv(_norm_mat(band_v[iv][1])))
            e1 = _mobius_apply(Mh, av.attracting)
            e2 = _mobius_apply(Mh, av.repelling)
            e1 /= abs(e1)
            e2 /= abs(e2)
            link = _angles_link(uend, (e1, e2), eps)
            if link is None:
                raise PrecisionError("ambiguous linking test")
            if not link:
                continue

            def crossing_s(p1, p2):
                E1, E2 = _poincare_to_klein(p1), _poincare_to_klein(p2)
                sa = fu.side(E1)
                sb = fu.side(E2)
                if abs(sa - sb) < eps * eps:
                    raise PrecisionError("degenerate crossing")
                X = E1 + (sa / (sa - sb)) * (E2 - E1)
                return fu.s_of_point(X)

            pair = (e1, e2)
            sc = crossing_s(*pair)
            guard = 0
            tol = mp.mpf("1e-9") * max(1, span)
            while sc >= s1u - tol or sc < s0u - tol:
                shift = Mu_inv if sc >= s1u - tol else Mu
                pair = (_mobius_apply(shift, pair[0]), _mobius_apply(shift, pair[1]))
                pair = (pair[0] / abs(pair[0]), pair[1] / abs(pair[1]))
                sc = crossing_s(*pair)
                guard += 1
                if guard > 200:
                    raise PrecisionError("period normalization loop")
            key_pts = sorted([mp.arg(pair[0]), mp.arg(pair[1])])
            crossings.append((sc, key_pts))

        # dedupe by endpoint pair (distinct translates have distinct axes)
        uniq: List = []
        dup_tol = mp.mpf(10) ** (-(2 * dps) // 3)
        amb_tol = mp.mpf(10) ** (-dps // 4)
        for t, kp in crossings:
            dup = False
            for t2, kp2 in uniq:
                d = max(
                    min(abs(kp[i] - kp2[i]), 2 * mp.pi - abs(kp[i] - kp2[i]))
                    for i in range(2)
                )
                if d < dup_tol:
                    dup = True
                    break
                if d < amb_tol:
                    raise PrecisionError("ambiguous crossing dedupe")
            if not dup:
                uniq.append((t, kp))
        return len(uniq)


def cutting_sequence(genus: int, w: GroupWord, dps: int = 40) -> List[Tuple[int, float]]:
    """Sides crossed by one period of the geodesic of w, with side positions.

    Returns a list of (side index, position in (0,1)) in traversal order;
    positions are approximate but their relative order along each side is
    exact enough to build an embedded PL drawing of the class.  Retries with
    conjugated words if the geodesic passes too close to a vertex.
    """
    cw = CyclicWord.of(w)
    if not cw.letters:
        raise ValueError("trivial class has no geodesic")
    conjugators: List[Letters] = [(), (1,), (2,), (1, 2), (3,), (2, -3)]
    last: Optional[Exception] = None
    for conj in conjugators:
        letters = free_reduce(conj + cw.letters + tuple(-x for x in reversed(conj)))
        try:
            return _cutting_core(genus, letters, dps)
        except PrecisionError as exc:
            last = exc
    raise last  # type: ignore[misc]


def _cutting_core(genus: int, letters: Letters, dps: int, resolve_left: bool = True) -> List[Tuple[int, float]]:
    """One period of the axis of `letters`, resolved to an embedded curve.

    The geodesic may pass through tessellation vertices or run along whole
    edges (symmetric classes do); the emitted sequence is the cutting
    sequence of the curve offset slightly to one side, which is isotopic to
    the geodesic.  Offsets round each vertex through the fan of incident
    sides on the chosen side.
    """
    fm = _model(genus, dps)
    with mp.workdps(dps):
        eps = mp.mpf(10) ** (-dps // 2)
        zero_tol = mp.mpf(10) ** (-(3 * dps) // 4)
        walker = _Walker(fm, eps)
        M = fm.word_matrix(letters)
        A = _Axis(*_fixed_points(M, eps))
        frame = _AxisFrame(A)
        n = fm.poly.n
        sgn = 1 if resolve_left else -1

        def act(Mm, zk):
            r2 = zk.real ** 2 + zk.imag ** 2
            zp = zk / (1 + mp.sqrt(1 - r2))
            return _poincare_to_klein(_mobius_apply(Mm, zp))

        q0 = frame.chord_point(frame.t_of_s(frame.s_of_t(frame.foot_param()) + mp.mpf("0.0131719")))
        s0 = frame.s_of_point(q0)
        s1 = frame.s_of_point(act(M, q0))
        if s1 < s0:
            s0, s1 = s1, s0
            q0 = frame.chord_point(frame.t_of_s(s0))
        # locate the offset point so corridor starts sit in the resolved tile
        dvec = frame.Qk - frame.Pk
        dlen = mp.sqrt(dvec.real ** 2 + dvec.imag ** 2)
        normal = mp.mpc(-dvec.imag, dvec.real) / dlen * sgn
        word, Mt = walker.locate(q0 + normal * mp.mpf(10) ** (-8))
        out: List[Tuple[int, float]] = []
        s_cur = s0
        tol = (s1 - s0) * mp.mpf("1e-9")
        corner_pass = 0

        def tile_events(Mtile):
            """Next forward event: ('cross', s, k, frac) or ('vertex', s, cidx, entry)."""
            corners = walker.tile_corners(Mtile)
            vals = [frame.side(c) for c in corners]
            best = None
            for k in range(n):
                sa, sb = vals[k], vals[(k + 1) % n]
                za, zb = abs(sa) <= zero_tol, abs(sb) <= zero_tol
                if za and zb:
                    # the axis runs along this edge; event at its far corner
                    for cidx in (k, (k + 1) % n):
                        sc = frame.s_of_point(corners[cidx])
                        if sc > s_cur + tol and (best is None or sc < best[1]):
                            best = ("vertex", sc, cidx, k)
                    continue
                if za or zb:
                    cidx = k if za else (k + 1) % n
                    sc = frame.s_of_point(corners[cidx])
                    if sc > s_cur + tol and (best is None or sc < best[1]):
                        best = ("vertex", sc, cidx, None)
                    continue
                if (sa > 0) == (sb > 0):
                    continue
                frac = sa / (sa - sb)
                X = corners[k] + frac * (corners[(k + 1) % n] - corners[k])
                t = frame.param(X)
                if not (0 < t < 1):
                    continue
                sc = frame.s_of_t(t)
                if sc > s_cur + tol and (best is None or sc < best[1]):
                    best = ("cross", sc, k, frac)
            return best

        def dir_into_cone(Mtile, cidx):
            """Does the forward axis direction point into the tile corner cone?"""
            corners = walker.tile_corners(Mtile)
            for side_idx in (cidx, (cidx - 1) % n):
                a, b = corners[side_idx], corners[(side_idx + 1) % n]
                cr = (b.real - a.real) * dvec.imag - (b.imag - a.imag) * dvec.real
                if cr <= zero_tol:
                    return False
            return True

        guard = 0
        while s_cur < s1 - tol:
            guard += 1
            if guard > 100000:
                raise PrecisionError("cutting walk did not terminate")
            ev = tile_events(Mt)
            if ev is None:
                raise PrecisionError("no forward event found")
            if ev[0] == "cross":
                _, sc, k, frac = ev
                if sc < s1 - tol:
                    out.append((k, float(frac)))
                word = _canon_word(fm.genus, word + fm.poly.jump[k])
                Mt = _mat_mul(Mt, fm.jump_mats[k])
                s_cur = sc
                continue

            _, sc, cidx, entry = ev
            emit = sc < s1 - tol
            corner_pass += 1
            kappa = mp.mpf(corner_pass) / mp.mpf(10) ** 6
            fan_guard = 0
            while True:
                fan_guard += 1
                if fan_guard > n + 2:
                    raise PrecisionError("vertex fan did not close")
                corners = walker.tile_corners(Mt)
                side_a = (cidx - 1) % n  # ends at the vertex
                side_b = cidx            # starts at the vertex
                if entry is None:
                    va = frame.side(corners[side_a])
                    vb = frame.side(corners[(cidx + 1) % n])
                    if abs(va) <= zero_tol or abs(vb) <= zero_tol:
                        # arrival ray along an edge; do not cross that edge
                        entry = side_a if abs(va) <= zero_tol else side_b
                        continue
                    X = side_a if (va > 0) == (sgn > 0) else side_b
                else:
                    X = side_a if entry == side_b else side_b
                # corridor continuation: the next side lies on the axis
                far = corners[side_a] if X == side_a else corners[(cidx + 1) % n]
                if abs(frame.side(far)) <= zero_tol:
                    fs = frame.s_of_point(far)
                    if fs > sc + tol:
                        # stay in this tile; the corridor runs to its far end
                        s_cur = sc
                        break
                # generic resumption: axis continues into this tile interior
                if dir_into_cone(Mt, cidx) and (fan_guard > 1 or entry is not None):
                    s_cur = sc
                    break
                if emit:
                    fr = kappa if X == cidx else 1 - kappa
                    out.append((X, float(fr)))
                word = _canon_word(fm.genus, word + fm.poly.jump[X])
                Mt = _mat_mul(Mt, fm.jump_mats[X])
                px = fm.poly.partner[X]
                cidx = (px + 1) % n if X == cidx else px
                entry = px
        return out
def embedded_drawing(genus: int, w: GroupWord, dps: int = 40):
    """An embedded PL drawing of the simple class of w in the polygon model.

    The geodesic cutting sequence fixes the side sequence and the order of
    interior strands along each side.  Strands introduced by vertex
    resolution sit in tiny corner windows whose mutual order the walk cannot
    see, so those orders are searched; the exact self-intersection check
    decides.  Raises if no embedded assignment exists (class not simple).
    """
    from fractions import Fraction
    from itertools import permutations, product as iproduct

    from .polygon import Crossing, PLPath, path_intersections
    from .words import is_conjugate

    poly = polygon_model(genus)
    last_exc: Optional[Exception] = None
    for resolve_left in (True, False):
        try:
            seq = _cutting_core(genus, CyclicWord.of(w).letters, dps, resolve_left)
        except PrecisionError as exc:
            last_exc = exc
            continue
        if not seq:
            raise ValueError("empty cutting sequence")
        CORNER = 1e-4
        # bucket events per side pair; corner events keep which end they hug
        groups: Dict[int, Dict[str, list]] = {}
        for idx, (side, frac) in enumerate(seq):
            pair = min(side, poly.partner[side])
            mirrored = side != pair
            pos = frac if not mirrored else 1.0 - frac
            g = groups.setdefault(pair, {"lo": [], "mid": [], "hi": []})
            if pos < CORNER:
                g["lo"].append((pos, idx, mirrored))
            elif pos > 1 - CORNER:
                g["hi"].append((pos, idx, mirrored))
            else:
                g["mid"].append((pos, idx, mirrored))
        for g in groups.values():
            g["mid"].sort()
            for rank in range(len(g["mid"]) - 1):
                if g["mid"][rank + 1][0] - g["mid"][rank][0] < 1e-9:
                    raise PrecisionError("cutting positions too close to order")
        # search corner-strand orders; interior strand order is fixed
        corner_keys = [(pair, endk) for pair, g in groups.items() for endk in ("lo", "hi") if len(g[endk]) > 1]
        perm_spaces = [list(permutations(range(len(groups[pair][endk])))) for pair, endk in corner_keys]
        tries = 0
        for combo in iproduct(*perm_spaces) if perm_spaces else [()]:
            tries += 1
            if tries > 20000:
                break
            params: Dict[int, Fraction] = {}
            for pair, g in groups.items():
                ordering = []
                for endk in ("lo", "mid", "hi"):
                    evs = list(g[endk])
                    for ci, (pk, ek) in enumerate(corner_keys):
                        if pk == pair and ek == endk:
                            evs = [g[endk][j] for j in combo[ci]]
                    ordering.extend(evs)
                N = len(ordering)
                for rank, (_pos, idx, mirrored) in enumerate(ordering):
                    t = Fraction(rank + 1, N + 1)
                    params[idx] = (1 - t) if mirrored else t
            crossings = [Crossing(side, params[idx]) for idx, (side, _f) in enumerate(seq)]
            try:
                path = PLPath(poly, crossings, cyclic=True)
                if path_intersections(path, path):
                    continue
            except ValueError:
                continue
            drawn = path.word()
            if not (is_conjugate(drawn, w) or is_conjugate(drawn, w.inverse())):
                raise AssertionError("drawing class mismatch")
            return path
        last_exc = ValueError("drawing self-intersects; class is not simple?")
    raise last_exc  # type: ignore[misc]
