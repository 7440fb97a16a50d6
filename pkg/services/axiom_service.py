"""
Axiom Service - randomized checking of the proximity axioms
Samples subset triples of a complex's elements and verifies every axiom instance
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import shapely

from config import DEFAULT_SAMPLES, DEFAULT_SEED, EPS_GEO, MAX_SUBSET_SIZE
from models import (
    AxiomCounterexample, AxiomReport, CellComplex, ErrorCode, MatchPolicy, VortexCycle,
    VortexError, VortexNerve
)
from services.descriptor_service import DescriptorService
from services.geometry_service import GeometryService
from services.proximity_service import DEFAULT_POLICY, Element, ProximityService

logger = logging.getLogger(__name__)

SPOT_CHECKS = 5

AXIOMS = (
    'cech.far-from-empty', 'cech.symmetry', 'cech.union', 'cech.intersection',
    'smirnov.monotone', 'smirnov.intersecting-close', 'smirnov.empty-far',
    'conn.far-from-empty', 'conn.symmetry', 'conn.union', 'conn.intersection-iff', 'conn.implies-intersection',
    'sconn.disjoint-far', 'sconn.symmetry', 'sconn.union', 'sconn.weak-overlap', 'sconn.strong-overlap',
    'dsconn.dcap-empty-iff-far', 'dsconn.symmetry', 'dsconn.union', 'dsconn.weak', 'dsconn.strong',
    'relator.sconn-implies-filled-meet', 'relator.shared-sconn-implies-dsconn',
    'nerve.shared-sconn-implies-dsconn', 'nerve.shared-cycle-in-dcap', 'nerve.shared-cycle-implies-dsconn',
    'tables.consistent',
)


def universe_elements(ctx: CellComplex) -> Tuple[Element, ...]:
    """Skeletons when the complex registers any, else its nerves and vortex cycles, else its cycles"""
    if ctx.skeletons:
        return ctx.skeletons
    if ctx.vortex_nerves or ctx.vortex_cycles:
        return ctx.vortex_nerves + ctx.vortex_cycles
    return tuple(c for c in ctx.cycles if c.id not in ctx.hole_boundary_ids)


def member_cycles(element: Element):
    """Member 1-cycles of a vortex-bearing element, empty for plain skeletons"""
    if isinstance(element, (VortexCycle, VortexNerve)):
        return element.cycles
    payload = getattr(element, 'payload', ())
    if len(payload) == 1 and isinstance(payload[0], (VortexCycle, VortexNerve)):
        return payload[0].cycles
    return ()


def _orient(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])


def _point_segment_distances(points: np.ndarray, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """(k, m) distances from k points to m closed segments"""
    d = ends - starts
    length2 = (d ** 2).sum(axis=1)
    rel = points[:, None, :] - starts[None, :, :]
    t = np.where(length2 > 0, (rel * d[None]).sum(axis=-1) / np.where(length2 > 0, length2, 1.0), 0.0)
    closest = starts[None] + np.clip(t, 0.0, 1.0)[..., None] * d[None]
    return np.linalg.norm(points[:, None, :] - closest, axis=-1)


class _Boundary:
    """Boundary segments, vertex ids, sample points and member regions of one element"""

    def __init__(self, element: Element):
        segments = GeometryService.boundary_segments(element)
        arr = np.asarray(segments, dtype=float).reshape(-1, 2, 2)
        self.starts, self.ends = arr[:, 0], arr[:, 1]
        self.points = np.unique(np.vstack([self.starts, self.ends]), axis=0)
        self.ids = GeometryService.vertex_ids(element)
        self.regions = GeometryService.regions(element)
        self.shapes = [GeometryService.region_geometry(r) for r in self.regions]

    def meets(self, other: '_Boundary', eps: float = EPS_GEO) -> bool:
        """Shared vertex id, a proper crossing, or an endpoint within eps of the other's segments"""
        if self.ids & other.ids:
            return True
        if len(self.starts) == 0 or len(other.starts) == 0:
            return False
        p1, p2 = self.starts[:, None], self.ends[:, None]
        q1, q2 = other.starts[None], other.ends[None]
        crossing = ((_orient(q1, q2, p1) * _orient(q1, q2, p2) < 0)
                    & (_orient(p1, p2, q1) * _orient(p1, p2, q2) < 0))
        if crossing.any():
            return True
        return bool(
            _point_segment_distances(self.points, other.starts, other.ends).min() <= eps
            or _point_segment_distances(other.points, self.starts, self.ends).min() <= eps
        )

    def reaches_into(self, other: '_Boundary') -> bool:
        """Some boundary point lies in a closed member region of the other element"""
        xs, ys = self.points[:, 0], self.points[:, 1]
        return any(bool(shapely.intersects_xy(shape, xs, ys).any()) for shape in other.shapes)

    def overlaps(self, other: '_Boundary') -> bool:
        return any(GeometryService.interiors_overlap(ra, rb) for ra in self.regions for rb in other.regions)


class _Tables:
    """
    Pairwise matrices over the universe.

    cech, conn, sconn and match come from the services under test; meet,
    overlap and filled are computed independently from boundary segments
    and member regions.
    """

    def __init__(self, elements: Sequence[Element], policy: MatchPolicy, ctx: CellComplex):
        n = len(elements)
        self.cech = np.zeros((n, n), dtype=bool)
        self.conn = np.zeros((n, n), dtype=bool)
        self.meet = np.zeros((n, n), dtype=bool)
        self.sconn = np.zeros((n, n), dtype=bool)
        self.overlap = np.zeros((n, n), dtype=bool)
        self.filled = np.zeros((n, n), dtype=bool)
        self.match = np.zeros((n, n), dtype=bool)

        boundaries = [_Boundary(e) for e in elements]
        features = [DescriptorService.describe(e, policy.probes, ctx) for e in elements]
        for i, a in enumerate(elements):
            for j, b in enumerate(elements):
                self.cech[i, j] = ProximityService.cech_near(a, b).near
                self.conn[i, j] = ProximityService.conn(a, b).near
                self.sconn[i, j] = ProximityService.sconn(a, b).near
                self.meet[i, j] = boundaries[i].meets(boundaries[j])
                self.overlap[i, j] = boundaries[i].overlaps(boundaries[j])
                self.filled[i, j] = (self.meet[i, j] or boundaries[i].reaches_into(boundaries[j])
                                     or boundaries[j].reaches_into(boundaries[i]))
                self.match[i, j] = DescriptorService.features_match(features[i], features[j], policy).verdict

    @staticmethod
    def near(matrix: np.ndarray, a: Sequence[int], b: Sequence[int]) -> bool:
        if len(a) == 0 or len(b) == 0:
            return False
        return bool(matrix[np.ix_(a, b)].any())

    def dcap(self, a: Sequence[int], b: Sequence[int]) -> List[int]:
        """Element-wise descriptive intersection from the match matrix"""
        union = sorted(set(a) | set(b))
        return [x for x in union if self.near(self.match, [x], a) and self.near(self.match, [x], b)]


class AxiomService:
    """Service to fuzz the proximity axioms over a finite universe"""

    @staticmethod
    def _sample_subset(rng: np.random.Generator, n: int) -> List[int]:
        k = int(rng.integers(1, min(MAX_SUBSET_SIZE, n) + 1))
        return sorted(int(i) for i in rng.choice(n, size=k, replace=False))

    @staticmethod
    def _applies_to_cycles(cycles, policy: MatchPolicy, ctx: CellComplex) -> bool:
        try:
            DescriptorService.describe(cycles[0], policy.probes, ctx)
        except VortexError as e:
            if e.code == ErrorCode.PROBE_INAPPLICABLE:
                return False
            raise
        return True

    @staticmethod
    def check_axioms(universe: CellComplex, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                     policy: Optional[MatchPolicy] = None) -> AxiomReport:
        """
        Draw random subset triples and check every axiom instance.

        Args:
            universe: Complex whose elements are sampled
            samples: Number of (A, B, C) triples
            seed: Seed; sample i uses the generator seeded with [seed, i]
            policy: Descriptive match policy (vertexCount, ANY by default)

        Returns:
            AxiomReport with per-axiom instance counts and counterexamples

        The nerve-level checks compare member 1-cycles and are skipped when
        the policy's probes do not apply to 1-cycles.
        """
        if samples < 1:
            raise VortexError(ErrorCode.MALFORMED, 'samples must be positive', {'samples': samples})
        policy = policy or DEFAULT_POLICY
        elements = universe_elements(universe)
        n = len(elements)
        counts: Dict[str, int] = {name: 0 for name in AXIOMS}
        found: List[AxiomCounterexample] = []

        if n == 0:
            logger.info(f"Axioms on {universe.id}: empty universe, nothing to check")
            return AxiomReport(universe.id, samples, seed, tuple(counts.items()))

        tables = _Tables(elements, policy, universe)
        ids = [e.id for e in elements]
        cycles = [member_cycles(e) for e in elements]
        sample_cycles = next((c for c in cycles if c), ())
        nerve_policy = policy if sample_cycles and AxiomService._applies_to_cycles(
            sample_cycles, policy, universe) else None

        for i in range(samples):
            rng = np.random.default_rng([seed, i])
            a = AxiomService._sample_subset(rng, n)
            b = AxiomService._sample_subset(rng, n)
            c = AxiomService._sample_subset(rng, n)

            def check(name: str, holds: bool, detail: str = ''):
                counts[name] += 1
                if not holds:
                    found.append(AxiomCounterexample(
                        axiom=name, sample=i, seed=seed,
                        a=tuple(ids[x] for x in a), b=tuple(ids[x] for x in b), c=tuple(ids[x] for x in c),
                        detail=detail
                    ))

            fa = [elements[x] for x in a]
            fb = [elements[x] for x in b]
            AxiomService._check_empty_arguments(fa, fb, check)
            AxiomService._check_point_set_axioms(tables, a, b, c, check)
            AxiomService._check_overlap_axioms(tables, a, b, c, check)
            AxiomService._check_descriptive_axioms(tables, a, b, c, check)
            AxiomService._check_relator_axioms(tables, a, b, check)
            if nerve_policy is not None:
                AxiomService._check_nerve_axioms(tables, elements, cycles, a, b, rng, nerve_policy,
                                                 universe, check)

            if i < SPOT_CHECKS:
                AxiomService._spot_check(tables, fa, fb, a, b, policy, universe, check)

        report = AxiomReport(universe.id, samples, seed, tuple(counts.items()), tuple(found))
        logger.info(f"Axioms on {universe.id}: {samples} samples, {len(found)} counterexamples")
        return report

    @staticmethod
    def _check_empty_arguments(fa, fb, check):
        """Direct calls with an empty side"""
        try:
            ProximityService.cech_near(fa, [])
            check('cech.far-from-empty', False, 'empty argument accepted')
        except VortexError as e:
            check('cech.far-from-empty', e.code == ErrorCode.EMPTY_ARGUMENT, e.code.value)
        check('conn.far-from-empty', not ProximityService.conn(fa, []).near)
        check('smirnov.empty-far', not ProximityService.conn([], fb).near and not ProximityService.sconn([], fb).near)

    @staticmethod
    def _check_point_set_axioms(t: _Tables, a, b, c, check):
        near = _Tables.near
        meets = near(t.meet, a, b)
        shared = bool(set(a) & set(b))
        bc = sorted(set(b) | set(c))

        cech_ab = near(t.cech, a, b)
        check('cech.symmetry', cech_ab == near(t.cech, b, a))
        check('cech.union', near(t.cech, a, bc) == (cech_ab or near(t.cech, a, c)))
        check('cech.intersection', not (shared or meets) or cech_ab)

        ab = near(t.conn, a, b)
        check('conn.symmetry', ab == near(t.conn, b, a))
        check('conn.union', near(t.conn, a, bc) == (ab or near(t.conn, a, c)))
        check('conn.intersection-iff', meets == ab)
        check('conn.implies-intersection', not ab or meets)

        # Monotonicity with A contained in A+B
        wider = sorted(set(a) | set(b))
        check('smirnov.monotone', not near(t.conn, a, c) or near(t.conn, wider, c))
        check('smirnov.monotone', not near(t.sconn, a, c) or near(t.sconn, wider, c))
        check('smirnov.intersecting-close', not meets or ab)

    @staticmethod
    def _check_overlap_axioms(t: _Tables, a, b, c, check):
        near = _Tables.near
        ab, ba = near(t.sconn, a, b), near(t.sconn, b, a)
        check('sconn.disjoint-far', near(t.filled, a, b) or not ab)
        check('sconn.symmetry', ab == ba)
        check('sconn.union', near(t.sconn, a, sorted(set(b) | set(c))) == (ab or near(t.sconn, a, c)))
        check('sconn.weak-overlap', not near(t.overlap, a, b) or ab)
        check('sconn.strong-overlap', not ab or near(t.overlap, a, b))

    @staticmethod
    def _check_descriptive_axioms(t: _Tables, a, b, c, check):
        near = _Tables.near
        ab, ba = near(t.match, a, b), near(t.match, b, a)
        dcap = t.dcap(a, b)
        check('dsconn.dcap-empty-iff-far', (not dcap) == (not ab))
        check('dsconn.symmetry', ab == ba)
        check('dsconn.union', near(t.match, a, sorted(set(b) | set(c))) == (ab or near(t.match, a, c)))
        check('dsconn.weak', not dcap or ab)
        check('dsconn.strong', not ab or bool(dcap))

    @staticmethod
    def _check_relator_axioms(t: _Tables, a, b, check):
        near = _Tables.near
        sconn = near(t.sconn, a, b)
        check('relator.sconn-implies-filled-meet', not sconn or near(t.filled, a, b))
        if set(a) & set(b):
            check('relator.shared-sconn-implies-dsconn', not sconn or near(t.match, a, b))

    @staticmethod
    def _check_nerve_axioms(t: _Tables, elements, cycles, a, b, rng, policy, ctx, check):
        """Shared-member readings on the member cycles of two vortex-bearing elements"""
        x, y = a[0], b[0]
        if not cycles[x] or not cycles[y]:
            return
        cx, cy = cycles[x], cycles[y]
        shared_ids = {cyc.id for cyc in cx} & {cyc.id for cyc in cy}
        if shared_ids and t.sconn[x, y]:
            check('nerve.shared-sconn-implies-dsconn', ProximityService.dsconn(cx, cy, policy, ctx).near,
                  f"{elements[x].id} / {elements[y].id}")

        planted = cy[int(rng.integers(0, len(cy)))]
        family_x = tuple(cx) + (planted,)
        dcap_ids = {cyc.id for cyc in ProximityService.descriptive_intersection(family_x, cy, policy, ctx)}
        check('nerve.shared-cycle-in-dcap', planted.id in dcap_ids, f"planted {planted.id}")
        check('nerve.shared-cycle-implies-dsconn', ProximityService.dsconn(family_x, cy, policy, ctx).near,
              f"planted {planted.id}")

    @staticmethod
    def _spot_check(t: _Tables, fa, fb, a, b, policy, ctx, check):
        """Direct set-level calls must agree with the tables"""
        near = _Tables.near
        agree = (
            ProximityService.cech_near(fa, fb).near == near(t.cech, a, b)
            and ProximityService.conn(fa, fb).near == near(t.conn, a, b)
            and ProximityService.sconn(fa, fb).near == near(t.sconn, a, b)
            and ProximityService.dsconn(fa, fb, policy, ctx).near == near(t.match, a, b)
            and len(ProximityService.descriptive_intersection(fa, fb, policy, ctx)) == len(t.dcap(a, b))
        )
        check('tables.consistent', agree)
