"""
Complex Service - structural validation of cell complexes
Cycles, skeleton classification, vortex cycles, vortex nerves and 2-holes
"""
import logging
import math
from collections import Counter
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Union

import shapely

from config import EPS_GEO, EPS_AREA
from models import (
    CellComplex, Cycle, ErrorCode, Hole, Skeleton, SkeletonKind, ValidationReport,
    Vertex, VortexCycle, VortexError, VortexNerve
)
from services.geometry_service import GeometryService

logger = logging.getLogger(__name__)

_HOLE_KINDS = (SkeletonKind.K1_5, SkeletonKind.CYCLE)


def _violation(code: ErrorCode) -> str:
    return code.value.lower().replace('_', '-')


class ComplexService:
    """Service to validate and assemble cells of a planar complex"""

    @staticmethod
    def validate_cycle(c: Cycle, ctx: Optional[CellComplex] = None) -> ValidationReport:
        """
        Check the 1-cycle invariants.

        Args:
            c: Cycle to check
            ctx: Owning complex; when given every vertex must resolve in it

        Returns:
            ValidationReport listing each violated invariant

        Raises:
            VortexError(UNRESOLVED_VERTEX) when a vertex id is missing from ctx
        """
        if ctx is not None:
            missing = [v.id for v in c.vertices if ctx.vertex(v.id) is None]
            if missing:
                raise VortexError(
                    ErrorCode.UNRESOLVED_VERTEX,
                    f"cycle {c.id} references unknown vertices",
                    {'cycle': c.id, 'vertices': missing}
                )

        violations = []
        coords = c.coords
        if not all(math.isfinite(x) and math.isfinite(y) for x, y in coords):
            violations.append('non-finite-coordinate')
            return ValidationReport(c.id, 'cycle', False, tuple(violations))
        if len(coords) < 3:
            violations.append('too-few-vertices')
        if len(set(c.vertex_ids)) != len(c.vertex_ids) or len(set(coords)) != len(coords):
            violations.append('repeated-vertex')

        n = len(coords)
        segments = [(coords[i], coords[(i + 1) % n]) for i in range(n)]
        if any(a == b for a, b in segments):
            violations.append('degenerate-edge')
        elif n >= 3 and ComplexService._self_intersects(segments):
            violations.append('self-intersection')

        if n >= 3 and abs(GeometryService.shoelace_area(coords)) <= EPS_AREA:
            violations.append('zero-area')

        ok = not violations
        logger.debug(f"Cycle {c.id}: {'OK' if ok else violations}")
        return ValidationReport(c.id, 'cycle', ok, tuple(violations))

    @staticmethod
    def _self_intersects(segments) -> bool:
        n = len(segments)
        for i in range(n):
            for j in range(i + 1, n):
                (p1, p2), (q1, q2) = segments[i], segments[j]
                adjacent = j == i + 1 or (i == 0 and j == n - 1)
                if adjacent:
                    if n == 3:
                        continue
                    # Adjacent edges may only share their common endpoint
                    shared = p2 if j == i + 1 else p1
                    far_p = p1 if shared == p2 else p2
                    far_q = q2 if shared == q1 else q1
                    if GeometryService.orient2d(p1, p2, far_q) == 0 and \
                            GeometryService.on_segment(p1, p2, far_q):
                        return True
                    if GeometryService.orient2d(q1, q2, far_p) == 0 and \
                            GeometryService.on_segment(q1, q2, far_p):
                        return True
                    continue
                if GeometryService.segments_intersect(p1, p2, q1, q2):
                    return True
        return False

    @staticmethod
    def _check_holes(holes: Sequence[Hole], owner: str):
        """Holes must be valid and pairwise disjoint (no nesting, no overlap)"""
        for h in holes:
            if not ComplexService.validate_cycle(h.boundary).ok:
                raise VortexError(ErrorCode.MALFORMED, f"hole {h.id} has an invalid boundary",
                                  {'owner': owner, 'hole': h.id})
        for h1, h2 in combinations(holes, 2):
            p1 = GeometryService.polygon(h1.boundary)
            p2 = GeometryService.polygon(h2.boundary)
            if p1.distance(p2) <= EPS_GEO:
                raise VortexError(ErrorCode.MALFORMED, f"holes {h1.id} and {h2.id} overlap or nest",
                                  {'owner': owner, 'holes': [h1.id, h2.id]})

    @staticmethod
    def _strictly_inside(hole: Hole, outer_coords) -> bool:
        outer = shapely.Polygon(outer_coords)
        inner = GeometryService.polygon(hole.boundary)
        return outer.contains(inner) and outer.exterior.distance(inner) > EPS_GEO

    @staticmethod
    def classify_skeleton(s: Skeleton) -> SkeletonKind:
        """Classify a skeleton as K0/K1/K2/K1_5/CYCLE/VORTEX/NERVE"""
        cells = s.payload
        if not cells:
            raise VortexError(ErrorCode.MALFORMED, f"skeleton {s.id} has an empty payload", {'skeleton': s.id})

        if all(isinstance(cell, Vertex) for cell in cells):
            if len(set(v.id for v in cells)) != len(cells) or len(set(v.position for v in cells)) != len(cells):
                raise VortexError(ErrorCode.MALFORMED, f"skeleton {s.id} repeats a vertex", {'skeleton': s.id})
            if len(cells) in (1, 2):
                if s.holes:
                    raise VortexError(ErrorCode.MALFORMED, f"skeleton {s.id} cannot carry holes",
                                      {'skeleton': s.id})
                return SkeletonKind.K0 if len(cells) == 1 else SkeletonKind.K1
            if len(cells) != 3:
                raise VortexError(ErrorCode.MALFORMED, f"skeleton {s.id} payload matches no kind",
                                  {'skeleton': s.id, 'vertices': len(cells)})
            coords = [v.position for v in cells]
            if abs(GeometryService.shoelace_area(coords)) <= EPS_AREA:
                raise VortexError(ErrorCode.MALFORMED, f"skeleton {s.id} is a degenerate triangle",
                                  {'skeleton': s.id})
            if not s.holes:
                return SkeletonKind.K2
            ComplexService._check_holes(s.holes, s.id)
            for h in s.holes:
                if not ComplexService._strictly_inside(h, coords):
                    raise VortexError(ErrorCode.MALFORMED, f"hole {h.id} is not strictly inside {s.id}",
                                      {'skeleton': s.id, 'hole': h.id})
            return SkeletonKind.K1_5

        if len(cells) != 1:
            raise VortexError(ErrorCode.MALFORMED, f"skeleton {s.id} payload matches no kind", {'skeleton': s.id})

        cell = cells[0]
        if isinstance(cell, Cycle):
            if s.holes:
                ComplexService._check_holes(s.holes, s.id)
                for h in s.holes:
                    if not ComplexService._strictly_inside(h, cell.coords):
                        raise VortexError(ErrorCode.MALFORMED, f"hole {h.id} is not inside cycle {cell.id}",
                                          {'skeleton': s.id, 'hole': h.id})
            return SkeletonKind.CYCLE
        if s.holes:
            raise VortexError(ErrorCode.MALFORMED, f"skeleton {s.id} cannot carry holes", {'skeleton': s.id})
        if isinstance(cell, VortexNerve):
            return SkeletonKind.NERVE
        if isinstance(cell, VortexCycle):
            return SkeletonKind.VORTEX
        raise VortexError(ErrorCode.MALFORMED, f"skeleton {s.id} payload matches no kind", {'skeleton': s.id})

    @staticmethod
    def build_vortex_cycle(cycles: Sequence[Cycle], holes: Sequence[Hole] = (),
                           ctx: Optional[CellComplex] = None,
                           vortex_id: Optional[str] = None) -> VortexCycle:
        """
        Assemble a vortex cycle from member cycles and holes.

        Raises:
            VortexError: TOO_FEW_CYCLES, MALFORMED, CONCENTRIC, HOLE_OUTSIDE, NO_SHARED_INTERIOR
        """
        cycles = tuple(cycles)
        holes = tuple(holes)
        vortex_id = vortex_id or 'vcyc(' + '+'.join(c.id for c in cycles) + ')'
        if len(cycles) < 2:
            raise VortexError(ErrorCode.TOO_FEW_CYCLES, f"{vortex_id} needs at least 2 cycles",
                              {'vortex': vortex_id, 'cycles': len(cycles)})

        for c in cycles:
            report = ComplexService.validate_cycle(c, ctx)
            if not report.ok:
                raise VortexError(ErrorCode.MALFORMED, f"cycle {c.id} is invalid",
                                  {'vortex': vortex_id, 'cycle': c.id, 'violations': list(report.violations)})

        for c1, c2 in combinations(cycles, 2):
            (x1, y1), (x2, y2) = GeometryService.centroid(c1), GeometryService.centroid(c2)
            if math.hypot(x1 - x2, y1 - y2) <= EPS_GEO:
                raise VortexError(ErrorCode.CONCENTRIC, f"cycles {c1.id} and {c2.id} are concentric",
                                  {'vortex': vortex_id, 'cycles': [c1.id, c2.id]})

        polygons = [GeometryService.polygon(c) for c in cycles]
        ComplexService._check_holes(holes, vortex_id)
        body = shapely.union_all(polygons)
        for h in holes:
            if GeometryService.polygon(h.boundary).difference(body).area > EPS_AREA:
                raise VortexError(ErrorCode.HOLE_OUTSIDE, f"hole {h.id} lies outside {vortex_id}",
                                  {'vortex': vortex_id, 'hole': h.id})

        shared = shapely.intersection_all(polygons)
        if holes:
            shared = shared.difference(shapely.union_all([GeometryService.polygon(h.boundary) for h in holes]))
        if shared.area <= EPS_AREA:
            raise VortexError(ErrorCode.NO_SHARED_INTERIOR, f"cycles of {vortex_id} share no interior",
                              {'vortex': vortex_id})

        return VortexCycle(id=vortex_id, cycles=cycles, holes=holes)

    @staticmethod
    def detect_nerve(v: VortexCycle, nerve_id: Optional[str] = None) -> Optional[VortexNerve]:
        """Return the vortex nerve of v when every pair of member cycles intersects"""
        for c1, c2 in combinations(v.cycles, 2):
            if not GeometryService.set_intersection_nonempty(c1, c2):
                logger.debug(f"{v.id}: cycles {c1.id} and {c2.id} are disjoint")
                return None
        return VortexNerve(id=nerve_id or f"vNrv({v.id})", underlying=v)

    @staticmethod
    def hole_destroys_cycle(c: Cycle, holes: Sequence[Hole]) -> bool:
        """True iff the holes leave no interior of c"""
        region = GeometryService.polygon(c)
        for h in holes:
            if GeometryService.polygon(h.boundary).difference(region).area > EPS_AREA:
                raise VortexError(ErrorCode.HOLE_OUTSIDE, f"hole {h.id} is not inside cycle {c.id}",
                                  {'cycle': c.id, 'hole': h.id})
        if not holes:
            return region.area <= EPS_AREA
        covered = shapely.union_all([GeometryService.polygon(h.boundary) for h in holes])
        return region.difference(covered).area <= EPS_AREA

    @staticmethod
    def hole_diameter(h: Hole) -> float:
        return GeometryService.diameter(h.boundary)

    @staticmethod
    def hole_report(ctx: CellComplex) -> List[Dict[str, Any]]:
        """Per hole: its diameter and, for every cycle containing it, whether it destroys that cycle"""
        valid = [c for c in ctx.cycles
                 if c.id not in ctx.hole_boundary_ids and ComplexService.validate_cycle(c).ok]
        entries = []
        for h in ctx.holes:
            inside = GeometryService.polygon(h.boundary)
            candidates = valid if ComplexService.validate_cycle(h.boundary).ok else []
            cycles = [
                {'cycle': c.id, 'destroyed': ComplexService.hole_destroys_cycle(c, (h,))}
                for c in candidates
                if inside.difference(GeometryService.polygon(c)).area <= EPS_AREA
            ]
            entries.append({'hole': h.id, 'diameter': ComplexService.hole_diameter(h), 'cycles': cycles})
        return entries

    @staticmethod
    def is_planar_shape(target: Union[Skeleton, Cycle, VortexCycle]) -> bool:
        """Simple closed boundary with nonempty interior after subtracting holes"""
        try:
            if isinstance(target, Cycle):
                return ComplexService.validate_cycle(target).ok
            if isinstance(target, (VortexCycle, VortexNerve)):
                ComplexService.build_vortex_cycle(target.cycles, target.holes, vortex_id=target.id)
                return True
            kind = ComplexService.classify_skeleton(target)
        except VortexError:
            return False
        if kind in (SkeletonKind.K0, SkeletonKind.K1):
            return True
        if kind == SkeletonKind.CYCLE and not ComplexService.validate_cycle(target.payload[0]).ok:
            return False
        if kind in (SkeletonKind.VORTEX, SkeletonKind.NERVE):
            return ComplexService.is_planar_shape(target.payload[0])
        return GeometryService.filled_region(target).area > EPS_AREA

    @staticmethod
    def validate_complex(ctx: CellComplex) -> List[ValidationReport]:
        """Run every structural check over a complex, one report per entity"""
        reports: List[ValidationReport] = []

        vertex_counts = Counter(v.id for v in ctx.vertices)
        for v in ctx.vertices:
            violations = []
            if not (math.isfinite(v.x) and math.isfinite(v.y)):
                violations.append('non-finite-coordinate')
            if vertex_counts[v.id] > 1:
                violations.append('duplicate-id')
            reports.append(ValidationReport(v.id, 'vertex', not violations, tuple(violations)))

        for e in ctx.edges:
            violations = []
            if e.source == e.target:
                violations.append('degenerate-edge')
            if ctx.vertex(e.source) is None or ctx.vertex(e.target) is None:
                violations.append('unresolved-vertex')
            reports.append(ValidationReport(f"{e.source}->{e.target}", 'edge', not violations, tuple(violations)))

        entity_counts = Counter(
            x.id for group in (ctx.cycles, ctx.holes, ctx.skeletons, ctx.vortex_cycles, ctx.vortex_nerves)
            for x in group
        )

        def _report(entity_id: str, kind: str, violations: List[str]) -> ValidationReport:
            if entity_counts[entity_id] > 1:
                violations = violations + ['duplicate-id']
            return ValidationReport(entity_id, kind, not violations, tuple(violations))

        for c in ctx.cycles:
            try:
                report = ComplexService.validate_cycle(c, ctx)
                reports.append(_report(c.id, 'cycle', list(report.violations)))
            except VortexError as e:
                reports.append(_report(c.id, 'cycle', [_violation(e.code)]))

        for h in ctx.holes:
            violations = []
            if not ComplexService.validate_cycle(h.boundary).ok:
                violations.append('invalid-boundary')
            reports.append(_report(h.id, 'hole', violations))

        for s in ctx.skeletons:
            violations = []
            try:
                kind = ComplexService.classify_skeleton(s)
                if s.kind is not None and s.kind != kind:
                    violations.append(f"kind-mismatch: declared {s.kind.value}, classified {kind.value}")
            except VortexError as e:
                violations.append(_violation(e.code))
            reports.append(_report(s.id, 'skeleton', violations))

        for vc in ctx.vortex_cycles:
            violations = []
            try:
                ComplexService.build_vortex_cycle(vc.cycles, vc.holes, ctx, vortex_id=vc.id)
            except VortexError as e:
                violations.append(_violation(e.code))
            reports.append(_report(vc.id, 'vortex_cycle', violations))

        for nerve in ctx.vortex_nerves:
            violations = []
            try:
                ComplexService.build_vortex_cycle(nerve.cycles, nerve.holes, ctx, vortex_id=nerve.underlying.id)
                if ComplexService.detect_nerve(nerve.underlying) is None:
                    violations.append('not-a-nerve')
            except VortexError as e:
                violations.append(_violation(e.code))
            reports.append(_report(nerve.id, 'vortex_nerve', violations))

        failed = sum(1 for r in reports if not r.ok)
        logger.info(f"Validated {ctx.id}: {len(reports)} entities, {failed} failed")
        return reports
