"""
Geometry Service - planar predicates and measures
Containment, boundary bands, areas, lengths, interior overlap and point-set incidence
"""
import logging
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import shapely
from shapely.geometry import LineString, LinearRing, Point as ShapelyPoint, Polygon
from shapely.geometry.base import BaseGeometry
from shapely.ops import nearest_points
from sklearn.metrics.pairwise import euclidean_distances

from config import EPS_GEO, EPS_AREA
from models import (
    Cycle, Hole, Point, Ball, ClosedRegion, PointLabel, Skeleton, Vertex,
    VortexCycle, VortexNerve
)

logger = logging.getLogger(__name__)

Entity = Union[Skeleton, Cycle, VortexCycle, VortexNerve]
Coord = Tuple[float, float]


@lru_cache(maxsize=4096)
def _polygon(cycle: Cycle) -> Polygon:
    return Polygon(cycle.coords)


@lru_cache(maxsize=4096)
def _ring(cycle: Cycle) -> LinearRing:
    return LinearRing(cycle.coords)


@lru_cache(maxsize=4096)
def _point_set_parts(entity: Entity) -> Tuple[BaseGeometry, ...]:
    parts: List[BaseGeometry] = []
    if isinstance(entity, Cycle):
        parts.append(_ring(entity))
    elif isinstance(entity, (VortexCycle, VortexNerve)):
        parts.extend(_ring(c) for c in entity.cycles)
        parts.extend(_ring(h.boundary) for h in entity.holes)
    else:
        cells = entity.payload
        if cells and all(isinstance(cell, Vertex) for cell in cells):
            coords = [cell.position for cell in cells]
            if len(coords) == 1:
                parts.append(ShapelyPoint(coords[0]))
            elif len(coords) == 2:
                parts.append(LineString(coords))
            else:
                parts.append(LinearRing(coords))
        else:
            for cell in cells:
                parts.extend(_point_set_parts(cell))
        parts.extend(_ring(h.boundary) for h in entity.holes)
    return tuple(parts)


@lru_cache(maxsize=4096)
def _filled(entity: Entity) -> BaseGeometry:
    if isinstance(entity, Cycle):
        return _polygon(entity)
    if isinstance(entity, (VortexCycle, VortexNerve)):
        body = shapely.union_all([_polygon(c) for c in entity.cycles])
        holes = [_polygon(h.boundary) for h in entity.holes]
    else:
        cells = entity.payload
        if cells and all(isinstance(cell, Vertex) for cell in cells):
            body = Polygon([cell.position for cell in cells]) if len(cells) >= 3 else Polygon()
        else:
            body = shapely.union_all([_filled(cell) for cell in cells])
        holes = [_polygon(h.boundary) for h in entity.holes]
    if holes:
        body = body.difference(shapely.union_all(holes))
    return body


class GeometryService:
    """Service for planar predicates over polygonal cells"""

    @staticmethod
    def orient2d(a: Coord, b: Coord, c: Coord) -> float:
        """Twice the signed area of triangle abc; positive when counter-clockwise"""
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    @staticmethod
    def on_segment(a: Coord, b: Coord, p: Coord) -> bool:
        """p collinear with ab lies within its bounding box"""
        return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))

    @staticmethod
    def segments_intersect(p1: Coord, p2: Coord, q1: Coord, q2: Coord) -> bool:
        """True if closed segments p1p2 and q1q2 share at least one point"""
        d1 = GeometryService.orient2d(q1, q2, p1)
        d2 = GeometryService.orient2d(q1, q2, p2)
        d3 = GeometryService.orient2d(p1, p2, q1)
        d4 = GeometryService.orient2d(p1, p2, q2)

        if ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4)):
            return True
        if d1 == 0 and GeometryService.on_segment(q1, q2, p1):
            return True
        if d2 == 0 and GeometryService.on_segment(q1, q2, p2):
            return True
        if d3 == 0 and GeometryService.on_segment(p1, p2, q1):
            return True
        if d4 == 0 and GeometryService.on_segment(p1, p2, q2):
            return True
        return False

    @staticmethod
    def shoelace_area(coords: Sequence[Coord]) -> float:
        """Signed shoelace area; positive for counter-clockwise vertex order"""
        arr = np.asarray(coords, dtype=float)
        if len(arr) < 3:
            return 0.0
        x, y = arr[:, 0], arr[:, 1]
        return float(0.5 * (np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))

    @staticmethod
    def polygon(cycle: Cycle) -> Polygon:
        return _polygon(cycle)

    @staticmethod
    def region_geometry(region: ClosedRegion) -> BaseGeometry:
        """Filled outer cycle with the holes removed"""
        body = _polygon(region.outer)
        if region.holes:
            body = body.difference(shapely.union_all([_polygon(h.boundary) for h in region.holes]))
        return body

    @staticmethod
    def point_location(p: Point, r: ClosedRegion, eps: float = EPS_GEO) -> PointLabel:
        """
        Locate a point relative to a closed region.

        The boundary band is the open ball of radius eps around every
        boundary segment of the outer cycle and of each hole.
        """
        band = Ball(center=p, radius=eps)
        probe = ShapelyPoint(band.center.x, band.center.y)
        rings = [_ring(r.outer)] + [_ring(h.boundary) for h in r.holes]
        if any(ring.distance(probe) <= band.radius for ring in rings):
            return PointLabel.BOUNDARY
        if not _polygon(r.outer).contains(probe):
            return PointLabel.EXTERIOR
        if any(_polygon(h.boundary).contains(probe) for h in r.holes):
            return PointLabel.EXTERIOR
        return PointLabel.INTERIOR

    @staticmethod
    def area(r: ClosedRegion) -> float:
        """Shoelace area of the outer cycle minus the hole areas"""
        total = abs(GeometryService.shoelace_area(r.outer.coords))
        total -= sum(abs(GeometryService.shoelace_area(h.boundary.coords)) for h in r.holes)
        return max(total, 0.0)

    @staticmethod
    def perimeter(c: Cycle) -> float:
        arr = np.asarray(c.coords, dtype=float)
        return float(np.linalg.norm(np.roll(arr, -1, axis=0) - arr, axis=1).sum())

    @staticmethod
    def diameter(c: Cycle) -> float:
        """Maximum distance between a pair of boundary vertices"""
        return GeometryService.diameter_of(c.coords)

    @staticmethod
    def diameter_of(coords: Sequence[Coord]) -> float:
        arr = np.asarray(coords, dtype=float)
        if len(arr) < 2:
            return 0.0
        return float(euclidean_distances(arr).max())

    @staticmethod
    def interiors_overlap(a: ClosedRegion, b: ClosedRegion, eps_area: float = EPS_AREA) -> bool:
        """True iff the interiors meet in a set of positive area"""
        overlap = GeometryService.region_geometry(a).intersection(GeometryService.region_geometry(b))
        return overlap.area > eps_area

    @staticmethod
    def is_convex(c: Cycle) -> bool:
        """All consecutive turns have the same orientation sign"""
        arr = np.asarray(c.coords, dtype=float)
        edges = np.roll(arr, -1, axis=0) - arr
        nxt = np.roll(edges, -1, axis=0)
        cross = edges[:, 0] * nxt[:, 1] - edges[:, 1] * nxt[:, 0]
        return bool(np.all(cross >= -EPS_AREA) or np.all(cross <= EPS_AREA))

    # ------------------------------------------------------------------
    # Point-sets of complex entities
    # ------------------------------------------------------------------

    @staticmethod
    def vertex_ids(entity: Entity) -> frozenset:
        """Ids of every 0-cell in the entity's point-set"""
        if isinstance(entity, Cycle):
            return frozenset(entity.vertex_ids)
        ids = set()
        if isinstance(entity, (VortexCycle, VortexNerve)):
            for c in entity.cycles:
                ids.update(c.vertex_ids)
        else:
            for cell in entity.payload:
                if isinstance(cell, Vertex):
                    ids.add(cell.id)
                else:
                    ids.update(GeometryService.vertex_ids(cell))
        for h in entity.holes:
            ids.update(h.boundary.vertex_ids)
        return frozenset(ids)

    @staticmethod
    def point_set(entity: Entity) -> Tuple[BaseGeometry, ...]:
        """Boundary point-set of an entity as shapely parts (points, segments, rings)"""
        return _point_set_parts(entity)

    @staticmethod
    def filled_region(entity: Entity) -> BaseGeometry:
        """Filled region: polygon or union of member polygons, holes subtracted"""
        return _filled(entity)

    @staticmethod
    def point_set_distance(a: Entity, b: Entity) -> float:
        parts_a = np.asarray(_point_set_parts(a), dtype=object)
        parts_b = np.asarray(_point_set_parts(b), dtype=object)
        if parts_a.size == 0 or parts_b.size == 0:
            return float('inf')
        return float(shapely.distance(parts_a[:, None], parts_b[None, :]).min())

    @staticmethod
    def set_intersection_nonempty(a: Entity, b: Entity, eps: float = EPS_GEO) -> bool:
        """Shared vertex id, or boundary parts that cross or touch within eps"""
        if GeometryService.vertex_ids(a) & GeometryService.vertex_ids(b):
            return True
        return GeometryService.point_set_distance(a, b) <= eps

    @staticmethod
    def intersection_witness(a: Entity, b: Entity, eps: float = EPS_GEO) -> Optional[str]:
        """A shared vertex id, or the coordinates of a common boundary point"""
        shared = GeometryService.vertex_ids(a) & GeometryService.vertex_ids(b)
        if shared:
            return sorted(shared)[0]
        best = None
        for part_a in _point_set_parts(a):
            for part_b in _point_set_parts(b):
                d = part_a.distance(part_b)
                if d <= eps and (best is None or d < best[0]):
                    best = (d, part_a, part_b)
        if best is None:
            return None
        point = nearest_points(best[1], best[2])[0]
        return f"({point.x:.6g}, {point.y:.6g})"

    @staticmethod
    def filled_overlap_area(a: Entity, b: Entity) -> float:
        return float(_filled(a).intersection(_filled(b)).area)

    @staticmethod
    def filled_intersect(a: Entity, b: Entity, eps: float = EPS_GEO) -> bool:
        """Closed filled regions meet (touching counts)"""
        fa, fb = _filled(a), _filled(b)
        if fa.is_empty or fb.is_empty:
            if GeometryService.vertex_ids(a) & GeometryService.vertex_ids(b):
                return True
            ga = fa if not fa.is_empty else shapely.union_all(list(_point_set_parts(a)))
            gb = fb if not fb.is_empty else shapely.union_all(list(_point_set_parts(b)))
            return ga.distance(gb) <= eps
        return fa.distance(fb) <= eps

    @staticmethod
    def centroid(cycle: Cycle) -> Coord:
        c = _polygon(cycle).centroid
        return (c.x, c.y)

    @staticmethod
    def region_for(cycle: Cycle, holes: Iterable[Hole] = ()) -> ClosedRegion:
        """Closed region of a cycle with optional holes"""
        return ClosedRegion(outer=cycle, holes=tuple(holes))

    @staticmethod
    def regions(entity: Entity, holes: Tuple[Hole, ...] = ()) -> Tuple[ClosedRegion, ...]:
        """
        Member regions whose union is the entity's filled region.

        Every hole of the entity (and of enclosing skeletons) is attached to
        every member; K0 and K1 skeletons have no regions.
        """
        if isinstance(entity, Cycle):
            return (GeometryService.region_for(entity, holes),)
        holes = tuple(holes) + tuple(entity.holes)
        if isinstance(entity, (VortexCycle, VortexNerve)):
            return tuple(GeometryService.region_for(c, holes) for c in entity.cycles)
        cells = entity.payload
        if cells and all(isinstance(cell, Vertex) for cell in cells):
            if len(cells) < 3:
                return ()
            return (GeometryService.region_for(Cycle(id=entity.id, vertices=tuple(cells)), holes),)
        return tuple(r for cell in cells for r in GeometryService.regions(cell, holes))

    @staticmethod
    def boundary_segments(entity: Entity) -> List[Tuple[Coord, Coord]]:
        """Boundary point-set as closed segments; an isolated vertex is a degenerate segment"""
        def ring(coords):
            return [(coords[i], coords[(i + 1) % len(coords)]) for i in range(len(coords))]

        if isinstance(entity, Cycle):
            return ring(entity.coords)
        segments: List[Tuple[Coord, Coord]] = []
        if isinstance(entity, (VortexCycle, VortexNerve)):
            for c in entity.cycles:
                segments.extend(ring(c.coords))
        else:
            cells = entity.payload
            if cells and all(isinstance(cell, Vertex) for cell in cells):
                coords = [cell.position for cell in cells]
                if len(coords) == 1:
                    segments.append((coords[0], coords[0]))
                elif len(coords) == 2:
                    segments.append((coords[0], coords[1]))
                else:
                    segments.extend(ring(coords))
            else:
                for cell in cells:
                    segments.extend(GeometryService.boundary_segments(cell))
        for h in entity.holes:
            segments.extend(ring(h.boundary.coords))
        return segments
