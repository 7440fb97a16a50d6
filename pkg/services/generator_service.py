"""
Generator Service - seeded random polygons, complexes and convex families
Every generated complex validates; convex families are drawn until they rasterize cleanly
"""
import logging
import math
from itertools import combinations
from typing import List, Tuple

import numpy as np
import shapely
from shapely.geometry import Polygon

from config import EPS_GEO
from models import (
    CellComplex, ClosedRegion, Cycle, Edge, Hole, Measurement, ProbeId, Skeleton, SkeletonKind,
    Vertex, VortexCycle, VortexNerve
)

logger = logging.getLogger(__name__)

KINDS = (SkeletonKind.K0, SkeletonKind.K1, SkeletonKind.K2, SkeletonKind.K1_5,
         SkeletonKind.CYCLE, SkeletonKind.VORTEX, SkeletonKind.NERVE)

# Inward buffer every nonempty overlap must survive, and the gap between disjoint pieces
MARGIN = 0.1
MAX_ATTEMPTS = 1000


def _angles(rng: np.random.Generator, n: int) -> np.ndarray:
    step = 2 * math.pi / n
    return rng.uniform(0, 2 * math.pi) + step * np.arange(n) + rng.uniform(-0.3, 0.3, size=n) * step


def _points(center, radii, angles) -> List[Tuple[float, float]]:
    xs = center[0] + radii * np.cos(angles)
    ys = center[1] + radii * np.sin(angles)
    return [(float(x), float(y)) for x, y in zip(xs, ys)]


def _cycle(prefix: str, coords, shared: Tuple[Vertex, ...] = ()) -> Tuple[Cycle, List[Vertex]]:
    """Cycle over fresh vertices; coordinates equal to a shared vertex reuse it"""
    by_position = {v.position: v for v in shared}
    vertices, fresh = [], []
    for i, xy in enumerate(coords):
        if xy in by_position:
            vertices.append(by_position[xy])
        else:
            v = Vertex(id=f"{prefix}_v{i}", position=xy)
            vertices.append(v)
            fresh.append(v)
    return Cycle(id=prefix, vertices=tuple(vertices)), fresh


def _homothety(coords, origin, ratio: float):
    return [(origin[0] + ratio * (x - origin[0]), origin[1] + ratio * (y - origin[1])) for x, y in coords]


class GeneratorService:
    """Service to draw deterministic random inputs from a seed"""

    @staticmethod
    def star_coords(rng: np.random.Generator, center, radius: float, n: int):
        """Simple polygon star-shaped about its center (angles strictly increasing)"""
        return _points(center, radius * rng.uniform(0.7, 1.0, size=n), _angles(rng, n))

    @staticmethod
    def convex_coords(rng: np.random.Generator, center, radius: float, n: int):
        """Convex polygon with vertices on a circle"""
        return _points(center, np.full(n, radius), _angles(rng, n))

    @staticmethod
    def random_polygon(seed: int) -> Cycle:
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 13))
        center = tuple(float(x) for x in rng.uniform(-10, 10, size=2))
        coords = GeneratorService.star_coords(rng, center, float(rng.uniform(0.5, 5)), n)
        cycle, _ = _cycle(f"p{seed}", coords)
        return cycle

    @staticmethod
    def _vortex(rng, prefix: str, center, radius: float, with_hole: bool):
        n = int(rng.integers(5, 9))
        outer_coords = GeneratorService.convex_coords(rng, center, radius, n)
        outer_poly = Polygon(outer_coords)
        g = outer_poly.centroid
        for _ in range(MAX_ATTEMPTS):
            theta = rng.uniform(0, 2 * math.pi)
            dist = rng.uniform(0.1, 0.3) * radius
            q = (g.x + dist * math.cos(theta), g.y + dist * math.sin(theta))
            inner_coords = _homothety(outer_coords, q, 0.5)
            inner_poly = Polygon(inner_coords)
            if outer_poly.contains(inner_poly) and inner_poly.centroid.distance(g) > EPS_GEO:
                break
        outer, outer_vertices = _cycle(f"{prefix}_c1", outer_coords)
        inner, inner_vertices = _cycle(f"{prefix}_c2", inner_coords)
        vertices = outer_vertices + inner_vertices
        holes, hole_cycles = [], []
        if with_hole:
            picks = [inner_coords[i * len(inner_coords) // 3] for i in range(3)]
            hole_cycle, hole_vertices = _cycle(f"{prefix}_h", _homothety(picks, q, 0.3))
            vertices += hole_vertices
            hole_cycles.append(hole_cycle)
            holes.append(Hole(id=f"{prefix}_hole", boundary=hole_cycle))
        vortex = VortexCycle(id=prefix, cycles=(outer, inner), holes=tuple(holes))
        return vortex, vertices, [outer, inner] + hole_cycles, holes

    @staticmethod
    def _nerve(rng, prefix: str, center, radius: float):
        n = int(rng.integers(5, 9))
        outer_coords = GeneratorService.convex_coords(rng, center, radius, n)
        outer, outer_vertices = _cycle(f"{prefix}_c1", outer_coords)
        pivot = outer.vertices[int(rng.integers(0, n))]
        inner, inner_vertices = _cycle(f"{prefix}_c2", _homothety(outer_coords, pivot.position, 0.6),
                                       shared=(pivot,))
        vortex = VortexCycle(id=f"{prefix}_vcyc", cycles=(outer, inner))
        nerve = VortexNerve(id=prefix, underlying=vortex)
        return nerve, outer_vertices + inner_vertices, [outer, inner]

    @staticmethod
    def random_complex(seed: int, max_skeletons: int = 25) -> CellComplex:
        """
        Random valid complex of mixed skeleton kinds.

        Args:
            seed: Seed of the generator
            max_skeletons: Upper bound on the skeleton count (at least 3 are drawn)

        Returns:
            CellComplex whose validation reports are all OK
        """
        rng = np.random.default_rng(seed)
        count = int(rng.integers(min(3, max_skeletons), max_skeletons + 1))
        vertices, edges, cycles, holes = [], [], [], []
        skeletons, vortex_cycles, nerves, measurements = [], [], [], []

        for k in range(count):
            kind = KINDS[int(rng.integers(0, len(KINDS)))]
            prefix = f"s{k}"
            center = tuple(float(x) for x in rng.uniform(0, 12, size=2))
            radius = float(rng.uniform(0.8, 3.0))

            if kind == SkeletonKind.K0:
                v = Vertex(id=f"{prefix}_v0", position=center)
                vertices.append(v)
                skeletons.append(Skeleton(id=prefix, kind=kind, payload=(v,)))
            elif kind == SkeletonKind.K1:
                angle = rng.uniform(0, 2 * math.pi)
                end = (center[0] + radius * math.cos(angle), center[1] + radius * math.sin(angle))
                a, b = Vertex(f"{prefix}_v0", center), Vertex(f"{prefix}_v1", end)
                vertices += [a, b]
                edges.append(Edge(a.id, b.id))
                skeletons.append(Skeleton(id=prefix, kind=kind, payload=(a, b)))
            elif kind in (SkeletonKind.K2, SkeletonKind.K1_5):
                coords = GeneratorService.convex_coords(rng, center, radius, 3)
                tri = [Vertex(f"{prefix}_v{i}", xy) for i, xy in enumerate(coords)]
                vertices += tri
                edges += [Edge(tri[i].id, tri[(i + 1) % 3].id) for i in range(3)]
                skeleton_holes = ()
                if kind == SkeletonKind.K1_5:
                    centroid = Polygon(coords).centroid
                    hole_cycle, hole_vertices = _cycle(f"{prefix}_h", _homothety(coords, (centroid.x, centroid.y), 0.3))
                    vertices += hole_vertices
                    cycles.append(hole_cycle)
                    hole = Hole(id=f"{prefix}_hole", boundary=hole_cycle)
                    holes.append(hole)
                    skeleton_holes = (hole,)
                skeletons.append(Skeleton(id=prefix, kind=kind, payload=tuple(tri), holes=skeleton_holes))
            elif kind == SkeletonKind.CYCLE:
                cycle, fresh = _cycle(f"{prefix}_c", GeneratorService.star_coords(rng, center, radius, int(rng.integers(3, 10))))
                vertices += fresh
                cycles.append(cycle)
                skeletons.append(Skeleton(id=prefix, kind=kind, payload=(cycle,)))
            elif kind == SkeletonKind.VORTEX:
                vortex, fresh, member_cycles, vortex_holes = GeneratorService._vortex(
                    rng, f"{prefix}_vcyc", center, radius, bool(rng.integers(0, 2)))
                vertices += fresh
                cycles += member_cycles
                holes += vortex_holes
                vortex_cycles.append(vortex)
                skeletons.append(Skeleton(id=prefix, kind=kind, payload=(vortex,)))
                if rng.random() < 0.5:
                    measurements.append(Measurement(vortex.id, ProbeId.PERSISTENCE_DURATION.value,
                                                    float(rng.integers(1, 10))))
            else:
                nerve, fresh, nerve_cycles = GeneratorService._nerve(rng, f"{prefix}_nrv", center, radius)
                vertices += fresh
                cycles += nerve_cycles
                vortex_cycles.append(nerve.underlying)
                nerves.append(nerve)
                skeletons.append(Skeleton(id=prefix, kind=kind, payload=(nerve,)))

        ctx = CellComplex(
            id=f"random-{seed}", vertices=tuple(vertices), edges=tuple(edges), cycles=tuple(cycles),
            holes=tuple(holes), skeletons=tuple(skeletons), vortex_cycles=tuple(vortex_cycles),
            vortex_nerves=tuple(nerves), measurements=tuple(measurements),
            description=f"random complex, seed {seed}"
        )
        logger.debug(f"Generated {ctx.id}: {ctx.summary()}")
        return ctx

    @staticmethod
    def _well_separated(polygons: List[Polygon]) -> bool:
        """Overlaps survive an inward MARGIN buffer; disjoint pieces are at least MARGIN apart"""
        def clean(a, b) -> bool:
            meet = a.intersection(b)
            if meet.area > 0:
                return not meet.buffer(-MARGIN).is_empty
            return a.distance(b) >= MARGIN

        for a, b in combinations(polygons, 2):
            if not clean(a, b):
                return False
        for a, b, c in combinations(polygons, 3):
            if min(a.intersection(b).area, a.intersection(c).area, b.intersection(c).area) == 0:
                continue
            if not (clean(a.intersection(b), c) and clean(a.intersection(c), b) and clean(b.intersection(c), a)):
                return False
        union = shapely.union_all(polygons)
        for part in shapely.get_parts(union):
            for ring in part.interiors:
                if Polygon(ring).buffer(-MARGIN).is_empty:
                    return False
        return True

    @staticmethod
    def random_convex_family(seed: int, size: int = 3) -> List[ClosedRegion]:
        """
        Seeded family of 2-3 convex polygons that rasterizes cleanly at the default resolution.
        """
        rng = np.random.default_rng(seed)
        for attempt in range(MAX_ATTEMPTS):
            coords = [
                GeneratorService.convex_coords(rng, tuple(float(x) for x in rng.uniform(0, 4, size=2)), float(rng.uniform(1.0, 2.5)),
                                               int(rng.integers(3, 9)))
                for _ in range(size)
            ]
            polygons = [Polygon(c) for c in coords]
            if GeneratorService._well_separated(polygons):
                logger.debug(f"Convex family {seed} accepted after {attempt + 1} draws")
                return [ClosedRegion(outer=_cycle(f"f{seed}_r{k}", c)[0]) for k, c in enumerate(coords)]
        raise RuntimeError(f"no clean convex family for seed {seed}")
