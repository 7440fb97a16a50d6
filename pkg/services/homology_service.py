"""
Homology Service - Z/2 homology of nerve complexes and a raster oracle for unions
Betti-number agreement between a family's nerve and its union
"""
import logging
import math
from itertools import combinations
from typing import List, Optional, Sequence

import numpy as np
import shapely
from scipy import ndimage as ndi

from config import DEFAULT_RESOLUTION, EPS_AREA, EPS_GEO, MIN_FEATURE_CELLS, MIN_RESOLUTION
from models import (
    BettiPair, CellComplex, ClosedRegion, Cycle, ErrorCode, LeaderTopology, NerveComplex,
    Skeleton, TheoremReport, Vertex, VortexCycle, VortexError, VortexNerve
)
from services.geometry_service import GeometryService

logger = logging.getLogger(__name__)


def gf2_rank(matrix: np.ndarray) -> int:
    """Rank over GF(2) by Gaussian elimination with XOR row operations"""
    R = (np.asarray(matrix, dtype=np.uint8) % 2).copy()
    if R.size == 0:
        return 0
    m, n = R.shape
    rank = 0
    for col in range(n):
        rows = np.nonzero(R[rank:, col])[0]
        if rows.size == 0:
            continue
        pivot = rank + int(rows[0])
        if pivot != rank:
            R[[rank, pivot]] = R[[pivot, rank]]
        below = np.nonzero(R[rank + 1:, col])[0] + rank + 1
        R[below] ^= R[rank]
        rank += 1
        if rank == m:
            break
    return rank


class HomologyService:
    """Service for nerve complexes, Betti numbers and the nerve-theorem check"""

    @staticmethod
    def build_nerve_complex(family: Sequence[ClosedRegion], eps_area: float = EPS_AREA) -> NerveComplex:
        """
        One vertex per region, an edge per overlapping pair, a triangle per triple with a common core.

        Overlap means a shared area above eps_area. Regions that only touch along
        an edge or at a point get no edge, so for such families the nerve may
        report more components than the union has.
        """
        geoms = [GeometryService.region_geometry(r) for r in family]
        n = len(geoms)
        edges = []
        for i, j in combinations(range(n), 2):
            if geoms[i].intersection(geoms[j]).area > eps_area:
                edges.append((i, j))
        edge_set = set(edges)
        triangles = []
        for i, j, k in combinations(range(n), 3):
            if {(i, j), (i, k), (j, k)} <= edge_set:
                core = geoms[i].intersection(geoms[j]).intersection(geoms[k])
                if core.area > eps_area:
                    triangles.append((i, j, k))
        nc = NerveComplex(labels=tuple(r.id for r in family), edges=tuple(edges), triangles=tuple(triangles))
        logger.debug(f"Nerve: {n} vertices, {len(edges)} edges, {len(triangles)} triangles")
        return nc

    @staticmethod
    def betti(nc: NerveComplex) -> BettiPair:
        """
        Betti numbers over Z/2.

        b0 = |V| - rank d1, b1 = (|E| - rank d1) - rank d2.

        Raises:
            VortexError(MALFORMED) if the complex is not downward-closed
        """
        n = len(nc.labels)
        edge_index = {}
        for idx, (i, j) in enumerate(nc.edges):
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise VortexError(ErrorCode.MALFORMED, f"edge {(i, j)} has an invalid vertex")
            edge_index[tuple(sorted((i, j)))] = idx
        for t in nc.triangles:
            for face in combinations(sorted(t), 2):
                if face not in edge_index:
                    raise VortexError(ErrorCode.MALFORMED, f"triangle {t} is missing face {face}",
                                      {'triangle': list(t), 'face': list(face)})

        d1 = np.zeros((n, len(nc.edges)), dtype=np.uint8)
        for idx, (i, j) in enumerate(nc.edges):
            d1[i, idx] = d1[j, idx] = 1
        d2 = np.zeros((len(nc.edges), len(nc.triangles)), dtype=np.uint8)
        for idx, t in enumerate(nc.triangles):
            for face in combinations(sorted(t), 2):
                d2[edge_index[face], idx] = 1

        rank1, rank2 = gf2_rank(d1), gf2_rank(d2)
        return BettiPair(b0=n - rank1, b1=len(nc.edges) - rank1 - rank2)

    @staticmethod
    def _min_feature(family: Sequence[ClosedRegion]) -> float:
        lengths = []
        for region in family:
            coords = np.asarray(region.outer.coords, dtype=float)
            lengths.append(np.linalg.norm(np.roll(coords, -1, axis=0) - coords, axis=1).min())
            lengths.extend(GeometryService.diameter(h.boundary) for h in region.holes)
        return float(min(lengths))

    @staticmethod
    def rasterize(family: Sequence[ClosedRegion], resolution: int) -> np.ndarray:
        """Boolean occupancy grid of the union sampled at cell centres, padded by one empty cell"""
        union = shapely.union_all([GeometryService.region_geometry(r) for r in family])
        minx, miny, maxx, maxy = union.bounds
        cell = max(maxx - minx, maxy - miny) / resolution
        nx = max(1, math.ceil((maxx - minx) / cell))
        ny = max(1, math.ceil((maxy - miny) / cell))
        xs = minx + (np.arange(nx + 2) - 0.5) * cell
        ys = miny + (np.arange(ny + 2) - 0.5) * cell
        X, Y = np.meshgrid(xs, ys)
        return shapely.contains_xy(union, X, Y)

    @staticmethod
    def betti_of_union(family: Sequence[ClosedRegion], resolution: int = DEFAULT_RESOLUTION) -> BettiPair:
        """
        Betti numbers of the union from a raster.

        Filled cells are 4-connected and empty cells 8-connected; b1 counts
        empty components that do not touch the padded border.

        Raises:
            VortexError(RESOLUTION_TOO_LOW) below the grid floor or when a feature spans too few cells
        """
        if resolution < MIN_RESOLUTION:
            raise VortexError(ErrorCode.RESOLUTION_TOO_LOW, f"resolution {resolution} is below {MIN_RESOLUTION}",
                              {'resolution': resolution})
        if not family:
            return BettiPair(0, 0)

        union = shapely.union_all([GeometryService.region_geometry(r) for r in family])
        minx, miny, maxx, maxy = union.bounds
        cell = max(maxx - minx, maxy - miny) / resolution
        feature = HomologyService._min_feature(family)
        if feature < MIN_FEATURE_CELLS * cell:
            raise VortexError(
                ErrorCode.RESOLUTION_TOO_LOW,
                f"smallest feature spans {feature / cell:.3g} cells, need {MIN_FEATURE_CELLS}",
                {'resolution': resolution, 'feature': feature, 'cell': cell}
            )

        grid = HomologyService.rasterize(family, resolution)
        foreground, _ = ndi.label(grid, structure=ndi.generate_binary_structure(2, 1))
        background, _ = ndi.label(~grid, structure=ndi.generate_binary_structure(2, 2))
        border = set(np.concatenate([background[0], background[-1], background[:, 0], background[:, -1]]).tolist())

        # Components smaller than the feature floor are sampling debris at sharp corners
        fg_sizes = np.bincount(foreground.ravel())
        bg_sizes = np.bincount(background.ravel())
        b0 = int(np.count_nonzero(fg_sizes[1:] >= MIN_FEATURE_CELLS))
        holes = [
            label for label in range(1, len(bg_sizes))
            if bg_sizes[label] >= MIN_FEATURE_CELLS and label not in border
        ]
        return BettiPair(b0=b0, b1=len(holes))

    @staticmethod
    def verify_nerve_theorem(family: Sequence[ClosedRegion], resolution: int = DEFAULT_RESOLUTION,
                             label: str = 'family') -> TheoremReport:
        """Compare nerve and union Betti numbers for a family of convex, hole-free regions"""
        for region in family:
            if region.holes or not GeometryService.is_convex(region.outer):
                raise VortexError(ErrorCode.NOT_CONVEX, f"region {region.id} is not a convex hole-free region",
                                  {'region': region.id})
        nerve = HomologyService.betti(HomologyService.build_nerve_complex(family))
        union = HomologyService.betti_of_union(family, resolution)
        passed = nerve == union
        logger.info(f"Nerve theorem on {label}: nerve {nerve}, union {union}, {'PASS' if passed else 'FAIL'}")
        return TheoremReport(label=label, nerve=nerve, union=union, passed=passed, resolution=resolution)

    @staticmethod
    def family_of(ctx: CellComplex) -> List[ClosedRegion]:
        """Every cycle that is not a hole boundary, with the holes its CYCLE skeleton carries"""
        holes_of = {}
        for s in ctx.skeletons:
            if s.payload and isinstance(s.payload[0], Cycle) and s.holes:
                holes_of.setdefault(s.payload[0].id, []).extend(s.holes)
        return [
            GeometryService.region_for(c, holes_of.get(c.id, ()))
            for c in ctx.cycles if c.id not in ctx.hole_boundary_ids
        ]

    @staticmethod
    def convex_region(element) -> Optional[ClosedRegion]:
        """The element's filled region as a single convex hole-free region, or None"""
        if isinstance(element, Cycle):
            return GeometryService.region_for(element) if GeometryService.is_convex(element) else None
        if isinstance(element, (VortexCycle, VortexNerve)):
            if element.holes:
                return None
            body = GeometryService.filled_region(element)
            for c in element.cycles:
                if GeometryService.polygon(c).buffer(EPS_GEO).covers(body):
                    return HomologyService.convex_region(c)
            return None
        if isinstance(element, Skeleton):
            if element.holes:
                return None
            cells = element.payload
            if len(cells) == 3 and all(isinstance(v, Vertex) for v in cells):
                return HomologyService.convex_region(Cycle(id=element.id, vertices=tuple(cells)))
            if len(cells) == 1 and not isinstance(cells[0], Vertex):
                return HomologyService.convex_region(cells[0])
        return None

    @staticmethod
    def verify_cluster_homotopy(t: LeaderTopology, resolution: int = DEFAULT_RESOLUTION) -> List[TheoremReport]:
        """Nerve-theorem check per cluster; clusters with a non-convex member are skipped"""
        by_id = {e.id: e for e in t.elements}
        reports = []
        for cluster in t.clusters:
            label = f"cluster {cluster.anchor}"
            regions = [HomologyService.convex_region(by_id[m]) for m in cluster.members]
            if any(r is None for r in regions):
                reports.append(TheoremReport(label=label, nerve=None, union=None, passed=False,
                                             resolution=resolution, skipped=ErrorCode.NOT_CONVEX.value))
                continue
            try:
                reports.append(HomologyService.verify_nerve_theorem(regions, resolution, label))
            except VortexError as e:
                reports.append(TheoremReport(label=label, nerve=None, union=None, passed=False,
                                             resolution=resolution, skipped=e.code.value))
        return reports
