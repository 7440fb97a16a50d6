"""
Topology Service - Leader uniform topology clusters and CW checks
"""
import logging
from itertools import combinations
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import shapely
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as csgraph_components

from config import EPS_GEO
from models import (
    CellComplex, Cluster, ClusterPair, CWReport, CWWitness, ErrorCode, LeaderTopology,
    MatchPolicy, Relation, VortexError
)
from services.geometry_service import GeometryService
from services.proximity_service import Element, ProximityService, as_family

logger = logging.getLogger(__name__)

UNIVERSE_CHOICES = ('auto', 'skeletons', 'nerves', 'vortex', 'cycles')


def _closure(element: Element):
    """Filled region together with every boundary cell"""
    parts = [GeometryService.filled_region(element)] + list(GeometryService.point_set(element))
    return shapely.union_all([p for p in parts if not p.is_empty])


class TopologyService:
    """Service to build Leader clusters and verify CW topology conditions"""

    @staticmethod
    def universe_of(ctx: CellComplex, choice: str = 'auto') -> Tuple[Element, ...]:
        """
        Elements a topology is built over.

        'auto' picks the registered skeletons when the complex has any, else its
        vortex nerves, else its vortex cycles.
        """
        if choice not in UNIVERSE_CHOICES:
            raise VortexError(ErrorCode.MALFORMED, f"unknown universe {choice!r}", {'universe': choice})
        if choice == 'auto':
            if ctx.skeletons:
                return ctx.skeletons
            if ctx.vortex_nerves:
                return ctx.vortex_nerves
            return ctx.vortex_cycles
        if choice == 'skeletons':
            return ctx.skeletons
        if choice == 'nerves':
            return ctx.vortex_nerves
        if choice == 'vortex':
            return ctx.vortex_cycles
        return tuple(c for c in ctx.cycles if c.id not in ctx.hole_boundary_ids)

    @staticmethod
    def _check_relation(relation: Relation, policy: Optional[MatchPolicy]):
        if relation == Relation.CECH:
            raise VortexError(ErrorCode.MALFORMED, 'Leader clusters use CONN, SCONN or DSCONN')
        if relation == Relation.DSCONN and policy is None:
            raise VortexError(ErrorCode.MISSING_PROBE, 'DSCONN clusters need a match policy')

    @staticmethod
    def build_leader_topology(universe: Sequence[Element], relation: Relation,
                              policy: Optional[MatchPolicy] = None,
                              ctx: Optional[CellComplex] = None,
                              universe_id: str = 'universe') -> LeaderTopology:
        """
        Build one anchored cluster per element.

        cluster(A) = {B : A relation B} + {A}; every pair of clusters also gets
        its intersection and union recorded as member sets.
        """
        TopologyService._check_relation(relation, policy)
        elements = tuple(sorted(as_family(universe), key=lambda e: e.id))

        clusters = []
        for anchor in elements:
            members = {anchor.id}
            for other in elements:
                if other.id != anchor.id and ProximityService.evaluate(relation, anchor, other, policy, ctx).near:
                    members.add(other.id)
            clusters.append(Cluster(anchor=anchor.id, members=tuple(sorted(members)), relation=relation))

        ids = {e.id for e in elements}
        pairs = []
        closed = True
        for c1, c2 in combinations(clusters, 2):
            inter = tuple(sorted(set(c1.members) & set(c2.members)))
            union = tuple(sorted(set(c1.members) | set(c2.members)))
            closed = closed and set(union) <= ids
            pairs.append(ClusterPair(a=c1.anchor, b=c2.anchor, intersection=inter, union=union))

        logger.info(f"Leader topology on {universe_id} ({relation.value}): {len(clusters)} clusters")
        return LeaderTopology(
            universe_id=universe_id, relation=relation, clusters=tuple(clusters),
            pairs=tuple(pairs), closed=closed, elements=elements
        )

    @staticmethod
    def check_cw(universe: Union[CellComplex, Sequence[Element]], eps: float = EPS_GEO) -> CWReport:
        """
        Closure counts and weak-topology witnesses.

        Over a finite universe of polygonal cells both conditions hold by
        construction: each closure meets finitely many others, and the meet of
        two closed polygonal sets is closed. The report records the per-element
        counts and, for every meeting pair, the dimension of the shared part.
        """
        if isinstance(universe, CellComplex):
            elements = TopologyService.universe_of(universe)
        else:
            elements = as_family(universe)

        closures = {e.id: _closure(e) for e in elements}
        counts = []
        witnesses = []
        for a in elements:
            count = 0
            for b in elements:
                if b.id != a.id and closures[a.id].distance(closures[b.id]) <= eps:
                    count += 1
            counts.append((a.id, count))

        for a, b in combinations(elements, 2):
            meet = closures[a.id].intersection(closures[b.id])
            if meet.is_empty:
                continue
            dimension = int(max(shapely.get_dimensions(shapely.get_parts(meet))))
            witnesses.append(CWWitness(a=a.id, b=b.id, dimension=dimension))

        logger.info(f"CW check on {len(elements)} elements: {len(witnesses)} meeting pairs")
        return CWReport(closure_finite=True, closure_counts=tuple(counts),
                        weak_topology=True, witnesses=tuple(witnesses))

    @staticmethod
    def cluster_cw(t: LeaderTopology, cluster_id: str) -> CWReport:
        """check_cw restricted to one cluster's members"""
        cluster = t.cluster(cluster_id)
        members = set(cluster.members)
        return TopologyService.check_cw([e for e in t.elements if e.id in members])

    @staticmethod
    def connected_components(universe: Sequence[Element], relation: Relation,
                             policy: Optional[MatchPolicy] = None,
                             ctx: Optional[CellComplex] = None) -> List[Tuple[str, ...]]:
        """Components of the nearness graph; each component sorted, components ordered by first id"""
        TopologyService._check_relation(relation, policy)
        elements = tuple(sorted(as_family(universe), key=lambda e: e.id))
        n = len(elements)
        if n == 0:
            return []
        adjacency = np.zeros((n, n), dtype=np.int8)
        for i, j in combinations(range(n), 2):
            if ProximityService.evaluate(relation, elements[i], elements[j], policy, ctx).near:
                adjacency[i, j] = adjacency[j, i] = 1
        _, labels = csgraph_components(csr_matrix(adjacency), directed=False)
        groups = {}
        for element, label in zip(elements, labels):
            groups.setdefault(int(label), []).append(element.id)
        return sorted((tuple(sorted(g)) for g in groups.values()), key=lambda g: g[0])
