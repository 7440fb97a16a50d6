"""
Proximity Service - nearness relations on planar cell complexes
Cech, connectedness (conn), overlap connectedness (sconn), descriptive connectedness (dsconn),
descriptive intersection/union/closure and proximal relators
"""
import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from config import EPS_AREA
from models import (
    CellComplex, Cycle, ErrorCode, FeatureVector, MatchMode, MatchPolicy, ProbeId,
    ProximityVerdict, Relation, Relator, Skeleton, VortexCycle, VortexError, VortexNerve
)
from services.descriptor_service import DescriptorService
from services.geometry_service import GeometryService

logger = logging.getLogger(__name__)

Element = Union[Skeleton, Cycle, VortexCycle, VortexNerve]
Family = Union[Element, Iterable[Element]]

DEFAULT_POLICY = MatchPolicy(probes=(ProbeId.VERTEX_COUNT.value,), mode=MatchMode.ANY)


def as_family(x: Family) -> Tuple[Element, ...]:
    """Single elements become one-member families; duplicates (by id) are dropped"""
    if isinstance(x, (Skeleton, Cycle, VortexCycle, VortexNerve)):
        return (x,)
    seen = set()
    members = []
    for element in x:
        if element.id not in seen:
            seen.add(element.id)
            members.append(element)
    return tuple(members)


class ProximityService:
    """Service to evaluate proximity relations; collections are near iff some member pair is near"""

    @staticmethod
    def cech_near(a: Family, b: Family) -> ProximityVerdict:
        """Cech proximity: near iff the point-sets intersect"""
        fa, fb = as_family(a), as_family(b)
        if not fa or not fb:
            raise VortexError(ErrorCode.EMPTY_ARGUMENT, 'every set is far from the empty set')
        verdict = ProximityService._point_set_verdict(fa, fb, Relation.CECH)
        logger.debug(f"cech {[x.id for x in fa]} vs {[x.id for x in fb]}: {verdict.near}")
        return verdict

    @staticmethod
    def conn(a: Family, b: Family) -> ProximityVerdict:
        """
        Connectedness proximity.

        Near iff the skeleton point-sets (cells and boundaries, not filled
        regions) share a vertex or meet within eps. The witness is the shared
        vertex id or a common boundary point.
        """
        return ProximityService._point_set_verdict(as_family(a), as_family(b), Relation.CONN)

    @staticmethod
    def _point_set_verdict(fa, fb, relation: Relation) -> ProximityVerdict:
        for x in fa:
            for y in fb:
                if GeometryService.set_intersection_nonempty(x, y):
                    return ProximityVerdict(relation, True, GeometryService.intersection_witness(x, y))
        return ProximityVerdict(relation, False)

    @staticmethod
    def sconn(a: Family, b: Family, eps_area: float = EPS_AREA) -> ProximityVerdict:
        """Overlap connectedness: near iff filled regions (holes removed) overlap with positive area"""
        for x in as_family(a):
            for y in as_family(b):
                overlap = GeometryService.filled_overlap_area(x, y)
                if overlap > eps_area:
                    return ProximityVerdict(Relation.SCONN, True, f"{x.id}&{y.id} area {overlap:.6g}")
        return ProximityVerdict(Relation.SCONN, False)

    @staticmethod
    def _describe_all(family: Sequence[Element], policy: MatchPolicy,
                      ctx: Optional[CellComplex]) -> Dict[str, FeatureVector]:
        return {x.id: DescriptorService.describe(x, policy.probes, ctx) for x in family}

    @staticmethod
    def dsconn(a: Family, b: Family, policy: Optional[MatchPolicy] = None,
               ctx: Optional[CellComplex] = None) -> ProximityVerdict:
        """Descriptive connectedness: near iff some member descriptions match under the policy"""
        policy = policy or DEFAULT_POLICY
        fa, fb = as_family(a), as_family(b)
        features = ProximityService._describe_all(fa + fb, policy, ctx)
        for x in fa:
            for y in fb:
                report = DescriptorService.features_match(features[x.id], features[y.id], policy)
                if report.verdict:
                    return ProximityVerdict(Relation.DSCONN, True, ','.join(report.matching_probes))
        return ProximityVerdict(Relation.DSCONN, False)

    @staticmethod
    def _matches(x: FeatureVector, family: Sequence[FeatureVector], policy: MatchPolicy) -> bool:
        return any(DescriptorService.features_match(x, y, policy).verdict for y in family)

    @staticmethod
    def descriptive_intersection(a: Family, b: Family, policy: Optional[MatchPolicy] = None,
                                 ctx: Optional[CellComplex] = None) -> Tuple[Element, ...]:
        """Elements of a+b whose description occurs in both Phi(a) and Phi(b)"""
        policy = policy or DEFAULT_POLICY
        fa, fb = as_family(a), as_family(b)
        union = as_family(fa + fb)
        features = ProximityService._describe_all(union, policy, ctx)
        phi_a = [features[x.id] for x in fa]
        phi_b = [features[x.id] for x in fb]
        return tuple(
            x for x in union
            if ProximityService._matches(features[x.id], phi_a, policy)
            and ProximityService._matches(features[x.id], phi_b, policy)
        )

    @staticmethod
    def descriptive_union(a: Family, b: Family, universe: Family, policy: Optional[MatchPolicy] = None,
                          ctx: Optional[CellComplex] = None) -> Tuple[Element, ...]:
        """Universe elements whose description occurs in Phi(a+b)"""
        policy = policy or DEFAULT_POLICY
        joined = as_family(as_family(a) + as_family(b))
        members = as_family(universe)
        features = ProximityService._describe_all(as_family(joined + members), policy, ctx)
        phi = [features[x.id] for x in joined]
        return tuple(e for e in members if ProximityService._matches(features[e.id], phi, policy))

    @staticmethod
    def descriptive_closure(a: Family, universe: Family, policy: Optional[MatchPolicy] = None,
                            ctx: Optional[CellComplex] = None) -> Tuple[Element, ...]:
        """Universe elements descriptively near a, together with a itself"""
        policy = policy or DEFAULT_POLICY
        fa = as_family(a)
        near = ProximityService.descriptive_union(fa, (), universe, policy, ctx)
        return as_family(fa + near)

    @staticmethod
    def evaluate(relation: Relation, a: Family, b: Family, policy: Optional[MatchPolicy] = None,
                 ctx: Optional[CellComplex] = None) -> ProximityVerdict:
        if relation == Relation.CECH:
            return ProximityService.cech_near(a, b)
        if relation == Relation.CONN:
            return ProximityService.conn(a, b)
        if relation == Relation.SCONN:
            return ProximityService.sconn(a, b)
        if policy is None:
            raise VortexError(ErrorCode.MISSING_PROBE, 'DSCONN needs a match policy')
        return ProximityService.dsconn(a, b, policy, ctx)

    @staticmethod
    def evaluate_relator(a: Family, b: Family, r: Relator,
                         ctx: Optional[CellComplex] = None) -> List[ProximityVerdict]:
        """One verdict per relation of the relator, evaluated independently"""
        return [ProximityService.evaluate(rel, a, b, r.policy, ctx) for rel in r.relations]
