"""
Descriptor Service - probe functions and feature vectors
The description map on cycles, vortex cycles, vortex nerves, skeletons and whole complexes
"""
import logging
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Union

from config import RELATIVE_TOLERANCE
from models import (
    COUNT_PROBES, CellComplex, Cycle, ErrorCode, FeatureVector, MatchMode, MatchPolicy,
    MatchReport, ProbeId, ProbeMatch, Skeleton, VortexCycle, VortexError, VortexNerve
)
from services.complex_service import ComplexService
from services.geometry_service import GeometryService

logger = logging.getLogger(__name__)

Target = Union[Cycle, VortexCycle, VortexNerve, Skeleton, CellComplex]

KNOWN_PROBES = tuple(p.value for p in ProbeId)


def _exterior_length(geom) -> float:
    if geom.is_empty:
        return 0.0
    if geom.geom_type == 'Polygon':
        return geom.exterior.length
    if hasattr(geom, 'geoms'):
        return sum(_exterior_length(g) for g in geom.geoms)
    return geom.length


def _target_kind(target: Target) -> str:
    if isinstance(target, CellComplex):
        return 'complex'
    if isinstance(target, VortexNerve):
        return 'vortex_nerve'
    if isinstance(target, VortexCycle):
        return 'vortex_cycle'
    if isinstance(target, Cycle):
        return 'cycle'
    return 'skeleton'


class DescriptorService:
    """Service to compute probe values and compare feature vectors"""

    @staticmethod
    def _probe_cycle(c: Cycle, probe: str) -> Optional[float]:
        if probe == ProbeId.VERTEX_COUNT.value:
            return float(len(c.vertices))
        if probe == ProbeId.HOLE_COUNT.value:
            return 0.0
        if probe == ProbeId.AREA.value:
            return GeometryService.polygon(c).area
        if probe == ProbeId.PERIMETER.value:
            return GeometryService.perimeter(c)
        if probe == ProbeId.DIAMETER.value:
            return GeometryService.diameter(c)
        return None

    @staticmethod
    def _probe_vortex(v: Union[VortexCycle, VortexNerve], probe: str) -> Optional[float]:
        if probe == ProbeId.VERTEX_COUNT.value:
            return float(len({vid for c in v.cycles for vid in c.vertex_ids}))
        if probe == ProbeId.HOLE_COUNT.value:
            return float(len(v.holes))
        if probe == ProbeId.CYCLE_COUNT.value:
            return float(len(v.cycles))
        if probe == ProbeId.OVERLAP_COUNT.value:
            return float(sum(
                1 for c1, c2 in combinations(v.cycles, 2)
                if GeometryService.set_intersection_nonempty(c1, c2)
            ))
        if probe == ProbeId.AREA.value:
            return GeometryService.filled_region(v).area
        if probe == ProbeId.MAX_AREA.value:
            return max(GeometryService.polygon(c).area for c in v.cycles)
        if probe == ProbeId.PERIMETER.value:
            return _exterior_length(GeometryService.filled_region(v))
        if probe == ProbeId.DIAMETER.value:
            return GeometryService.diameter_of([xy for c in v.cycles for xy in c.coords])

        is_nerve = isinstance(v, VortexNerve) or ComplexService.detect_nerve(v) is not None
        if probe == ProbeId.NERVE_COUNT.value:
            return 1.0 if is_nerve else 0.0
        if probe == ProbeId.NERVE_CYCLE_COUNT.value:
            return float(len(v.cycles)) if is_nerve else 0.0
        return None

    @staticmethod
    def _probe_skeleton(s: Skeleton, probe: str) -> Optional[float]:
        if probe == ProbeId.VERTEX_COUNT.value:
            return float(len(GeometryService.vertex_ids(s)))
        if probe == ProbeId.HOLE_COUNT.value:
            return float(len(s.holes) + sum(len(cell.holes) for cell in s.payload
                                            if isinstance(cell, (VortexCycle, VortexNerve))))
        if probe == ProbeId.AREA.value:
            return GeometryService.filled_region(s).area
        if probe == ProbeId.PERIMETER.value:
            filled = GeometryService.filled_region(s)
            if not filled.is_empty:
                return _exterior_length(filled)
            return float(sum(part.length for part in GeometryService.point_set(s)))
        if probe == ProbeId.DIAMETER.value:
            coords = [xy for part in GeometryService.point_set(s) for xy in part.coords]
            return GeometryService.diameter_of(coords)
        return None

    @staticmethod
    def _probe_complex(ctx: CellComplex, probe: str) -> Optional[float]:
        if probe == ProbeId.VERTEX_COUNT.value:
            return float(len(ctx.vertices))
        if probe == ProbeId.HOLE_COUNT.value:
            return float(len(ctx.holes))
        if probe == ProbeId.CYCLE_COUNT.value:
            return float(sum(1 for c in ctx.cycles if c.id not in ctx.hole_boundary_ids))
        if probe == ProbeId.NERVE_COUNT.value:
            return float(len(ctx.vortex_nerves))
        if probe == ProbeId.NERVE_CYCLE_COUNT.value:
            return float(sum(len(n.cycles) for n in ctx.vortex_nerves))
        if probe == ProbeId.MAX_AREA.value:
            areas = [GeometryService.filled_region(v).area for v in ctx.vortex_cycles]
            return max(areas) if areas else 0.0
        return None

    @staticmethod
    def describe(target: Target, probes: Sequence[str], ctx: Optional[CellComplex] = None) -> FeatureVector:
        """
        Compute the feature vector of a target.

        Args:
            target: Cycle, vortex cycle, vortex nerve, skeleton or complex
            probes: Probe names, in output order
            ctx: Complex holding recorded measurements (defaults to target when it is a complex)

        Returns:
            FeatureVector with one entry per probe

        Raises:
            VortexError(PROBE_INAPPLICABLE) for an empty, unknown or inapplicable probe
        """
        if not probes:
            raise VortexError(ErrorCode.PROBE_INAPPLICABLE, 'no probes requested')
        if ctx is None and isinstance(target, CellComplex):
            ctx = target
        recorded: Dict[str, float] = ctx.measurements_for(target.id) if ctx is not None else {}

        entries = []
        for probe in probes:
            if probe not in KNOWN_PROBES:
                raise VortexError(ErrorCode.PROBE_INAPPLICABLE, f"unknown probe {probe!r}", {'probe': probe})
            if probe in recorded:
                value = float(recorded[probe])
            elif probe == ProbeId.PERSISTENCE_DURATION.value:
                value = None
            elif isinstance(target, CellComplex):
                value = DescriptorService._probe_complex(target, probe)
            elif isinstance(target, (VortexCycle, VortexNerve)):
                value = DescriptorService._probe_vortex(target, probe)
            elif isinstance(target, Cycle):
                value = DescriptorService._probe_cycle(target, probe)
            else:
                value = DescriptorService._probe_skeleton(target, probe)
            if value is None:
                raise VortexError(
                    ErrorCode.PROBE_INAPPLICABLE,
                    f"probe {probe} does not apply to {_target_kind(target)} {target.id}",
                    {'probe': probe, 'target': target.id, 'kind': _target_kind(target)}
                )
            entries.append((probe, float(value)))

        return FeatureVector(target_id=target.id, entries=tuple(entries))

    @staticmethod
    def tolerance_for(probe: str, a: float, b: float, policy: MatchPolicy) -> float:
        """Absolute tolerance: explicit entry, else 0 for counts and relative for geometric probes"""
        explicit = dict(policy.tolerances)
        if probe in explicit:
            return explicit[probe]
        if probe in COUNT_PROBES:
            return 0.0
        rel = policy.relative_tolerance if policy.relative_tolerance is not None else RELATIVE_TOLERANCE
        return rel * max(abs(a), abs(b))

    @staticmethod
    def features_match(a: FeatureVector, b: FeatureVector, policy: MatchPolicy) -> MatchReport:
        """Per-probe comparison and the overall verdict under the policy mode"""
        matches: List[ProbeMatch] = []
        for probe in policy.probes:
            va, vb = a.get(probe), b.get(probe)
            if va is None or vb is None:
                raise VortexError(
                    ErrorCode.MISSING_PROBE,
                    f"probe {probe} missing from {a.target_id if va is None else b.target_id}",
                    {'probe': probe}
                )
            tol = DescriptorService.tolerance_for(probe, va, vb, policy)
            matches.append(ProbeMatch(probe=probe, a=va, b=vb, matched=abs(va - vb) <= tol))

        if policy.mode == MatchMode.ALL:
            verdict = all(m.matched for m in matches)
        else:
            verdict = any(m.matched for m in matches)
        return MatchReport(matches=tuple(matches), mode=policy.mode, verdict=verdict)
