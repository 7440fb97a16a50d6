"""
Data models for planar cell complexes, vortex cycles and the reports built on them
"""
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Optional, Dict, Any, Tuple, Union


class ErrorCode(str, Enum):
    """Error codes carried by VortexError"""
    UNRESOLVED_VERTEX = 'UNRESOLVED_VERTEX'
    MALFORMED = 'MALFORMED'
    CONCENTRIC = 'CONCENTRIC'
    NO_SHARED_INTERIOR = 'NO_SHARED_INTERIOR'
    TOO_FEW_CYCLES = 'TOO_FEW_CYCLES'
    HOLE_OUTSIDE = 'HOLE_OUTSIDE'
    PROBE_INAPPLICABLE = 'PROBE_INAPPLICABLE'
    MISSING_PROBE = 'MISSING_PROBE'
    EMPTY_ARGUMENT = 'EMPTY_ARGUMENT'
    UNKNOWN_CLUSTER = 'UNKNOWN_CLUSTER'
    NOT_CONVEX = 'NOT_CONVEX'
    RESOLUTION_TOO_LOW = 'RESOLUTION_TOO_LOW'
    PARSE_ERROR = 'PARSE_ERROR'


class VortexError(Exception):
    """Raised by services when an operation's precondition fails"""

    def __init__(self, code: ErrorCode, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(f"{code.value}: {message}")
        self.code = code
        self.message = message
        self.details = details or {}

    def to_dict(self):
        """Convert error to dictionary"""
        return {
            'code': self.code.value,
            'message': self.message,
            'details': self.details
        }


class SkeletonKind(str, Enum):
    """Minimal planar skeletons plus the composite kinds"""
    K0 = 'K0'
    K1 = 'K1'
    K1_5 = 'K1_5'
    K2 = 'K2'
    CYCLE = 'CYCLE'
    VORTEX = 'VORTEX'
    NERVE = 'NERVE'


class Relation(str, Enum):
    """Proximity relations"""
    CECH = 'CECH'
    CONN = 'CONN'
    SCONN = 'SCONN'
    DSCONN = 'DSCONN'


class PointLabel(str, Enum):
    INTERIOR = 'Interior'
    BOUNDARY = 'Boundary'
    EXTERIOR = 'Exterior'


class MatchMode(str, Enum):
    ANY = 'ANY'
    ALL = 'ALL'


class ProbeId(str, Enum):
    """Registered probe functions; values appear verbatim in documents and reports"""
    VERTEX_COUNT = 'vertexCount'
    HOLE_COUNT = 'holeCount'
    CYCLE_COUNT = 'cycleCount'
    OVERLAP_COUNT = 'overlapCount'
    AREA = 'area'
    MAX_AREA = 'maxArea'
    PERIMETER = 'perimeter'
    DIAMETER = 'diameter'
    NERVE_COUNT = 'nerveCount'
    NERVE_CYCLE_COUNT = 'nerveCycleCount'
    PERSISTENCE_DURATION = 'persistenceDuration'


COUNT_PROBES = frozenset({
    ProbeId.VERTEX_COUNT.value, ProbeId.HOLE_COUNT.value, ProbeId.CYCLE_COUNT.value,
    ProbeId.OVERLAP_COUNT.value, ProbeId.NERVE_COUNT.value, ProbeId.NERVE_CYCLE_COUNT.value,
})


# ---------------------------------------------------------------------------
# Cell complex
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Vertex:
    """0-cell with a planar position"""
    id: str
    position: Tuple[float, float]

    @property
    def x(self) -> float:
        return self.position[0]

    @property
    def y(self) -> float:
        return self.position[1]

    def to_dict(self):
        """Convert Vertex to dictionary"""
        return {'id': self.id, 'x': self.x, 'y': self.y}


@dataclass(frozen=True)
class Edge:
    """1-cell oriented source -> target"""
    source: str
    target: str

    def to_dict(self):
        return {'source': self.source, 'target': self.target}


@dataclass(frozen=True)
class Cycle:
    """Oriented closed polygonal 1-cycle; the closing edge is implied"""
    id: str
    vertices: Tuple[Vertex, ...]

    @property
    def vertex_ids(self) -> Tuple[str, ...]:
        return tuple(v.id for v in self.vertices)

    @property
    def coords(self) -> Tuple[Tuple[float, float], ...]:
        return tuple(v.position for v in self.vertices)

    @property
    def edges(self) -> Tuple[Tuple[str, str], ...]:
        ids = self.vertex_ids
        return tuple((ids[i], ids[(i + 1) % len(ids)]) for i in range(len(ids)))

    def to_dict(self):
        """Convert Cycle to dictionary"""
        return {'id': self.id, 'vertices': list(self.vertex_ids)}


@dataclass(frozen=True)
class Hole:
    """2-hole: a boundary cycle whose interior is empty"""
    id: str
    boundary: Cycle

    def to_dict(self):
        return {'id': self.id, 'boundary': self.boundary.id}


@dataclass(frozen=True)
class VortexCycle:
    """Non-concentric, nesting or overlapping 1-cycles sharing an interior"""
    id: str
    cycles: Tuple[Cycle, ...]
    holes: Tuple[Hole, ...] = ()

    def to_dict(self):
        """Convert VortexCycle to dictionary"""
        return {
            'id': self.id,
            'cycles': [c.id for c in self.cycles],
            'holes': [h.id for h in self.holes]
        }


@dataclass(frozen=True)
class VortexNerve:
    """Vortex cycle whose member cycles pairwise intersect"""
    id: str
    underlying: VortexCycle

    @property
    def cycles(self) -> Tuple[Cycle, ...]:
        return self.underlying.cycles

    @property
    def holes(self) -> Tuple[Hole, ...]:
        return self.underlying.holes

    def to_dict(self):
        return {'id': self.id, 'vortex': self.underlying.id}


SkeletonCell = Union[Vertex, Cycle, VortexCycle, VortexNerve]


@dataclass(frozen=True)
class Skeleton:
    """
    Skeleton of a planar cell complex.

    ``payload`` holds vertices for K0/K1/K2/K1_5, or a single cycle,
    vortex cycle or vortex nerve for the composite kinds. ``kind`` is the
    declared kind (None when undeclared); classify_skeleton derives the
    actual one.
    """
    id: str
    kind: Optional[SkeletonKind]
    payload: Tuple[SkeletonCell, ...]
    holes: Tuple[Hole, ...] = ()

    def to_dict(self):
        """Convert Skeleton to dictionary"""
        return {
            'id': self.id,
            'kind': self.kind.value if self.kind else None,
            'payload': [cell.id for cell in self.payload],
            'holes': [h.id for h in self.holes]
        }


@dataclass(frozen=True)
class Measurement:
    """Probe value recorded for an entity instead of computed"""
    target: str
    probe: str
    value: float

    def to_dict(self):
        return {'target': self.target, 'probe': self.probe, 'value': self.value}


@dataclass(frozen=True)
class CellComplex:
    """The ambient finite complex K; collections keep document order"""
    id: str
    vertices: Tuple[Vertex, ...] = ()
    edges: Tuple[Edge, ...] = ()
    cycles: Tuple[Cycle, ...] = ()
    holes: Tuple[Hole, ...] = ()
    skeletons: Tuple[Skeleton, ...] = ()
    vortex_cycles: Tuple[VortexCycle, ...] = ()
    vortex_nerves: Tuple[VortexNerve, ...] = ()
    measurements: Tuple[Measurement, ...] = ()
    description: str = ''

    @cached_property
    def _vertex_index(self) -> Dict[str, Vertex]:
        return {v.id: v for v in self.vertices}

    @cached_property
    def _entity_index(self) -> Dict[str, Any]:
        index: Dict[str, Any] = {}
        for group in (self.cycles, self.holes, self.skeletons, self.vortex_cycles, self.vortex_nerves):
            for entity in group:
                index.setdefault(entity.id, entity)
        return index

    def vertex(self, vertex_id: str) -> Optional[Vertex]:
        return self._vertex_index.get(vertex_id)

    def entity(self, entity_id: str) -> Optional[Any]:
        return self._entity_index.get(entity_id)

    @cached_property
    def hole_boundary_ids(self) -> frozenset:
        return frozenset(h.boundary.id for h in self.holes)

    def measurements_for(self, target_id: str) -> Dict[str, float]:
        """Recorded probe values for one entity"""
        return {m.probe: m.value for m in self.measurements if m.target == target_id}

    def summary(self) -> Dict[str, int]:
        return {
            'vertices': len(self.vertices),
            'edges': len(self.edges),
            'cycles': len(self.cycles),
            'holes': len(self.holes),
            'skeletons': len(self.skeletons),
            'vortex_cycles': len(self.vortex_cycles),
            'vortex_nerves': len(self.vortex_nerves)
        }


@dataclass
class DocumentInfo:
    """Fixture document found in the data directory"""
    filename: str
    filepath: str
    complex_id: Optional[str]
    file_size: int
    counts: Dict[str, int] = field(default_factory=dict)
    error: Optional[str] = None

    def to_dict(self):
        """Convert DocumentInfo to dictionary"""
        return {
            'filename': self.filename,
            'filepath': self.filepath,
            'id': self.complex_id,
            'file_size': self.file_size,
            'counts': self.counts,
            'error': self.error
        }


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Point:
    x: float
    y: float


@dataclass(frozen=True)
class Ball:
    """Open ball B_r(p); only used as the epsilon band of point_location"""
    center: Point
    radius: float


@dataclass(frozen=True)
class ClosedRegion:
    """Filled outer cycle minus its holes"""
    outer: Cycle
    holes: Tuple[Hole, ...] = ()

    @property
    def id(self) -> str:
        return self.outer.id

    def to_dict(self):
        return {'outer': self.outer.id, 'holes': [h.id for h in self.holes]}


# ---------------------------------------------------------------------------
# Reports and descriptors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ValidationReport:
    entity_id: str
    entity_kind: str
    ok: bool
    violations: Tuple[str, ...] = ()

    def to_dict(self):
        return {
            'id': self.entity_id,
            'kind': self.entity_kind,
            'status': 'OK' if self.ok else 'FAIL',
            'violations': list(self.violations)
        }


@dataclass(frozen=True)
class FeatureVector:
    """Image of the description map on one target"""
    target_id: str
    entries: Tuple[Tuple[str, float], ...]

    @property
    def probes(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.entries)

    def get(self, probe: str) -> Optional[float]:
        for name, value in self.entries:
            if name == probe:
                return value
        return None

    def to_dict(self):
        return {'target': self.target_id, 'features': {name: value for name, value in self.entries}}


@dataclass(frozen=True)
class MatchPolicy:
    """
    Matching rule for feature vectors.

    ``tolerances`` gives absolute per-probe tolerances. Probes without an
    entry use 0 for counts and ``relative_tolerance`` (relative to the
    larger magnitude) for geometric probes.
    """
    probes: Tuple[str, ...]
    tolerances: Tuple[Tuple[str, float], ...] = ()
    mode: MatchMode = MatchMode.ANY
    relative_tolerance: Optional[float] = None

    def __post_init__(self):
        if not self.probes:
            raise VortexError(ErrorCode.PROBE_INAPPLICABLE, 'match policy needs at least one probe')
        for _, tol in self.tolerances:
            if tol < 0:
                raise VortexError(ErrorCode.MALFORMED, 'tolerances must be nonnegative')

    def to_dict(self):
        return {
            'probes': list(self.probes),
            'mode': self.mode.value,
            'tolerances': {name: tol for name, tol in self.tolerances}
        }


@dataclass(frozen=True)
class ProbeMatch:
    probe: str
    a: float
    b: float
    matched: bool

    def to_dict(self):
        return {'probe': self.probe, 'a': self.a, 'b': self.b, 'matched': self.matched}


@dataclass(frozen=True)
class MatchReport:
    matches: Tuple[ProbeMatch, ...]
    mode: MatchMode
    verdict: bool

    @property
    def matching_probes(self) -> Tuple[str, ...]:
        return tuple(m.probe for m in self.matches if m.matched)

    def to_dict(self):
        return {
            'mode': self.mode.value,
            'verdict': self.verdict,
            'probes': [m.to_dict() for m in self.matches]
        }


@dataclass(frozen=True)
class ProximityVerdict:
    """Near/far verdict; smirnov is 0 when near, 1 when far"""
    relation: Relation
    near: bool
    witness: Optional[str] = None

    @property
    def smirnov(self) -> int:
        return 0 if self.near else 1

    def to_dict(self):
        return {
            'relation': self.relation.value,
            'near': self.near,
            'smirnov': self.smirnov,
            'witness': self.witness
        }


@dataclass(frozen=True)
class Relator:
    """Non-void collection of connectedness proximity relations"""
    relations: Tuple[Relation, ...]
    policy: Optional[MatchPolicy] = None

    def __post_init__(self):
        if not self.relations:
            raise VortexError(ErrorCode.MALFORMED, 'relator needs at least one relation')
        if Relation.CECH in self.relations:
            raise VortexError(ErrorCode.MALFORMED, 'relators hold connectedness relations only')
        if Relation.DSCONN in self.relations and self.policy is None:
            raise VortexError(ErrorCode.MISSING_PROBE, 'DSCONN in a relator needs a match policy')


@dataclass(frozen=True)
class AxiomCounterexample:
    axiom: str
    sample: int
    seed: int
    a: Tuple[str, ...]
    b: Tuple[str, ...]
    c: Tuple[str, ...] = ()
    detail: str = ''

    def to_dict(self):
        return {
            'axiom': self.axiom,
            'sample': self.sample,
            'seed': self.seed,
            'A': list(self.a),
            'B': list(self.b),
            'C': list(self.c),
            'detail': self.detail
        }


@dataclass(frozen=True)
class AxiomReport:
    universe_id: str
    samples: int
    seed: int
    instances: Tuple[Tuple[str, int], ...]
    counterexamples: Tuple[AxiomCounterexample, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_dict(self):
        return {
            'universe': self.universe_id,
            'samples': self.samples,
            'seed': self.seed,
            'instances': {name: count for name, count in self.instances},
            'passed': self.passed,
            'counterexamples': [c.to_dict() for c in self.counterexamples]
        }


# ---------------------------------------------------------------------------
# Topology
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cluster:
    """Anchored Leader cluster; members kept sorted by id"""
    anchor: str
    members: Tuple[str, ...]
    relation: Relation

    def to_dict(self):
        return {'anchor': self.anchor, 'members': list(self.members), 'relation': self.relation.value}


@dataclass(frozen=True)
class ClusterPair:
    """Materialized intersection and union of two clusters"""
    a: str
    b: str
    intersection: Tuple[str, ...]
    union: Tuple[str, ...]

    def to_dict(self):
        return {'a': self.a, 'b': self.b, 'intersection': list(self.intersection), 'union': list(self.union)}


@dataclass(frozen=True)
class LeaderTopology:
    universe_id: str
    relation: Relation
    clusters: Tuple[Cluster, ...]
    pairs: Tuple[ClusterPair, ...] = ()
    closed: bool = True
    elements: Tuple[Any, ...] = field(default=(), compare=False, repr=False)

    def cluster(self, anchor: str) -> Cluster:
        for cluster in self.clusters:
            if cluster.anchor == anchor:
                return cluster
        raise VortexError(ErrorCode.UNKNOWN_CLUSTER, f'no cluster anchored at {anchor!r}', {'cluster': anchor})

    def to_dict(self):
        return {
            'universe': self.universe_id,
            'relation': self.relation.value,
            'clusters': [c.to_dict() for c in self.clusters],
            'pairs': [p.to_dict() for p in self.pairs],
            'closed': self.closed
        }


@dataclass(frozen=True)
class CWWitness:
    a: str
    b: str
    dimension: int

    def to_dict(self):
        return {'a': self.a, 'b': self.b, 'dimension': self.dimension}


@dataclass(frozen=True)
class CWReport:
    closure_finite: bool
    closure_counts: Tuple[Tuple[str, int], ...]
    weak_topology: bool
    witnesses: Tuple[CWWitness, ...] = ()

    @property
    def passed(self) -> bool:
        return self.closure_finite and self.weak_topology

    def to_dict(self):
        return {
            'closure_finiteness': 'PASS' if self.closure_finite else 'FAIL',
            'closure_counts': {name: count for name, count in self.closure_counts},
            'weak_topology': 'PASS' if self.weak_topology else 'FAIL',
            'witnesses': [w.to_dict() for w in self.witnesses]
        }


# ---------------------------------------------------------------------------
# Homology
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NerveComplex:
    """Abstract simplicial complex on vertex indices 0..n-1 (dimension <= 2)"""
    labels: Tuple[str, ...]
    edges: Tuple[Tuple[int, int], ...] = ()
    triangles: Tuple[Tuple[int, int, int], ...] = ()

    @property
    def vertices(self) -> Tuple[int, ...]:
        return tuple(range(len(self.labels)))

    def to_dict(self):
        return {
            'vertices': list(self.labels),
            'edges': [[self.labels[i], self.labels[j]] for i, j in self.edges],
            'triangles': [[self.labels[i] for i in t] for t in self.triangles]
        }


@dataclass(frozen=True)
class BettiPair:
    b0: int
    b1: int

    def to_dict(self):
        return {'b0': self.b0, 'b1': self.b1}


@dataclass(frozen=True)
class TheoremReport:
    label: str
    nerve: Optional[BettiPair]
    union: Optional[BettiPair]
    passed: bool
    resolution: int
    skipped: Optional[str] = None
    note: str = field(default='Betti-number agreement is a necessary condition of homotopy equivalence, not a certificate.')

    def to_dict(self):
        return {
            'label': self.label,
            'nerve': self.nerve.to_dict() if self.nerve else None,
            'union': self.union.to_dict() if self.union else None,
            'status': 'SKIPPED' if self.skipped else ('PASS' if self.passed else 'FAIL'),
            'skipped': self.skipped,
            'resolution': self.resolution,
            'note': self.note
        }
