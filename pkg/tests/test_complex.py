import pytest

from config import DATA_DIR
from models import (
    CellComplex, Cycle, ErrorCode, Hole, Skeleton, SkeletonKind, Vertex, VortexCycle, VortexError, VortexNerve
)
from services.complex_service import ComplexService
from services.document_service import DocumentService
from services.generator_service import GeneratorService

SQUARE = [(0, 0), (4, 0), (4, 4), (0, 4)]
VALID_FIXTURES = ['fig1', 'fig2', 'fig3', 'fig4', 'fig7', 'fig8_k1', 'fig8_k2', 'fig9_a', 'fig9_b',
                  'hollow_triple']


@pytest.mark.parametrize("coords,violation", [
    ([(0, 0), (1, 1), (1, 0), (0, 1)], 'self-intersection'),
    ([(0, 0), (1, 0)], 'too-few-vertices'),
    ([(0, 0), (1, 0), (2, 0)], 'zero-area'),
    ([(0, 0), (2, 0), (2, 2), (0, 0), (0, 2)], 'repeated-vertex'),
    ([(0, 0), (2, 0), (4, 0), (3, 0), (2, 2)], 'self-intersection'),
])
def test_validate_cycle_violations(make_cycle, coords, violation):
    report = ComplexService.validate_cycle(make_cycle('c', coords))
    assert not report.ok
    assert violation in report.violations


def test_valid_hexagon(fig1):
    report = ComplexService.validate_cycle(fig1.entity('A1'), fig1)
    assert report.ok
    assert report.to_dict()['status'] == 'OK'


def test_unresolved_vertex_raises(make_cycle):
    ctx = CellComplex(id='empty')
    with pytest.raises(VortexError) as exc:
        ComplexService.validate_cycle(make_cycle('c', SQUARE), ctx)
    assert exc.value.code == ErrorCode.UNRESOLVED_VERTEX


def test_classify_vertex_skeletons(make_cycle):
    a, b, c = Vertex('a', (0.0, 0.0)), Vertex('b', (4.0, 0.0)), Vertex('c', (2.0, 3.0))
    assert ComplexService.classify_skeleton(Skeleton('s0', None, (a,))) == SkeletonKind.K0
    assert ComplexService.classify_skeleton(Skeleton('s1', None, (a, b))) == SkeletonKind.K1
    assert ComplexService.classify_skeleton(Skeleton('s2', None, (a, b, c))) == SkeletonKind.K2
    hole = Hole('h', make_cycle('hc', [(1.8, 0.5), (2.2, 0.5), (2.0, 1.0)]))
    assert ComplexService.classify_skeleton(Skeleton('s3', None, (a, b, c), (hole,))) == SkeletonKind.K1_5


def test_classify_composite_skeletons(fig1, fig4, make_cycle):
    assert ComplexService.classify_skeleton(Skeleton('s', None, (make_cycle('c', SQUARE),))) == SkeletonKind.CYCLE
    assert ComplexService.classify_skeleton(Skeleton('s', None, (fig1.entity('A'),))) == SkeletonKind.VORTEX
    assert ComplexService.classify_skeleton(Skeleton('s', None, (fig4.entity('A'),))) == SkeletonKind.NERVE


@pytest.mark.parametrize("payload", [
    (),
    (Vertex('a', (0.0, 0.0)), Vertex('b', (1.0, 0.0)), Vertex('c', (2.0, 0.0))),
    tuple(Vertex(f"v{i}", (float(i), float(i * i))) for i in range(4)),
])
def test_classify_rejects_malformed(payload):
    with pytest.raises(VortexError) as exc:
        ComplexService.classify_skeleton(Skeleton('bad', None, payload))
    assert exc.value.code == ErrorCode.MALFORMED


def test_hole_outside_triangle_is_malformed(make_cycle):
    a, b, c = Vertex('a', (0.0, 0.0)), Vertex('b', (4.0, 0.0)), Vertex('c', (2.0, 3.0))
    hole = Hole('h', make_cycle('hc', [(5, 5), (6, 5), (5.5, 6)]))
    with pytest.raises(VortexError) as exc:
        ComplexService.classify_skeleton(Skeleton('s', None, (a, b, c), (hole,)))
    assert exc.value.code == ErrorCode.MALFORMED


def test_build_vortex_cycle_default_id(fig1):
    a1, a2 = fig1.entity('A1'), fig1.entity('A2')
    vortex = ComplexService.build_vortex_cycle([a1, a2], ctx=fig1)
    assert vortex.id == 'vcyc(A1+A2)'
    assert [c.id for c in vortex.cycles] == ['A1', 'A2']


def test_build_vortex_cycle_errors(fig1, make_cycle):
    a1 = fig1.entity('A1')
    outer = make_cycle('o', SQUARE)
    cases = [
        (([a1], ()), ErrorCode.TOO_FEW_CYCLES),
        (([outer, make_cycle('i', [(1, 1), (3, 1), (3, 3), (1, 3)])], ()), ErrorCode.CONCENTRIC),
        (([outer, make_cycle('far', [(10, 10), (12, 10), (12, 12), (10, 13)])], ()), ErrorCode.NO_SHARED_INTERIOR),
        (([a1, fig1.entity('A2')], (Hole('h', make_cycle('hc', [(20, 20), (21, 20), (20, 21)])),)),
         ErrorCode.HOLE_OUTSIDE),
        (([a1, make_cycle('bow', [(0, 0), (1, 1), (1, 0), (0, 1)])], ()), ErrorCode.MALFORMED),
    ]
    for (cycles, holes), code in cases:
        with pytest.raises(VortexError) as exc:
            ComplexService.build_vortex_cycle(cycles, holes)
        assert exc.value.code == code


def test_detect_nerve(fig1):
    nerve = ComplexService.detect_nerve(fig1.entity('B'))
    assert nerve is not None
    assert nerve.id == 'vNrv(B)'
    assert ComplexService.detect_nerve(fig1.entity('A')) is None


def test_hole_does_not_destroy_cycle(load):
    fig2 = load('fig2')
    e2 = fig2.entity('E2')
    assert ComplexService.hole_destroys_cycle(e2, fig2.entity('E').holes) is False


def test_covering_hole_destroys_cycle(make_cycle):
    cycle = make_cycle('c', SQUARE)
    assert ComplexService.hole_destroys_cycle(cycle, (Hole('h', make_cycle('hc', SQUARE)),)) is True


def test_hole_outside_cycle_raises(make_cycle):
    cycle = make_cycle('c', SQUARE)
    with pytest.raises(VortexError) as exc:
        ComplexService.hole_destroys_cycle(cycle, (Hole('h', make_cycle('hc', [(5, 5), (6, 5), (5, 6)])),))
    assert exc.value.code == ErrorCode.HOLE_OUTSIDE


def test_square_hole_diameter_is_its_diagonal(make_cycle):
    hole = Hole('h', make_cycle('hc', [(1, 1), (3, 1), (3, 3), (1, 3)]))
    assert ComplexService.hole_diameter(hole) == pytest.approx(2 * 2 ** 0.5)


def test_hole_report_lists_containing_cycles(load):
    report = ComplexService.hole_report(load('fig2'))
    assert [entry['hole'] for entry in report] == ['h', 'k']
    h, k = report
    assert h['cycles'] == [{'cycle': 'E1', 'destroyed': False}, {'cycle': 'E2', 'destroyed': False}]
    assert [c['cycle'] for c in k['cycles']] == ['G1', 'G2']
    assert h['diameter'] == pytest.approx(1.345 ** 0.5)
    assert k['diameter'] == pytest.approx(1.585 ** 0.5)


def test_planar_shapes(fig1, make_cycle):
    assert ComplexService.is_planar_shape(fig1.entity('A'))
    assert ComplexService.is_planar_shape(make_cycle('sq', SQUARE))
    assert not ComplexService.is_planar_shape(make_cycle('bow', [(0, 0), (1, 1), (1, 0), (0, 1)]))


@pytest.mark.parametrize("name", VALID_FIXTURES)
def test_fixtures_validate(name):
    ctx = DocumentService.load_complex(DATA_DIR / f"{name}.json")
    failed = [r.to_dict() for r in ComplexService.validate_complex(ctx) if not r.ok]
    assert failed == []


def test_bowtie_fails_validation(load):
    reports = ComplexService.validate_complex(load('bowtie'))
    bow = next(r for r in reports if r.entity_id == 'bow')
    assert not bow.ok
    assert 'self-intersection' in bow.violations


def test_duplicate_ids_and_nerve_mismatch_are_reported(fig1):
    ctx = CellComplex(
        id='dup', vertices=fig1.vertices + fig1.vertices[:1], cycles=fig1.cycles,
        vortex_cycles=fig1.vortex_cycles,
        vortex_nerves=(VortexNerve('nA', fig1.entity('A')),),
    )
    reports = {(r.entity_kind, r.entity_id): r for r in ComplexService.validate_complex(ctx)}
    assert 'duplicate-id' in reports[('vertex', 'v1')].violations
    assert 'not-a-nerve' in reports[('vortex_nerve', 'nA')].violations


def test_kind_mismatch_is_reported(fig3):
    declared = Skeleton('E2', SkeletonKind.K1, fig3.entity('E').payload)
    ctx = CellComplex(id='k', vertices=fig3.vertices, skeletons=(declared,))
    report = ComplexService.validate_complex(ctx)[-1]
    assert not report.ok
    assert report.violations[0].startswith('kind-mismatch')


@pytest.mark.parametrize("seed", range(10))
def test_generated_complexes_validate(seed):
    ctx = GeneratorService.random_complex(seed)
    assert all(r.ok for r in ComplexService.validate_complex(ctx))
    assert 3 <= len(ctx.skeletons) <= 25


def test_vortex_cycle_members_keep_order(fig1):
    vortex = fig1.entity('B')
    assert isinstance(vortex, VortexCycle)
    assert [c.id for c in vortex.cycles] == ['B1', 'B2']
    assert all(isinstance(c, Cycle) for c in vortex.cycles)
