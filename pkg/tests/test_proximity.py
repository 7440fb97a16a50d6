import pytest
from hypothesis import given, settings, strategies as st

from models import ErrorCode, MatchMode, MatchPolicy, Relation, Relator, VortexError
from services.generator_service import GeneratorService
from services.proximity_service import ProximityService

CYCLE_COUNT = MatchPolicy(probes=('cycleCount',))


def test_shared_vertex_makes_skeletons_near(fig3):
    verdict = ProximityService.conn(fig3.entity('A'), fig3.entity('E'))
    assert verdict.near
    assert verdict.smirnov == 0
    assert verdict.witness == 'v6'


def test_disjoint_triangles_are_far(fig3):
    verdict = ProximityService.conn(fig3.entity('E'), fig3.entity('H'))
    assert not verdict.near
    assert verdict.smirnov == 1
    assert verdict.witness is None


def test_cech_rejects_empty(fig3):
    with pytest.raises(VortexError) as exc:
        ProximityService.cech_near(fig3.entity('A'), [])
    assert exc.value.code == ErrorCode.EMPTY_ARGUMENT


def test_conn_with_empty_family_is_far(fig3):
    assert not ProximityService.conn([], fig3.entity('A')).near


def test_nested_nerves_far_under_conn_near_under_sconn(fig4, fig7):
    for ctx in (fig4, fig7):
        b, h = ctx.entity('B'), ctx.entity('H')
        assert not ProximityService.conn(b, h).near
        assert ProximityService.sconn(b, h).near


def test_attached_nerves(fig4):
    a, e = fig4.entity('A'), fig4.entity('E')
    verdict = ProximityService.conn(a, e)
    assert verdict.near and verdict.witness == 'v3'
    # single shared point, no common area
    assert not ProximityService.sconn(a, e).near


def test_overlapping_nerves_are_sconn(fig7):
    verdict = ProximityService.sconn(fig7.entity('A'), fig7.entity('E'))
    assert verdict.near
    assert verdict.witness.startswith('A&E area')


def test_dsconn_on_cycle_count(fig7):
    verdict = ProximityService.dsconn(fig7.entity('A'), fig7.entity('H'), CYCLE_COUNT)
    assert verdict.near
    assert verdict.witness == 'cycleCount'


def test_dsconn_sample_vortices_are_far(load):
    a = load('fig9_a').entity('A')
    b = load('fig9_b').entity('B')
    policy = MatchPolicy(probes=('vertexCount', 'area', 'overlapCount', 'holeCount', 'cycleCount',
                                 'perimeter', 'diameter'), mode=MatchMode.ANY)
    assert not ProximityService.dsconn(a, b, policy).near


def test_relator_reports_each_relation(fig7):
    relator = Relator((Relation.CONN, Relation.DSCONN), CYCLE_COUNT)
    verdicts = ProximityService.evaluate_relator(fig7.entity('A'), fig7.entity('B'), relator)
    assert [v.near for v in verdicts] == [False, True]


@pytest.mark.parametrize("a,b,probe", [
    ('A', 'B', 'cycleCount'), ('A', 'H', 'cycleCount'), ('E', 'B', 'cycleCount'), ('E', 'H', 'cycleCount'),
    ('A2', 'H1', 'vertexCount'), ('A2', 'B2', 'vertexCount'), ('A1', 'H1', 'vertexCount'), ('A1', 'B2', 'vertexCount'),
])
def test_disjoint_pairs_with_matching_descriptions(fig7, a, b, probe):
    relator = Relator((Relation.CONN, Relation.DSCONN), MatchPolicy(probes=(probe,)))
    verdicts = ProximityService.evaluate_relator(fig7.entity(a), fig7.entity(b), relator, fig7)
    assert [v.near for v in verdicts] == [False, True]


@pytest.mark.parametrize("relations,policy,code", [
    ((), None, ErrorCode.MALFORMED),
    ((Relation.CECH,), None, ErrorCode.MALFORMED),
    ((Relation.DSCONN,), None, ErrorCode.MISSING_PROBE),
])
def test_relator_validation(relations, policy, code):
    with pytest.raises(VortexError) as exc:
        Relator(relations, policy)
    assert exc.value.code == code


def test_evaluate_dsconn_needs_policy(fig7):
    with pytest.raises(VortexError) as exc:
        ProximityService.evaluate(Relation.DSCONN, fig7.entity('A'), fig7.entity('B'))
    assert exc.value.code == ErrorCode.MISSING_PROBE


def test_descriptive_intersection_of_hexagons(fig7):
    a2, h1 = fig7.entity('A2'), fig7.entity('H1')
    found = ProximityService.descriptive_intersection([a2], [h1])
    assert [x.id for x in found] == ['A2', 'H1']


def test_descriptive_union_and_closure(fig7):
    universe = [fig7.entity(x) for x in ('A1', 'A2', 'E1', 'E2', 'H1', 'H2')]
    union = ProximityService.descriptive_union([fig7.entity('A2')], [fig7.entity('E2')], universe)
    # six-vertex and four-vertex cycles
    assert sorted(x.id for x in union) == ['A1', 'A2', 'E2', 'H1']
    closure = ProximityService.descriptive_closure([fig7.entity('H2')], universe)
    assert sorted(x.id for x in closure) == ['E1', 'H2']


def test_union_property_on_families(fig4):
    a, b, e, h = (fig4.entity(x) for x in ('A', 'B', 'E', 'H'))
    for relation in (Relation.CONN, Relation.SCONN):
        joined = ProximityService.evaluate(relation, a, [b, e]).near
        separate = ProximityService.evaluate(relation, a, b).near or ProximityService.evaluate(relation, a, e).near
        assert joined == separate
    assert ProximityService.conn([a, h], [e]).near


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=5000), st.integers(min_value=0, max_value=5000))
def test_relations_are_symmetric(s1, s2):
    a, b = GeneratorService.random_polygon(s1), GeneratorService.random_polygon(s2)
    assert ProximityService.conn(a, b).near == ProximityService.conn(b, a).near
    assert ProximityService.sconn(a, b).near == ProximityService.sconn(b, a).near
    assert ProximityService.dsconn(a, b).near == ProximityService.dsconn(b, a).near
    # overlap implies the closed sets meet
    if ProximityService.sconn(a, b).near:
        assert ProximityService.cech_near(a, [a, b]).near
