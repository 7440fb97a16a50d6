import numpy as np
import pytest

from models import BettiPair, ClosedRegion, ErrorCode, NerveComplex, Relation, VortexError
from services.generator_service import GeneratorService
from services.homology_service import HomologyService, gf2_rank
from services.topology_service import TopologyService


@pytest.mark.parametrize("matrix,rank", [
    (np.eye(3, dtype=np.uint8), 3),
    (np.array([[1, 1], [1, 1]]), 1),
    (np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]]), 2),
    (np.zeros((2, 0)), 0),
])
def test_gf2_rank(matrix, rank):
    assert gf2_rank(matrix) == rank


@pytest.mark.parametrize("edges,triangles,expected", [
    ((), (), BettiPair(3, 0)),
    (((0, 1), (1, 2), (0, 2)), (), BettiPair(1, 1)),
    (((0, 1), (1, 2), (0, 2)), ((0, 1, 2),), BettiPair(1, 0)),
    (((0, 1),), (), BettiPair(2, 0)),
])
def test_betti_of_small_complexes(edges, triangles, expected):
    assert HomologyService.betti(NerveComplex(('a', 'b', 'c'), edges, triangles)) == expected


def test_betti_rejects_missing_face():
    with pytest.raises(VortexError) as exc:
        HomologyService.betti(NerveComplex(('a', 'b', 'c'), ((0, 1), (1, 2)), ((0, 1, 2),)))
    assert exc.value.code == ErrorCode.MALFORMED


def test_hollow_triple_nerve(load):
    family = HomologyService.family_of(load('hollow_triple'))
    nerve = HomologyService.build_nerve_complex(family)
    assert nerve.edges == ((0, 1), (0, 2), (1, 2))
    assert nerve.triangles == ()
    assert nerve.to_dict()['vertices'] == ['R1', 'R2', 'R3']


def test_hollow_triple_agrees(load):
    family = HomologyService.family_of(load('hollow_triple'))
    report = HomologyService.verify_nerve_theorem(family, label='hollow_triple')
    assert report.nerve == BettiPair(1, 1)
    assert report.union == BettiPair(1, 1)
    assert report.passed
    assert report.to_dict()['status'] == 'PASS'


def test_low_resolution_is_rejected(load):
    family = HomologyService.family_of(load('hollow_triple'))
    with pytest.raises(VortexError) as exc:
        HomologyService.betti_of_union(family, resolution=32)
    assert exc.value.code == ErrorCode.RESOLUTION_TOO_LOW


def test_tiny_feature_is_rejected(make_cycle):
    big = make_cycle('big', [(0, 0), (100, 0), (100, 100), (0, 100)])
    tiny = make_cycle('tiny', [(10, 10), (10.05, 10), (10, 10.05)])
    with pytest.raises(VortexError) as exc:
        HomologyService.betti_of_union([ClosedRegion(big), ClosedRegion(tiny)], resolution=64)
    assert exc.value.code == ErrorCode.RESOLUTION_TOO_LOW


def test_non_convex_region_is_rejected(make_cycle):
    ell = make_cycle('L', [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])
    with pytest.raises(VortexError) as exc:
        HomologyService.verify_nerve_theorem([ClosedRegion(ell)])
    assert exc.value.code == ErrorCode.NOT_CONVEX


def test_disjoint_squares(make_cycle):
    a = make_cycle('a', [(0, 0), (1, 0), (1, 1), (0, 1)])
    b = make_cycle('b', [(3, 0), (4, 0), (4, 1), (3, 1)])
    report = HomologyService.verify_nerve_theorem([ClosedRegion(a), ClosedRegion(b)], resolution=128)
    assert report.nerve == report.union == BettiPair(2, 0)


def test_touching_squares_get_no_nerve_edge(make_cycle):
    a = make_cycle('a', [(0, 0), (1, 0), (1, 1), (0, 1)])
    b = make_cycle('b', [(1, 0), (2, 0), (2, 1), (1, 1)])
    nerve = HomologyService.build_nerve_complex([ClosedRegion(a), ClosedRegion(b)])
    assert nerve.edges == ()
    assert HomologyService.betti(nerve) == BettiPair(2, 0)


@pytest.mark.parametrize("seed", range(100))
def test_random_convex_families_agree(seed):
    family = GeneratorService.random_convex_family(seed, size=2 + seed % 2)
    report = HomologyService.verify_nerve_theorem(family, label=f"family {seed}")
    assert report.passed, report.to_dict()


def test_cluster_homotopy_on_overlapping_nerves(fig7):
    topology = TopologyService.build_leader_topology(fig7.vortex_nerves, Relation.SCONN)
    reports = HomologyService.verify_cluster_homotopy(topology)
    assert [r.label for r in reports] == ['cluster A', 'cluster B', 'cluster E', 'cluster H']
    assert all(r.to_dict()['status'] == 'PASS' for r in reports)


def test_cluster_homotopy_skips_non_convex(load):
    fig2 = load('fig2')
    topology = TopologyService.build_leader_topology(fig2.vortex_cycles, Relation.CONN)
    reports = HomologyService.verify_cluster_homotopy(topology)
    assert all(r.skipped == ErrorCode.NOT_CONVEX.value for r in reports)
    assert all(r.to_dict()['status'] == 'SKIPPED' for r in reports)
