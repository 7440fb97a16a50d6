import pytest

from config import DEFAULT_SAMPLES
from models import CellComplex, ErrorCode, MatchPolicy, ProximityVerdict, Relation, VortexError
from services.axiom_service import AXIOMS, AxiomService, universe_elements
from services.generator_service import GeneratorService
from services.proximity_service import ProximityService


@pytest.mark.parametrize("name", ['fig1', 'fig3', 'fig4', 'fig7', 'fig9_b'])
def test_fixtures_satisfy_axioms(load, name):
    report = AxiomService.check_axioms(load(name), samples=100, seed=7)
    assert report.passed, [c.to_dict() for c in report.counterexamples[:5]]


@pytest.mark.parametrize("seed", range(20))
def test_generated_complexes_satisfy_axioms(seed):
    ctx = GeneratorService.random_complex(seed)
    report = AxiomService.check_axioms(ctx, samples=DEFAULT_SAMPLES, seed=seed)
    assert report.passed, [c.to_dict() for c in report.counterexamples[:5]]
    counts = dict(report.instances)
    assert counts['conn.symmetry'] == DEFAULT_SAMPLES
    assert counts['tables.consistent'] > 0


def test_cycle_count_policy(fig7):
    report = AxiomService.check_axioms(fig7, samples=50, seed=1, policy=MatchPolicy(probes=('cycleCount',)))
    assert report.passed


def test_report_is_deterministic(fig4):
    first = AxiomService.check_axioms(fig4, samples=30, seed=11)
    second = AxiomService.check_axioms(fig4, samples=30, seed=11)
    assert first == second
    assert first.to_dict()['instances'].keys() == set(AXIOMS)


def test_nerve_axioms_are_exercised(fig7):
    counts = dict(AxiomService.check_axioms(fig7, samples=40, seed=2).instances)
    assert counts['nerve.shared-cycle-in-dcap'] == 40
    assert counts['nerve.shared-cycle-implies-dsconn'] == 40


def test_universe_prefers_skeletons(fig3, fig4):
    assert [e.id for e in universe_elements(fig3)] == ['A', 'E', 'H']
    assert [e.id for e in universe_elements(fig4)] == ['A', 'E', 'B', 'H', 'vcycA', 'vcycE', 'vcycB', 'vcycH']


def test_empty_universe_passes():
    report = AxiomService.check_axioms(CellComplex(id='empty'), samples=10)
    assert report.passed
    assert all(count == 0 for _, count in report.instances)


def test_samples_must_be_positive(fig4):
    with pytest.raises(VortexError) as exc:
        AxiomService.check_axioms(fig4, samples=0)
    assert exc.value.code == ErrorCode.MALFORMED


def _failed(report):
    return {c.axiom for c in report.counterexamples}


def test_conn_that_ignores_geometry_is_caught(fig3, monkeypatch):
    monkeypatch.setattr(ProximityService, 'conn', staticmethod(lambda a, b: ProximityVerdict(Relation.CONN, True)))
    report = AxiomService.check_axioms(fig3, samples=200, seed=3)
    assert {'conn.far-from-empty', 'conn.intersection-iff', 'conn.implies-intersection',
            'smirnov.empty-far'} <= _failed(report)


def test_sconn_that_ignores_overlap_is_caught(fig3, monkeypatch):
    monkeypatch.setattr(ProximityService, 'sconn',
                        staticmethod(lambda a, b, eps_area=0.0: ProximityVerdict(Relation.SCONN, True)))
    report = AxiomService.check_axioms(fig3, samples=200, seed=3)
    assert {'sconn.strong-overlap', 'sconn.disjoint-far', 'smirnov.empty-far'} <= _failed(report)


def test_cech_that_accepts_empty_sets_is_caught(fig3, monkeypatch):
    monkeypatch.setattr(ProximityService, 'cech_near',
                        staticmethod(lambda a, b: ProximityVerdict(Relation.CECH, False)))
    report = AxiomService.check_axioms(fig3, samples=50, seed=3)
    assert {'cech.far-from-empty', 'cech.intersection'} <= _failed(report)


def test_nerve_checks_use_the_report_policy(fig7):
    by_area = AxiomService.check_axioms(fig7, samples=20, seed=2, policy=MatchPolicy(probes=('area',)))
    assert dict(by_area.instances)['nerve.shared-cycle-in-dcap'] == 20
    assert 'nerve.shared-cycle-in-dcap' not in _failed(by_area)

    # cycleCount does not apply to member 1-cycles
    by_cycles = AxiomService.check_axioms(fig7, samples=20, seed=2, policy=MatchPolicy(probes=('cycleCount',)))
    assert dict(by_cycles.instances)['nerve.shared-cycle-in-dcap'] == 0
