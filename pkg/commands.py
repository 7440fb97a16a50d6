"""
CLI Commands - command handlers for vortexprox
"""
import logging
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import click

from config import DEFAULT_RESOLUTION, DEFAULT_SAMPLES, DEFAULT_SEED
from models import ErrorCode, MatchMode, MatchPolicy, ProbeId, Relation, VortexError
from services.axiom_service import AxiomService
from services.complex_service import ComplexService
from services.descriptor_service import DescriptorService, KNOWN_PROBES
from services.document_service import DocumentService
from services.generator_service import GeneratorService
from services.homology_service import HomologyService
from services.proximity_service import DEFAULT_POLICY, ProximityService
from services.report_service import ReportService
from services.topology_service import TopologyService, UNIVERSE_CHOICES

logger = logging.getLogger(__name__)

# (success, results, counterexamples, seeds)
Outcome = Tuple[bool, Any, List[Any], List[int]]


def parse_probes(text: Optional[str]) -> Optional[Tuple[str, ...]]:
    if text is None:
        return None
    probes = tuple(p.strip() for p in text.split(',') if p.strip())
    for probe in probes:
        if probe not in KNOWN_PROBES:
            raise VortexError(
                ErrorCode.PROBE_INAPPLICABLE, f"unknown probe {probe!r}", {'probe': probe})
    return probes


def make_policy(probes: Optional[Tuple[str, ...]], mode: str) -> Optional[MatchPolicy]:
    if not probes:
        return None
    return MatchPolicy(probes=probes, mode=MatchMode(mode.upper()))


def run_command(command: str, inputs: Dict[str, Any], fmt: str, timings: bool,
                body: Callable[[], Outcome]):
    """Run a command body and emit its report; exit status 0 iff the report succeeds"""
    ctx = click.get_current_context()
    started = time.perf_counter()
    try:
        success, results, counterexamples, seeds = body()
        elapsed = {'total_s': time.perf_counter() - started} if timings else None
        report = ReportService.build_report(command, success, inputs, results, counterexamples, seeds, elapsed)
    except VortexError as e:
        logger.error(f"Error in {command}: {e}")
        success = False
        report = ReportService.error_report(command, inputs, e.to_dict())
    except Exception as e:
        logger.error(f"Unexpected error in {command}: {e}")
        success = False
        report = ReportService.error_report(command, inputs, {'code': 'INTERNAL', 'message': str(e), 'details': {}})
    click.echo(ReportService.render(report, fmt), nl=False)
    ctx.exit(0 if success else 1)


def register_commands(cli: click.Group):
    """Register all commands"""

    format_option = click.option('--format', 'fmt', type=click.Choice(['json', 'text']), default='json',
                                 show_default=True, help='Report format')
    timings_option = click.option('--timings', is_flag=True, help='Include wall-clock timings in the report')
    probes_option = click.option('--probes', default=None, help='Comma-separated probe names')
    mode_option = click.option('--mode', type=click.Choice(['any', 'all'], case_sensitive=False), default='any',
                               show_default=True, help='Probe match mode')

    @cli.command('validate')
    @click.argument('path')
    @format_option
    @timings_option
    def validate(path, fmt, timings):
        """Parse a document and run every structural validation"""
        def body() -> Outcome:
            ctx = DocumentService.load_complex(path)
            reports = ComplexService.validate_complex(ctx)
            results = {
                'id': ctx.id,
                'entities': [r.to_dict() for r in reports],
                'holes': ComplexService.hole_report(ctx),
            }
            return all(r.ok for r in reports), results, [], []
        run_command('validate', {'path': path}, fmt, timings, body)

    @cli.command('features')
    @click.argument('path')
    @probes_option
    @format_option
    @timings_option
    def features(path, probes, fmt, timings):
        """Emit a feature vector per cycle, vortex cycle, vortex nerve and the complex"""
        def body() -> Outcome:
            names = parse_probes(probes) or (ProbeId.VERTEX_COUNT.value,)
            ctx = DocumentService.load_complex(path)
            targets = [c for c in ctx.cycles if c.id not in ctx.hole_boundary_ids]
            targets += list(ctx.vortex_cycles) + list(ctx.vortex_nerves) + [ctx]
            entries = []
            for target in targets:
                values = {}
                for probe in names:
                    try:
                        values[probe] = DescriptorService.describe(target, (probe,), ctx).get(probe)
                    except VortexError as e:
                        values[probe] = {'error': e.code.value}
                        logger.debug(f"{target.id}: {e.message}")
                entries.append({'target': target.id, 'features': values})
            return True, {'id': ctx.id, 'probes': list(names), 'vectors': entries}, [], []
        run_command('features', {'path': path, 'probes': probes}, fmt, timings, body)

    @cli.command('compare')
    @click.argument('path_a')
    @click.argument('path_b')
    @probes_option
    @mode_option
    @click.option('--level', type=click.Choice(['complex', 'vortex', 'nerve', 'cycle']), default='complex',
                  show_default=True, help='Entities compared across the two documents')
    @format_option
    @timings_option
    def compare(path_a, path_b, probes, mode, level, fmt, timings):
        """Pairwise dsconn matrix across entities of two documents"""
        def body() -> Outcome:
            policy = make_policy(parse_probes(probes), mode) or DEFAULT_POLICY
            ctx_a = DocumentService.load_complex(path_a)
            ctx_b = DocumentService.load_complex(path_b)
            pick = {
                'complex': lambda c: [c],
                'vortex': lambda c: list(c.vortex_cycles),
                'nerve': lambda c: list(c.vortex_nerves),
                'cycle': lambda c: [x for x in c.cycles if x.id not in c.hole_boundary_ids],
            }[level]
            rows = []
            for a in pick(ctx_a):
                for b in pick(ctx_b):
                    fa = DescriptorService.describe(a, policy.probes, ctx_a)
                    fb = DescriptorService.describe(b, policy.probes, ctx_b)
                    match = DescriptorService.features_match(fa, fb, policy)
                    near = match.verdict
                    rows.append({'a': a.id, 'b': b.id, 'near': near, 'smirnov': 0 if near else 1,
                                 'matching': list(match.matching_probes), 'match': match.to_dict()})
            return True, {'level': level, 'policy': policy.to_dict(), 'pairs': rows}, [], []
        run_command('compare', {'path_a': path_a, 'path_b': path_b, 'probes': probes, 'mode': mode,
                                'level': level}, fmt, timings, body)

    @cli.command('nerves')
    @click.argument('path')
    @format_option
    @timings_option
    def nerves(path, fmt, timings):
        """Detect vortex nerves among the document's vortex cycles"""
        def body() -> Outcome:
            ctx = DocumentService.load_complex(path)
            found = []
            for vortex in ctx.vortex_cycles:
                nerve = ComplexService.detect_nerve(vortex)
                witnesses = []
                if nerve is not None:
                    for i, c1 in enumerate(vortex.cycles):
                        for c2 in vortex.cycles[i + 1:]:
                            witnesses.append({'cycles': [c1.id, c2.id],
                                              'witness': ProximityService.conn(c1, c2).witness})
                found.append({'vortex': vortex.id, 'nerve': nerve is not None,
                              'cycles': [c.id for c in vortex.cycles], 'witnesses': witnesses})
            return True, {'id': ctx.id, 'vortex_cycles': found,
                          'nerves': [f['vortex'] for f in found if f['nerve']]}, [], []
        run_command('nerves', {'path': path}, fmt, timings, body)

    @cli.command('clusters')
    @click.argument('path')
    @click.option('--relation', type=click.Choice(['conn', 'sconn', 'dsconn'], case_sensitive=False),
                  default='conn', show_default=True)
    @click.option('--universe', type=click.Choice(list(UNIVERSE_CHOICES)), default='auto', show_default=True,
                  help='auto: skeletons if any, else vortex nerves, else vortex cycles')
    @probes_option
    @mode_option
    @format_option
    @timings_option
    def clusters(path, relation, universe, probes, mode, fmt, timings):
        """Leader clusters plus a CW check per cluster"""
        def body() -> Outcome:
            ctx = DocumentService.load_complex(path)
            topology = TopologyService.build_leader_topology(
                TopologyService.universe_of(ctx, universe), Relation(relation.upper()),
                make_policy(parse_probes(probes), mode), ctx, universe_id=ctx.id
            )
            cw = {c.anchor: TopologyService.cluster_cw(topology, c.anchor) for c in topology.clusters}
            results = topology.to_dict()
            results['cw'] = {anchor: report.to_dict() for anchor, report in cw.items()}
            return all(r.passed for r in cw.values()), results, [], []
        run_command('clusters', {'path': path, 'relation': relation, 'universe': universe, 'probes': probes,
                                 'mode': mode}, fmt, timings, body)

    @cli.command('betti')
    @click.argument('path')
    @click.option('--resolution', type=int, default=DEFAULT_RESOLUTION, show_default=True)
    @format_option
    @timings_option
    def betti(path, resolution, fmt, timings):
        """Betti numbers of the nerve and of the union of the document's cycles"""
        def body() -> Outcome:
            ctx = DocumentService.load_complex(path)
            family = HomologyService.family_of(ctx)
            nerve = HomologyService.build_nerve_complex(family)
            results = {
                'family': [r.id for r in family],
                'nerve': nerve.to_dict(),
                'nerve_betti': HomologyService.betti(nerve).to_dict(),
                'union_betti': HomologyService.betti_of_union(family, resolution).to_dict(),
            }
            return True, results, [], []
        run_command('betti', {'path': path, 'resolution': resolution}, fmt, timings, body)

    @cli.command('nerve-theorem')
    @click.argument('path')
    @click.option('--resolution', type=int, default=DEFAULT_RESOLUTION, show_default=True)
    @click.option('--clusters', 'per_cluster', is_flag=True, help='Check each Leader cluster instead')
    @click.option('--relation', type=click.Choice(['conn', 'sconn'], case_sensitive=False), default='sconn',
                  show_default=True, help='Cluster relation with --clusters')
    @format_option
    @timings_option
    def nerve_theorem(path, resolution, per_cluster, relation, fmt, timings):
        """Compare nerve and union Betti numbers; regions that only touch share no nerve edge"""
        def body() -> Outcome:
            ctx = DocumentService.load_complex(path)
            if per_cluster:
                topology = TopologyService.build_leader_topology(
                    TopologyService.universe_of(ctx), Relation(relation.upper()), ctx=ctx, universe_id=ctx.id)
                reports = HomologyService.verify_cluster_homotopy(topology, resolution)
                checked = [r for r in reports if not r.skipped]
                return all(r.passed for r in checked), {'clusters': [r.to_dict() for r in reports]}, [], []
            report = HomologyService.verify_nerve_theorem(HomologyService.family_of(ctx), resolution, ctx.id)
            return report.passed, report.to_dict(), [], []
        run_command('nerve-theorem', {'path': path, 'resolution': resolution, 'clusters': per_cluster},
                    fmt, timings, body)

    @cli.command('axioms')
    @click.argument('path')
    @click.option('--samples', type=int, default=DEFAULT_SAMPLES, show_default=True)
    @click.option('--seed', type=int, default=DEFAULT_SEED, show_default=True)
    @probes_option
    @mode_option
    @format_option
    @timings_option
    def axioms(path, samples, seed, probes, mode, fmt, timings):
        """Fuzz the proximity axioms over random subset triples"""
        def body() -> Outcome:
            ctx = DocumentService.load_complex(path)
            report = AxiomService.check_axioms(ctx, samples, seed, make_policy(parse_probes(probes), mode))
            results = report.to_dict()
            counterexamples = results.pop('counterexamples')
            return report.passed, results, counterexamples, [seed]
        run_command('axioms', {'path': path, 'samples': samples, 'seed': seed, 'probes': probes, 'mode': mode},
                    fmt, timings, body)

    @cli.command('generate')
    @click.option('--seed', type=int, default=DEFAULT_SEED, show_default=True)
    @click.option('--max-skeletons', type=int, default=25, show_default=True)
    @click.option('--out', type=click.Path(dir_okay=False), default=None, help='Write the document here')
    @format_option
    def generate(seed, max_skeletons, out, fmt):
        """Emit a random valid document"""
        if out is None:
            try:
                ctx = GeneratorService.random_complex(seed, max_skeletons)
            except Exception as e:
                logger.error(f"Error generating document: {e}")
                raise click.ClickException(str(e))
            click.echo(DocumentService.dumps_complex(ctx), nl=False)
            return

        def body() -> Outcome:
            ctx = GeneratorService.random_complex(seed, max_skeletons)
            written = DocumentService.save_complex(ctx, Path(out))
            return True, {'id': ctx.id, 'path': str(written), 'counts': ctx.summary()}, [], [seed]
        run_command('generate', {'seed': seed, 'max_skeletons': max_skeletons, 'out': out}, fmt, False, body)

    @cli.command('list')
    @format_option
    def list_documents(fmt):
        """List fixture documents in the data directory"""
        def body() -> Outcome:
            documents = DocumentService.discover_documents()
            return True, {'documents': [d.to_dict() for d in documents]}, [], []
        run_command('list', {}, fmt, False, body)
