import json

import pytest

from config import DATA_DIR
from models import ErrorCode, VortexError
from services.document_service import DocumentService
from services.generator_service import GeneratorService
from services.report_service import ReportService, format_float

MINIMAL = {
    'version': '1', 'id': 'tri',
    'vertices': [{'id': 'a', 'x': 0, 'y': 0}, {'id': 'b', 'x': 1, 'y': 0}, {'id': 'c', 'x': 0, 'y': 1}],
    'cycles': [{'id': 'T', 'vertices': ['a', 'b', 'c']}],
}


def document(**changes):
    doc = json.loads(json.dumps(MINIMAL))
    doc.update(changes)
    return json.dumps(doc)


def test_parse_error_has_position():
    with pytest.raises(VortexError) as exc:
        DocumentService.loads_complex('{\n  "version": "1",\n  oops\n}')
    assert exc.value.code == ErrorCode.PARSE_ERROR
    assert exc.value.details['line'] == 3


@pytest.mark.parametrize("text", ['[]', document(version='2'), json.dumps({'id': 'x'})])
def test_bad_top_level_or_version(text):
    with pytest.raises(VortexError) as exc:
        DocumentService.loads_complex(text)
    assert exc.value.code == ErrorCode.PARSE_ERROR


@pytest.mark.parametrize("changes,code", [
    ({'cycles': [{'id': 'T', 'vertices': ['a', 'b', 'zz']}]}, ErrorCode.UNRESOLVED_VERTEX),
    ({'holes': [{'id': 'h', 'boundary': 'nope'}]}, ErrorCode.MALFORMED),
    ({'vortex_cycles': [{'id': 'v', 'cycles': ['T', 'U']}]}, ErrorCode.MALFORMED),
    ({'skeletons': [{'id': 's', 'kind': 'K9', 'payload': ['a']}]}, ErrorCode.PARSE_ERROR),
    ({'skeletons': [{'id': 's', 'kind': 'K0', 'payload': ['zz']}]}, ErrorCode.UNRESOLVED_VERTEX),
    ({'vertices': [{'id': 'a', 'x': 'left', 'y': 0}]}, ErrorCode.PARSE_ERROR),
    ({'probes': [{'target': 'tri', 'probe': 'area'}]}, ErrorCode.PARSE_ERROR),
    ({'cycles': [{'id': 'T', 'vertices': 5}]}, ErrorCode.PARSE_ERROR),
    ({'cycles': [{'id': 'T', 'vertices': 'abc'}]}, ErrorCode.PARSE_ERROR),
    ({'vortex_cycles': [{'id': 'v', 'cycles': 'T'}]}, ErrorCode.PARSE_ERROR),
    ({'skeletons': [{'id': 's', 'payload': 'a'}]}, ErrorCode.PARSE_ERROR),
    ({'holes': {'id': 'h'}}, ErrorCode.PARSE_ERROR),
])
def test_reference_errors(changes, code):
    with pytest.raises(VortexError) as exc:
        DocumentService.loads_complex(document(**changes))
    assert exc.value.code == code


def test_undeclared_kind_is_resolved_from_payload():
    ctx = DocumentService.loads_complex(document(skeletons=[{'id': 's', 'payload': ['T']}]))
    skeleton = ctx.entity('s')
    assert skeleton.kind is None
    assert skeleton.payload[0].id == 'T'
    assert 'kind' not in DocumentService.to_document(ctx)['skeletons'][0]


@pytest.mark.parametrize("name", sorted(p.stem for p in DATA_DIR.glob('*.json')))
def test_fixture_documents_survive_a_reload(name):
    with open(DATA_DIR / f"{name}.json", encoding='utf-8') as f:
        raw = json.load(f)
    assert DocumentService.to_document(DocumentService.to_complex(raw)) == raw


@pytest.mark.parametrize("seed", range(200))
def test_generated_documents_survive_a_reload(seed):
    ctx = GeneratorService.random_complex(seed)
    text = DocumentService.dumps_complex(ctx)
    assert DocumentService.dumps_complex(DocumentService.loads_complex(text)) == text
    doc = DocumentService.to_document(ctx)
    assert DocumentService.to_document(DocumentService.to_complex(doc)) == doc


def test_save_and_load(tmp_path, fig1):
    path = DocumentService.save_complex(fig1, tmp_path / 'copy.json')
    assert DocumentService.load_complex(path) == fig1


def test_resolve_path_falls_back_to_data_dir():
    assert DocumentService.resolve_path('fig1') == DATA_DIR / 'fig1.json'
    assert DocumentService.resolve_path('fig1.json') == DATA_DIR / 'fig1.json'


def test_missing_file_is_a_parse_error(tmp_path):
    with pytest.raises(VortexError) as exc:
        DocumentService.load_complex(tmp_path / 'absent.json')
    assert exc.value.code == ErrorCode.PARSE_ERROR


def test_discover_documents(tmp_path):
    (tmp_path / 'good.json').write_text(document(), encoding='utf-8')
    (tmp_path / 'bad.json').write_text('{', encoding='utf-8')
    (tmp_path / 'notes.md').write_text('# notes', encoding='utf-8')
    found = DocumentService.discover_documents(tmp_path)
    assert [d.filename for d in found] == ['bad.json', 'good.json']
    assert found[0].error == 'PARSE_ERROR'
    assert found[1].complex_id == 'tri'
    assert found[1].counts['cycles'] == 1


def test_golden_fixtures_are_discovered():
    found = DocumentService.discover_documents()
    assert len(found) == 11
    assert all(d.error is None for d in found)


@pytest.mark.parametrize("value,text", [
    (2.0, '2.0'),
    (0.1, '0.10000000000000001'),
    (1e300, '1.0000000000000001e+300'),
    (float('nan'), 'null'),
    (float('inf'), 'null'),
])
def test_format_float(value, text):
    assert format_float(value) == text


def test_report_key_order():
    report = ReportService.build_report('x', True, {'b': 1, 'a': 2}, {'z': [1.5, None]}, seeds=[4],
                                        timings={'total_s': 0.5})
    text = ReportService.dumps(report)
    assert list(json.loads(text)) == ['command', 'success', 'inputs', 'results', 'counterexamples', 'seeds',
                                      'timings']
    assert text.index('"b"') < text.index('"a"')
    assert 'timings' not in ReportService.build_report('x', True, {}, {})


def test_error_report_shape():
    error = VortexError(ErrorCode.MISSING_PROBE, 'no probe')
    report = ReportService.error_report('axioms', {'path': 'p'}, error.to_dict())
    assert list(report) == ['command', 'success', 'inputs', 'error']
    assert report['error']['code'] == 'MISSING_PROBE'
