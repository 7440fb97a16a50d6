"""
Document Service - read, write and discover complex documents
JSON documents live on the filesystem; no database required
"""
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from config import DATA_DIR, ALLOWED_EXTENSIONS, SCHEMA_VERSION
from models import (
    CellComplex, Cycle, DocumentInfo, Edge, ErrorCode, Hole, Measurement, Skeleton, SkeletonKind,
    Vertex, VortexCycle, VortexError, VortexNerve
)
from services.report_service import ReportService

logger = logging.getLogger(__name__)

_VERTEX_KINDS = {SkeletonKind.K0, SkeletonKind.K1, SkeletonKind.K2, SkeletonKind.K1_5}


def _parse_error(message: str, **details) -> VortexError:
    return VortexError(ErrorCode.PARSE_ERROR, message, details)


def _require(record: Dict[str, Any], key: str, where: str):
    if not isinstance(record, dict) or key not in record:
        raise _parse_error(f"{where} is missing {key!r}", where=where, key=key)
    return record[key]


def _list(record: Dict[str, Any], key: str, where: str, required: bool = False) -> list:
    value = _require(record, key, where) if required else record.get(key, [])
    if not isinstance(value, list):
        raise _parse_error(f"{where} field {key!r} must be a list", where=where, key=key)
    return value


class DocumentService:
    """Service to convert between complex documents and CellComplex objects"""

    @staticmethod
    def is_allowed_file(filename: str) -> bool:
        """Check if file extension is allowed"""
        ext = Path(filename).suffix.lower()
        return ext in ALLOWED_EXTENSIONS

    @staticmethod
    def parse_document(text: str, source: str = '<string>') -> Dict[str, Any]:
        """
        Parse document text into a raw dict.

        Raises:
            VortexError(PARSE_ERROR) with line and column for invalid JSON,
            or for a missing/unsupported version
        """
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise _parse_error(f"{source}: {e.msg}", source=source, line=e.lineno, column=e.colno)
        if not isinstance(doc, dict):
            raise _parse_error(f"{source}: top level must be an object", source=source)
        version = doc.get('version')
        if version != SCHEMA_VERSION:
            raise _parse_error(f"{source}: unsupported version {version!r}", source=source, version=version)
        return doc

    @staticmethod
    def to_complex(doc: Dict[str, Any]) -> CellComplex:
        """
        Resolve a raw document into a CellComplex.

        References are resolved but no geometric validation is done here;
        run ComplexService.validate_complex for that.
        """
        if not isinstance(doc, dict):
            raise _parse_error('document must be a JSON object')
        vertices = []
        for record in _list(doc, 'vertices', 'document'):
            try:
                x, y = float(_require(record, 'x', 'vertex')), float(_require(record, 'y', 'vertex'))
            except (TypeError, ValueError):
                raise _parse_error('vertex coordinates must be numbers', vertex=record.get('id'))
            vertices.append(Vertex(id=str(_require(record, 'id', 'vertex')), position=(x, y)))
        vertex_index = {v.id: v for v in vertices}

        def vertex(vid: str, owner: str) -> Vertex:
            if vid not in vertex_index:
                raise VortexError(ErrorCode.UNRESOLVED_VERTEX, f"{owner} references unknown vertex {vid!r}",
                                  {'owner': owner, 'vertex': vid})
            return vertex_index[vid]

        def lookup(index: Dict[str, Any], ref: str, what: str, owner: str):
            if ref not in index:
                raise VortexError(ErrorCode.MALFORMED, f"{owner} references unknown {what} {ref!r}",
                                  {'owner': owner, what: ref})
            return index[ref]

        edges = tuple(
            Edge(source=str(_require(r, 'source', 'edge')), target=str(_require(r, 'target', 'edge')))
            for r in _list(doc, 'edges', 'document')
        )

        cycles = []
        for record in _list(doc, 'cycles', 'document'):
            cid = str(_require(record, 'id', 'cycle'))
            ids = _list(record, 'vertices', f"cycle {cid}", required=True)
            cycles.append(Cycle(id=cid, vertices=tuple(vertex(str(v), cid) for v in ids)))
        cycle_index = {c.id: c for c in cycles}

        holes = []
        for record in _list(doc, 'holes', 'document'):
            hid = str(_require(record, 'id', 'hole'))
            boundary = lookup(cycle_index, _require(record, 'boundary', f"hole {hid}"), 'cycle', hid)
            holes.append(Hole(id=hid, boundary=boundary))
        hole_index = {h.id: h for h in holes}

        vortex_cycles = []
        for record in _list(doc, 'vortex_cycles', 'document'):
            vid = str(_require(record, 'id', 'vortex cycle'))
            vortex_cycles.append(VortexCycle(
                id=vid,
                cycles=tuple(lookup(cycle_index, c, 'cycle', vid)
                             for c in _list(record, 'cycles', vid, required=True)),
                holes=tuple(lookup(hole_index, h, 'hole', vid) for h in _list(record, 'holes', vid))
            ))
        vortex_index = {v.id: v for v in vortex_cycles}

        nerves = []
        for record in _list(doc, 'vortex_nerves', 'document'):
            nid = str(_require(record, 'id', 'vortex nerve'))
            nerves.append(VortexNerve(id=nid, underlying=lookup(vortex_index, _require(record, 'vortex', nid),
                                                                'vortex', nid)))
        nerve_index = {n.id: n for n in nerves}

        skeletons = []
        for record in _list(doc, 'skeletons', 'document'):
            sid = str(_require(record, 'id', 'skeleton'))
            raw_kind = record.get('kind')
            try:
                kind = SkeletonKind(raw_kind) if raw_kind is not None else None
            except ValueError:
                raise _parse_error(f"skeleton {sid} has unknown kind {raw_kind!r}", skeleton=sid)
            refs = [str(r) for r in _list(record, 'payload', f"skeleton {sid}", required=True)]
            payload = tuple(DocumentService._resolve_cell(
                ref, kind, sid, vertex_index, cycle_index, vortex_index, nerve_index) for ref in refs)
            skeletons.append(Skeleton(
                id=sid, kind=kind, payload=payload,
                holes=tuple(lookup(hole_index, h, 'hole', sid) for h in _list(record, 'holes', sid))
            ))

        measurements = []
        for record in _list(doc, 'probes', 'document'):
            try:
                value = float(_require(record, 'value', 'probe'))
            except (TypeError, ValueError):
                raise _parse_error('probe value must be a number', probe=record.get('probe'))
            if not math.isfinite(value):
                raise _parse_error('probe value must be finite', probe=record.get('probe'))
            measurements.append(Measurement(
                target=str(_require(record, 'target', 'probe')),
                probe=str(_require(record, 'probe', 'probe')),
                value=value
            ))

        return CellComplex(
            id=str(doc.get('id', 'complex')),
            vertices=tuple(vertices), edges=edges, cycles=tuple(cycles), holes=tuple(holes),
            skeletons=tuple(skeletons), vortex_cycles=tuple(vortex_cycles), vortex_nerves=tuple(nerves),
            measurements=tuple(measurements), description=str(doc.get('description', ''))
        )

    @staticmethod
    def _resolve_cell(ref, kind, owner, vertices, cycles, vortices, nerves):
        if kind in _VERTEX_KINDS:
            candidates = (vertices,)
        elif kind == SkeletonKind.CYCLE:
            candidates = (cycles,)
        elif kind == SkeletonKind.VORTEX:
            candidates = (vortices,)
        elif kind == SkeletonKind.NERVE:
            candidates = (nerves,)
        else:
            candidates = (vertices, cycles, vortices, nerves)
        for index in candidates:
            if ref in index:
                return index[ref]
        if kind in _VERTEX_KINDS:
            raise VortexError(ErrorCode.UNRESOLVED_VERTEX, f"{owner} references unknown vertex {ref!r}",
                              {'owner': owner, 'vertex': ref})
        raise VortexError(ErrorCode.MALFORMED, f"{owner} references unknown cell {ref!r}",
                          {'owner': owner, 'cell': ref})

    @staticmethod
    def to_document(ctx: CellComplex) -> Dict[str, Any]:
        """Emit a complex as a document dict in the fixed key order"""
        doc: Dict[str, Any] = {'version': SCHEMA_VERSION, 'id': ctx.id}
        if ctx.description:
            doc['description'] = ctx.description
        doc['vertices'] = [v.to_dict() for v in ctx.vertices]
        doc['edges'] = [e.to_dict() for e in ctx.edges]
        doc['cycles'] = [c.to_dict() for c in ctx.cycles]
        doc['holes'] = [h.to_dict() for h in ctx.holes]
        doc['skeletons'] = [s.to_dict() for s in ctx.skeletons]
        for record in doc['skeletons']:
            if record['kind'] is None:
                del record['kind']
        doc['vortex_cycles'] = [v.to_dict() for v in ctx.vortex_cycles]
        doc['vortex_nerves'] = [n.to_dict() for n in ctx.vortex_nerves]
        doc['probes'] = [m.to_dict() for m in ctx.measurements]
        return doc

    @staticmethod
    def dumps_complex(ctx: CellComplex) -> str:
        return ReportService.dumps(DocumentService.to_document(ctx))

    @staticmethod
    def loads_complex(text: str, source: str = '<string>') -> CellComplex:
        return DocumentService.to_complex(DocumentService.parse_document(text, source))

    @staticmethod
    def resolve_path(name: Union[str, Path]) -> Path:
        """Path as given if it exists, else looked up in the data directory"""
        path = Path(name)
        if path.exists():
            return path
        candidate = DATA_DIR / path.name
        if candidate.exists():
            return candidate
        if not path.suffix and (DATA_DIR / f"{path.name}.json").exists():
            return DATA_DIR / f"{path.name}.json"
        return path

    @staticmethod
    def load_complex(name: Union[str, Path]) -> CellComplex:
        """Read and resolve a document file"""
        path = DocumentService.resolve_path(name)
        try:
            with open(path, 'r', encoding='utf-8') as f:
                text = f.read()
        except OSError as e:
            raise _parse_error(f"cannot read {path}: {e.strerror}", source=str(path))
        ctx = DocumentService.loads_complex(text, str(path))
        logger.info(f"Loaded {ctx.id} from {path}: {ctx.summary()}")
        return ctx

    @staticmethod
    def save_complex(ctx: CellComplex, path: Union[str, Path]) -> Path:
        path = Path(path)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(DocumentService.dumps_complex(ctx))
        logger.info(f"Document saved: {path}")
        return path

    @staticmethod
    def filepath_to_document(filepath: Path) -> DocumentInfo:
        """Summarize a fixture file; unreadable documents carry their error"""
        info = DocumentInfo(filename=filepath.name, filepath=str(filepath), complex_id=None,
                            file_size=filepath.stat().st_size)
        try:
            ctx = DocumentService.load_complex(filepath)
            info.complex_id = ctx.id
            info.counts = ctx.summary()
        except VortexError as e:
            logger.error(f"Error reading document {filepath}: {e}")
            info.error = e.code.value
        return info

    @staticmethod
    def discover_documents(data_dir: Optional[Path] = None) -> List[DocumentInfo]:
        """Scan data directory and discover all documents, sorted by filename"""
        data_dir = data_dir or DATA_DIR
        documents = []
        if not data_dir.exists():
            return documents

        for filepath in sorted(data_dir.iterdir()):
            if filepath.is_file() and DocumentService.is_allowed_file(filepath.name):
                documents.append(DocumentService.filepath_to_document(filepath))

        logger.info(f"Discovered {len(documents)} documents")
        return documents
