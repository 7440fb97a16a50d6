"""
Shared fixtures: golden documents from the data directory and a CLI runner
"""
import pytest
from click.testing import CliRunner

from app import create_app
from config import DATA_DIR
from models import Cycle, Vertex
from services.document_service import DocumentService


@pytest.fixture
def load():
    """Load a golden document by stem, e.g. load('fig4')"""
    def _load(name: str):
        return DocumentService.load_complex(DATA_DIR / f"{name}.json")
    return _load


@pytest.fixture
def fig1(load):
    return load('fig1')


@pytest.fixture
def fig3(load):
    return load('fig3')


@pytest.fixture
def fig4(load):
    return load('fig4')


@pytest.fixture
def fig7(load):
    return load('fig7')


@pytest.fixture
def make_cycle():
    """Cycle with generated vertex ids from a coordinate list"""
    def _make(cid, coords, prefix=None):
        prefix = prefix or cid
        return Cycle(id=cid, vertices=tuple(Vertex(f"{prefix}_{i}", (float(x), float(y)))
                                            for i, (x, y) in enumerate(coords)))
    return _make


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def cli():
    return create_app()
