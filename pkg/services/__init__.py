# Services package
from .geometry_service import GeometryService
from .complex_service import ComplexService
from .descriptor_service import DescriptorService
from .proximity_service import ProximityService
from .axiom_service import AxiomService
from .topology_service import TopologyService
from .homology_service import HomologyService
from .document_service import DocumentService
from .report_service import ReportService
from .generator_service import GeneratorService

__all__ = [
    'GeometryService',
    'ComplexService',
    'DescriptorService',
    'ProximityService',
    'AxiomService',
    'TopologyService',
    'HomologyService',
    'DocumentService',
    'ReportService',
    'GeneratorService'
]
