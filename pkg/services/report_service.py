"""
Report Service - deterministic report assembly and emission
JSON with fixed key order and 17-significant-digit floats, or a plain-text rendering
"""
import json
import logging
import math
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional

from config import FLOAT_DIGITS

logger = logging.getLogger(__name__)

INDENT = '  '


def format_float(value: float) -> str:
    """Float text with 17 significant digits; always reads back as the same float"""
    if not math.isfinite(value):
        return 'null'
    text = f"{value:.{FLOAT_DIGITS}g}"
    if '.' not in text and 'e' not in text:
        text += '.0'
    return text


def _plain(value: Any) -> Any:
    if hasattr(value, 'to_dict'):
        return value.to_dict()
    if isinstance(value, Enum):
        return value.value
    return value


class ReportService:
    """Service to build and serialize command reports"""

    @staticmethod
    def build_report(command: str, success: bool, inputs: Dict[str, Any], results: Any,
                     counterexamples: Iterable[Any] = (), seeds: Optional[List[int]] = None,
                     timings: Optional[Dict[str, float]] = None) -> Dict[str, Any]:
        """Report dict in the fixed key order; timings only when given"""
        report = {
            'command': command,
            'success': success,
            'inputs': inputs,
            'results': results,
            'counterexamples': list(counterexamples),
            'seeds': list(seeds or []),
        }
        if timings is not None:
            report['timings'] = timings
        return report

    @staticmethod
    def error_report(command: str, inputs: Dict[str, Any], error: Dict[str, Any]) -> Dict[str, Any]:
        return {'command': command, 'success': False, 'inputs': inputs, 'error': error}

    @staticmethod
    def encode(value: Any, level: int = 0) -> str:
        """Encode to indented JSON; key order is insertion order"""
        value = _plain(value)
        pad = INDENT * (level + 1)
        if value is None:
            return 'null'
        if isinstance(value, bool):
            return 'true' if value else 'false'
        if isinstance(value, int):
            return str(value)
        if isinstance(value, float):
            return format_float(value)
        if isinstance(value, str):
            return json.dumps(value, ensure_ascii=False)
        if isinstance(value, dict):
            if not value:
                return '{}'
            items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {ReportService.encode(v, level + 1)}"
                     for k, v in value.items()]
            return '{\n' + ',\n'.join(items) + '\n' + INDENT * level + '}'
        if isinstance(value, (list, tuple, set, frozenset)):
            if isinstance(value, (set, frozenset)):
                value = sorted(value)
            if not value:
                return '[]'
            items = [pad + ReportService.encode(v, level + 1) for v in value]
            return '[\n' + ',\n'.join(items) + '\n' + INDENT * level + ']'
        if hasattr(value, 'item'):
            # numpy scalars
            return ReportService.encode(value.item(), level)
        raise TypeError(f"cannot encode {type(value).__name__}")

    @staticmethod
    def dumps(value: Any) -> str:
        return ReportService.encode(value) + '\n'

    @staticmethod
    def render_text(report: Dict[str, Any]) -> str:
        """Indented key: value rendering for terminals"""
        lines: List[str] = []

        def walk(value: Any, prefix: str, depth: int):
            value = _plain(value)
            pad = INDENT * depth
            if isinstance(value, dict):
                if prefix:
                    lines.append(f"{pad}{prefix}:")
                    depth += 1
                for k, v in value.items():
                    walk(v, str(k), depth)
            elif isinstance(value, (list, tuple)) and any(isinstance(_plain(v), (dict, list, tuple)) for v in value):
                lines.append(f"{pad}{prefix}:")
                for i, v in enumerate(value):
                    walk(v, f"[{i}]", depth + 1)
            else:
                if isinstance(value, float):
                    text = format_float(value)
                elif isinstance(value, (list, tuple)):
                    text = ', '.join(format_float(v) if isinstance(v, float) else str(_plain(v)) for v in value)
                else:
                    text = str(value)
                lines.append(f"{pad}{prefix}: {text}")

        walk(report, '', 0)
        return '\n'.join(lines) + '\n'

    @staticmethod
    def render(report: Dict[str, Any], fmt: str = 'json') -> str:
        if fmt == 'text':
            return ReportService.render_text(report)
        return ReportService.dumps(report)
