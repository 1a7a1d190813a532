"""
Report documents: assembly, semantic diffs and CSV export of probe statistics
"""
import csv
import json
import logging
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from utils.exceptions import SchemaMismatch
from utils.rational import renormlab_setting
from utils.validators import FRACTION_PATTERN

logger = logging.getLogger(__name__)

IGNORED_SECTIONS = ('meta',)


def build_report(config, results, status):
    """Everything except meta.generated_at is a function of the config and seed"""
    return {
        'schema_version': renormlab_setting('SCHEMA_VERSION'),
        'tool_version': renormlab_setting('TOOL_VERSION'),
        'config': config,
        'status': status,
        'results': results,
        'meta': {'generated_at': datetime.now(timezone.utc).isoformat()},
    }


def dump_report(report) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=str) + '\n'


def write_report(report, path=None) -> str:
    text = dump_report(report)
    if path:
        Path(path).write_text(text)
        logger.info(f'Report written to {path}')
    return text


def load_report(path):
    return json.loads(Path(path).read_text())


# Diffs

def _rational(value):
    if isinstance(value, str) and FRACTION_PATTERN.match(value):
        return Fraction(value.replace(' ', ''))
    return None


def _is_norm_value(node):
    return isinstance(node, dict) and 'value' in node and 'error_radius' in node


def _compare_values(path, a, b, entries):
    va, vb = _rational(a['value']), _rational(b['value'])
    ra, rb = _rational(a['error_radius']), _rational(b['error_radius'])
    if None in (va, vb, ra, rb):
        if a != b:
            entries.append({'path': path, 'kind': 'changed', 'a': a, 'b': b})
        return
    if va == vb and ra == rb:
        return
    kind = 'within-certified-error' if abs(va - vb) <= max(ra, rb) else 'changed'
    entries.append({'path': path, 'kind': kind, 'a': a['value'], 'b': b['value']})


def _walk(path, a, b, entries):
    if _is_norm_value(a) and _is_norm_value(b):
        _compare_values(path, a, b, entries)
        return
    if isinstance(a, dict) and isinstance(b, dict):
        for key in sorted(set(a) | set(b)):
            child = f'{path}.{key}' if path else str(key)
            if key not in b:
                entries.append({'path': child, 'kind': 'removed', 'a': a[key], 'b': None})
            elif key not in a:
                entries.append({'path': child, 'kind': 'added', 'a': None, 'b': b[key]})
            else:
                _walk(child, a[key], b[key], entries)
        return
    if isinstance(a, list) and isinstance(b, list) and len(a) == len(b):
        for position, (x, y) in enumerate(zip(a, b)):
            _walk(f'{path}[{position}]', x, y, entries)
        return
    ra, rb = _rational(a), _rational(b)
    if ra is not None and rb is not None:
        if ra != rb:
            entries.append({'path': path, 'kind': 'changed', 'a': a, 'b': b})
        return
    if a != b:
        entries.append({'path': path, 'kind': 'changed', 'a': a, 'b': b})


def report_diff(a, b):
    """
    Semantic diff of two report documents. Timestamps are ignored, rationals
    compare exactly and norm values that moved by no more than their
    certified radius are marked "within-certified-error". Entries under a
    "violations" or "witnesses" key are flagged as witness changes.
    """
    if a.get('schema_version') != b.get('schema_version'):
        raise SchemaMismatch(
            f'Schema versions differ: {a.get("schema_version")} vs {b.get("schema_version")}',
            witness=[a.get('schema_version'), b.get('schema_version')],
        )
    entries = []
    for key in sorted((set(a) | set(b)) - set(IGNORED_SECTIONS)):
        _walk(key, a.get(key), b.get(key), entries)
    for entry in entries:
        entry['witness'] = '.violations' in entry['path'] or '.witnesses' in entry['path']
    return entries


def format_diff(entries) -> str:
    lines = []
    for entry in entries:
        marker = ' [witness]' if entry['witness'] else ''
        lines.append(f'{entry["kind"]}{marker} {entry["path"]}: {json.dumps(entry["a"])} -> {json.dumps(entry["b"])}')
    return '\n'.join(lines)


# CSV

def statistics_rows(probe_document):
    """Scalar statistics as (probe, seed, key, value) rows; list-of-dict statistics flatten per row"""
    rows = []
    probe, seed = probe_document.get('probe'), probe_document.get('seed')
    for key, value in sorted(probe_document.get('statistics', {}).items()):
        if isinstance(value, list) and value and all(isinstance(item, dict) for item in value):
            for position, item in enumerate(value):
                for field, entry in sorted(item.items()):
                    rows.append({'probe': probe, 'seed': seed, 'key': f'{key}[{position}].{field}', 'value': entry})
        elif isinstance(value, dict):
            for field, entry in sorted(value.items()):
                rows.append({'probe': probe, 'seed': seed, 'key': f'{key}.{field}', 'value': entry})
        else:
            rows.append({'probe': probe, 'seed': seed, 'key': key, 'value': value})
    return rows


def write_csv(probe_documents, path):
    rows = [row for document in probe_documents for row in statistics_rows(document)]
    with open(path, 'w', newline='') as handle:
        writer = csv.DictWriter(handle, fieldnames=('probe', 'seed', 'key', 'value'))
        writer.writeheader()
        writer.writerows(rows)
    logger.info(f'Wrote {len(rows)} statistics rows to {path}')
    return len(rows)
