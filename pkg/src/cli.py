"""
Command Line Interface
Dispatches subcommands to the library and serializes the results as a
table, JSON or CSV on standard output. Errors go to standard error.

Exit codes: 0 success, 1 library error or failed check, 2 usage error.
"""

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import islice
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, TextIO

import numpy as np

import analysis
import chebyshev
import polycore
import radicals
from config_manager import default_precision, get_config
from polycore import BigReal, Family, MapParams
from utils.helpers import format_integer, format_rational, parse_rational
from utils.logger import setup_logging
from utils.validators import DomainError, LLPolyError, check_precision


logger = logging.getLogger(__name__)

# Integers beyond this are emitted as strings
JSON_SAFE_INT = 2 ** 53

# Rows read ahead to size table columns; later rows reuse those widths
TABLE_WIDTH_SAMPLE = 256

# Larger expansions are reported by coefficient rows only
POLY_SUMMARY_MAX_DEGREE = 256


@dataclass
class OutputEnvelope:
    """
    Serialized result of one command

    payload may be a lazy iterable of rows; renderers consume it once and
    write each row as it is produced.
    """

    command: str
    params: Dict[str, Any]
    precision_bits: int
    payload: Iterable[Dict[str, Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    ok: bool = True

    def header(self) -> Dict[str, Any]:
        return _sanitize_for_json({
            'command': self.command,
            'params': self.params,
            'precision_bits': self.precision_bits,
            'ok': self.ok,
            'summary': self.summary,
        })

    def rows(self) -> Iterator[Dict[str, Any]]:
        return (_sanitize_for_json(row) for row in self.payload)

    def to_dict(self) -> Dict[str, Any]:
        return {**self.header(), 'payload': list(self.rows())}


def _sanitize_for_json(obj):
    """Recursively convert numeric types to JSON-safe values (exact ones as strings)"""
    if isinstance(obj, dict):
        return {k: _sanitize_for_json(v) for k, v in obj.items()}
    elif isinstance(obj, (list, tuple)):
        return [_sanitize_for_json(v) for v in obj]
    elif isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    elif isinstance(obj, BigReal):
        return obj.to_decimal_string()
    elif isinstance(obj, Fraction):
        return format_rational(obj)
    elif isinstance(obj, (int, np.integer)):
        obj = int(obj)
        return obj if abs(obj) < JSON_SAFE_INT else format_integer(obj)
    elif isinstance(obj, (float, np.floating)):
        return f"{float(obj):.6e}"
    elif isinstance(obj, Enum):
        return obj.value
    elif obj is None or isinstance(obj, str):
        return obj
    return str(obj)


# =============================================================================
#  Rendering
# =============================================================================

def _text(value) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    return str(value)


def render_table(envelope: OutputEnvelope, stream: TextIO):
    data = envelope.header()
    header = [data['command']] + [f"{k}={_text(v)}" for k, v in data['params'].items()]
    header.append(f"precision={data['precision_bits']}")
    stream.write('# ' + ' '.join(header) + '\n')

    rows = envelope.rows()
    sample = list(islice(rows, TABLE_WIDTH_SAMPLE))
    if sample:
        columns = list(sample[0].keys())
        cells = [[_text(row.get(c)) for c in columns] for row in sample]
        widths = [max(len(c), *(len(r[i]) for r in cells)) for i, c in enumerate(columns)]

        def emit(values):
            stream.write('  '.join(v.ljust(w) for v, w in zip(values, widths)).rstrip() + '\n')

        emit(columns)
        for r in cells:
            emit(r)
        for row in rows:
            emit([_text(row.get(c)) for c in columns])

    for key, value in data['summary'].items():
        stream.write(f"# {key}: {_text(value)}\n")


def render_csv(envelope: OutputEnvelope, stream: TextIO):
    writer = csv.writer(stream, lineterminator='\n')
    rows = envelope.rows()
    first = next(rows, None)
    if first is None:
        writer.writerow(['key', 'value'])
        for key, value in envelope.header()['summary'].items():
            writer.writerow([key, _text(value)])
        return

    columns = list(first.keys())
    writer.writerow(columns)
    writer.writerow([_text(first.get(c)) for c in columns])
    for row in rows:
        writer.writerow([_text(row.get(c)) for c in columns])


def render_json(envelope: OutputEnvelope, stream: TextIO):
    """One JSON document, written incrementally with one payload row per line"""
    stream.write('{\n')
    for key, value in envelope.header().items():
        stream.write(f"  {json.dumps(key)}: {json.dumps(value)},\n")
    stream.write('  "payload": [')
    empty = True
    for row in envelope.rows():
        stream.write(('\n    ' if empty else ',\n    ') + json.dumps(row))
        empty = False
    stream.write(']\n}\n' if empty else '\n  ]\n}\n')


def render(envelope: OutputEnvelope, fmt: str, stream: TextIO):
    if fmt == 'json':
        render_json(envelope, stream)
    elif fmt == 'csv':
        render_csv(envelope, stream)
    else:
        render_table(envelope, stream)


# =============================================================================
#  Parser
# =============================================================================

def _family_type(text: str) -> str:
    value = text.upper()
    if value not in ('L', 'M'):
        raise argparse.ArgumentTypeError(f"family must be L or M, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--precision', type=int, default=None,
                        help='Working precision in bits (default from configuration)')
    common.add_argument('--max-n', type=int, default=None, dest='max_n',
                        help='Degree cap for exact expansion (LLPOLY_MAX_N otherwise)')
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument('--json', dest='output', action='store_const', const='json')
    fmt.add_argument('--csv', dest='output', action='store_const', const='csv')
    common.add_argument('--log-level', default=None,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'])

    family = argparse.ArgumentParser(add_help=False)
    family.add_argument('--family', type=_family_type, default='L')
    family.add_argument('--a', default=None, help='Parameter a of the M family (rational)')

    parser = argparse.ArgumentParser(
        prog='llpoly',
        description='Lucas-Lehmer polynomials: exact expansion, zeros, Chebyshev identities and analysis',
    )
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('poly', parents=[common, family], help='Exact coefficients of L_n / M^a_n')
    p.add_argument('--n', type=int, required=True)

    p = sub.add_parser('eval', parents=[common, family], help='Evaluate the n-th iterate at x')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--x', required=True, nargs='+', help='One or more rational points')
    p.add_argument('--derivatives', action='store_true', help='Also report first and second derivative')
    p.add_argument('--exact', action='store_true', help='Exact rational iteration')

    p = sub.add_parser('zeros', parents=[common, family], help='Sorted zeros as nested radicals')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--no-values', action='store_true', help='Sign patterns only')

    p = sub.add_parser('critical-points', parents=[common, family], help='Classified critical points')
    p.add_argument('--n', type=int, required=True)

    p = sub.add_parser('verify', parents=[common], help='Exact T/U/derivative identity suite')
    p.add_argument('--n-from', type=int, default=1)
    p.add_argument('--n-to', type=int, default=None,
                   help='Highest level checked (default: --max-n, or 8)')
    p.add_argument('--a-grid', default='1/2,1,3/2,2', help='Comma separated values of a')

    p = sub.add_parser('quadrature', parents=[common], help='Orthogonality matrix by Gauss-Chebyshev quadrature')
    p.add_argument('--bound', type=int, default=4)
    p.add_argument('--nodes', type=int, default=None)
    p.add_argument('--tolerance-bits', type=int, default=None,
                   help='Pass threshold 2^-bits (default precision - 40)')

    p = sub.add_parser('pi', parents=[common, family], help='pi from the largest zero')
    p.add_argument('--n', type=int, default=None)
    p.add_argument('--n-from', type=int, default=1)
    p.add_argument('--n-to', type=int, default=12)

    p = sub.add_parser('mersenne', parents=[common], help='Lucas-Lehmer test of 2^p - 1')
    p.add_argument('--p', type=int, required=True, nargs='+')

    p = sub.add_parser('sequence', parents=[common], help='Integer Lucas-Lehmer sequence')
    p.add_argument('--count', type=int, default=5)

    p = sub.add_parser('plot-data', parents=[common, family], help='Map vs cosine model sample table')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--half-width', default='1')
    p.add_argument('--count', type=int, default=41)
    p.add_argument('--center', default=None,
                   help='Sample around this maximum with the local cosine model (L only)')

    return parser


# =============================================================================
#  Commands
# =============================================================================

def _params(args) -> MapParams:
    return MapParams.from_args(args.family, args.a)


def _family_fields(params: MapParams) -> Dict[str, Any]:
    return {'family': params.family.value, 'a': params.a}


def cmd_poly(args, precision: int) -> OutputEnvelope:
    params = _params(args)
    poly = polycore.build_poly(params, args.n, args.max_n)
    rows = [{'power': i, 'coefficient': c} for i, c in enumerate(poly.coeffs)]
    summary = {'degree': poly.degree}
    if poly.degree <= POLY_SUMMARY_MAX_DEGREE:
        summary['polynomial'] = str(poly)
    return OutputEnvelope(
        command='poly',
        params={**_family_fields(params), 'n': args.n},
        precision_bits=precision,
        payload=rows,
        summary=summary,
    )


def cmd_eval(args, precision: int) -> OutputEnvelope:
    params = _params(args)
    rows = []
    for text in args.x:
        row: Dict[str, Any] = {'x': text}
        if args.exact:
            row['value'] = polycore.eval_map_exact(params, args.n, text)
        else:
            x = BigReal.from_value(text, precision)
            if args.derivatives:
                value, d1, d2 = polycore.eval_map_derivatives(params, args.n, x)
                row.update(value=value, d1=d1, d2=d2)
            else:
                row['value'] = polycore.eval_map(params, args.n, x)
        rows.append(row)
    return OutputEnvelope(
        command='eval',
        params={**_family_fields(params), 'n': args.n, 'exact': args.exact},
        precision_bits=precision,
        payload=rows,
    )


def cmd_zeros(args, precision: int) -> OutputEnvelope:
    params = _params(args)
    patterns = radicals.iter_zeros(args.n)

    def rows():
        for i, sp in enumerate(patterns):
            row: Dict[str, Any] = {'index': i, 'pattern': str(sp), 'radical': sp.symbolic()}
            if not args.no_values:
                row['value'] = radicals.ScaledZero(sp, params.zero_scale).value(precision)
            yield row

    return OutputEnvelope(
        command='zeros',
        params={**_family_fields(params), 'n': args.n, 'scale': params.zero_scale},
        precision_bits=precision,
        payload=rows(),
        summary={'count': 2 ** args.n},
    )


def cmd_critical_points(args, precision: int) -> OutputEnvelope:
    params = _params(args)
    report = radicals.critical_points(args.n, params)
    rows = [{
        'index': i,
        'location': str(c.location),
        'kind': c.kind,
        'value': c.value,
        'position': c.position(precision),
    } for i, c in enumerate(report.critical_points)]
    return OutputEnvelope(
        command='critical-points',
        params={**_family_fields(params), 'n': args.n},
        precision_bits=precision,
        payload=rows,
        summary={
            'count': len(report.critical_points),
            'positive': report.positive_count,
            'maxima': len(report.maxima),
            'minima': len(report.minima),
            'zeros': len(report.zeros),
        },
    )


def _identity_row(report: chebyshev.IdentityReport) -> Dict[str, Any]:
    return {
        'identity': report.identity,
        'family': report.family,
        'n': report.n,
        'status': 'ok' if report.holds else 'FAILED',
        'first_mismatch': report.first_mismatch,
    }


def run_identity_suite(n_from: int, n_to: int, a_grid: Sequence[Fraction],
                       max_n: Optional[int] = None) -> List[chebyshev.IdentityReport]:
    """T-identity, U-identity, derivative product and family reduction for every (a, n)"""
    reports = []
    lucas = MapParams.lucas()
    for a in a_grid:
        params = MapParams.general(a)
        for n in range(n_from, n_to + 1):
            reports.append(chebyshev.verify_t_identity(params, n, max_n=max_n))
            reports.append(chebyshev.verify_u_identity(params, n, max_n=max_n))
            if n >= 2:
                poly = polycore.build_poly(params, n, max_n)
                reports.append(chebyshev.compare_polys(
                    polycore.derivative(poly),
                    polycore.derivative_product(params, n, max_n),
                    'derivative-product', params.label, n,
                ))
            if a == Fraction(1, 2):
                reports.append(chebyshev.compare_polys(
                    polycore.build_poly(params, n, max_n),
                    polycore.build_poly(lucas, n, max_n),
                    'family-reduction', params.label, n,
                ))
    return reports


def cmd_verify(args, precision: int) -> OutputEnvelope:
    n_to = args.n_to if args.n_to is not None else (args.max_n if args.max_n is not None else 8)
    cap = max(n_to, args.max_n) if args.max_n is not None else None
    a_grid = [parse_rational(a) for a in args.a_grid.split(',') if a.strip()]

    reports = run_identity_suite(args.n_from, n_to, a_grid, cap)
    failures = [r for r in reports if not r.holds]
    logger.info(f"Identity suite: {len(reports)} checks, {len(failures)} failures")

    return OutputEnvelope(
        command='verify',
        params={'n_from': args.n_from, 'n_to': n_to,
                'a_grid': ','.join(format_rational(a) for a in a_grid)},
        precision_bits=precision,
        payload=[_identity_row(r) for r in reports],
        summary={'checks': len(reports), 'failures': len(failures)},
        ok=not failures,
    )


def cmd_quadrature(args, precision: int) -> OutputEnvelope:
    if args.nodes is not None:
        spec = analysis.QuadratureSpec(args.nodes, precision)
    else:
        spec = analysis.QuadratureSpec.for_levels(args.bound, args.bound, precision)
    matrix = analysis.orthogonality_matrix(args.bound, spec)

    tolerance_bits = args.tolerance_bits if args.tolerance_bits is not None else precision - 40
    tolerance = 2.0 ** -tolerance_bits
    rows = [{'m': m, 'n': n, 'value': v}
            for m, row in enumerate(matrix.values) for n, v in enumerate(row)]

    return OutputEnvelope(
        command='quadrature',
        params={'bound': args.bound, 'nodes': spec.node_count, 'tolerance_bits': tolerance_bits},
        precision_bits=precision,
        payload=rows,
        summary={
            'max_off_diagonal': matrix.max_off_diagonal,
            'max_diagonal_deviation': matrix.max_diagonal_deviation,
        },
        ok=matrix.within(tolerance),
    )


def cmd_pi(args, precision: int) -> OutputEnvelope:
    params = _params(args)
    n_from, n_to = (args.n, args.n) if args.n is not None else (args.n_from, args.n_to)
    rows = [{'n': r.n, 'value': r.value, 'error': r.error, 'ratio': r.ratio}
            for r in analysis.pi_table(n_from, n_to, precision, params)]
    return OutputEnvelope(
        command='pi',
        params={**_family_fields(params), 'n_from': n_from, 'n_to': n_to},
        precision_bits=precision,
        payload=rows,
    )


def cmd_mersenne(args, precision: int) -> OutputEnvelope:
    rows = [{'p': p, 'mersenne': format_integer(2 ** p - 1), 'prime': polycore.mersenne_test(p)}
            for p in args.p]
    return OutputEnvelope(
        command='mersenne',
        params={'p': ','.join(str(p) for p in args.p)},
        precision_bits=precision,
        payload=rows,
    )


def cmd_sequence(args, precision: int) -> OutputEnvelope:
    rows = [{'k': k, 'term': format_integer(s)}
            for k, s in enumerate(polycore.ll_integer_sequence(args.count, args.max_n), start=1)]
    return OutputEnvelope(
        command='sequence',
        params={'count': args.count},
        precision_bits=precision,
        payload=rows,
    )


def cmd_plot_data(args, precision: int) -> OutputEnvelope:
    params = _params(args)
    half_width = BigReal.from_value(args.half_width, precision)
    if args.center is not None:
        if params.family is Family.M:
            raise DomainError("--center samples the local cosine model of L_n; use --family L")
        center = BigReal.from_value(args.center, precision)
        samples = analysis.local_cosine_samples(args.n, center, half_width, args.count)
        fields = {'center': args.center}
    else:
        samples = analysis.cosine_compare_samples(args.n, half_width, args.count, params, precision)
        fields = {}
    rows = [{'x': s.x, 'value': s.value, 'model': s.model, 'delta': s.delta} for s in samples]
    return OutputEnvelope(
        command='plot-data',
        params={**_family_fields(params), 'n': args.n, 'half_width': args.half_width,
                'count': args.count, **fields},
        precision_bits=precision,
        payload=rows,
    )


HANDLERS = {
    'poly': cmd_poly,
    'eval': cmd_eval,
    'zeros': cmd_zeros,
    'critical-points': cmd_critical_points,
    'verify': cmd_verify,
    'quadrature': cmd_quadrature,
    'pi': cmd_pi,
    'mersenne': cmd_mersenne,
    'sequence': cmd_sequence,
    'plot-data': cmd_plot_data,
}


# =============================================================================
#  Entry
# =============================================================================

def _report_error(error: Exception, stream: TextIO):
    stream.write(json.dumps({
        'error': type(error).__name__,
        'message': str(error),
    }) + '\n')


def run(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None,
        stderr: Optional[TextIO] = None) -> int:
    """
    Parse argv, run one command and write its envelope

    Returns the process exit code.
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    try:
        config = get_config()
        config.validate()
        setup_logging(args.log_level or config.get('logging.level'), config.get('logging.file'))

        precision = check_precision(args.precision if args.precision is not None else default_precision())
        fmt = args.output or config.get('output.format', 'table')

        envelope = HANDLERS[args.command](args, precision)
        render(envelope, fmt, stdout)
        return 0 if envelope.ok else 1

    except LLPolyError as e:
        logger.debug(f"{args.command} failed", exc_info=True)
        _report_error(e, stderr)
        return 1
