"""Reading and writing LP problems as free-format MPS and as JSON documents."""
import json
import logging
import os
from collections import OrderedDict

import numpy as np

from pdhglp.conf import app_settings
from pdhglp.exceptions import JsonProblemError, MpsParseError
from pdhglp.linalg import ConstraintMatrix, Storage
from pdhglp.problem import LpProblem

logger = logging.getLogger(app_settings.LOGGER_NAME)

MPS = 'mps'
JSON = 'json'
FORMATS = (MPS, JSON)

SECTIONS = ('NAME', 'OBJSENSE', 'ROWS', 'COLUMNS', 'RHS', 'RANGES', 'BOUNDS', 'ENDATA')
ROW_TYPES = ('N', 'E', 'G', 'L')
MINIMIZE_SENSES = ('MIN', 'MINIMIZE')
# Bound types that need a value token.
VALUED_BOUNDS = ('LO', 'UP', 'FX')
FLAG_BOUNDS = ('FR', 'MI', 'PL', 'BV')
# Bound values at least this large are read as infinite.
MPS_INFINITY = 1e30

OBJECTIVE_ROW = 'COST'


class _MpsRow:

    def __init__(self, name, kind):
        self.name = name
        self.kind = kind
        self.rhs = 0.0
        self.range = None

    def limits(self):
        """Return ``(lower, upper)`` of the row activity."""
        rhs = self.rhs
        if self.range is None:
            return {
                'E': (rhs, rhs),
                'G': (rhs, np.inf),
                'L': (-np.inf, rhs),
            }[self.kind]
        width = abs(self.range)
        if self.kind == 'G':
            return rhs, rhs + width
        if self.kind == 'L':
            return rhs - width, rhs
        if self.range >= 0:
            return rhs, rhs + width
        return rhs - width, rhs


class _MpsReader:
    """Line-by-line state of an MPS parse."""

    def __init__(self):
        self.name = ''
        self.section = None
        self.objective = None
        self.objective_offset = 0.0
        self.rows = OrderedDict()
        self.columns = OrderedDict()
        self.costs = {}
        self.entries = []
        self.lower = {}
        self.upper = {}
        self.integer_marker = False
        self.relaxed_integers = False
        self.finished = False

    def _float(self, token, line_number):
        try:
            return float(token)
        except ValueError:
            raise MpsParseError("invalid number {!r}".format(token), line_number)

    def _row(self, name, line_number):
        if name == self.objective:
            return None
        try:
            return self.rows[name]
        except KeyError:
            raise MpsParseError("unknown row {!r}".format(name), line_number)

    def _column(self, name, line_number):
        if name not in self.columns:
            raise MpsParseError("bound on unknown column {!r}".format(name), line_number)
        return self.columns[name]

    def header(self, tokens, line_number):
        section = tokens[0].upper()
        if section not in SECTIONS:
            raise MpsParseError("unknown section {!r}".format(tokens[0]), line_number)
        self.section = section
        if section == 'NAME':
            self.name = ' '.join(tokens[1:])
        elif section == 'OBJSENSE' and len(tokens) > 1:
            self.objective_sense(tokens[1:], line_number)
        elif section == 'ENDATA':
            self.finished = True

    def objective_sense(self, tokens, line_number):
        if tokens[0].upper() not in MINIMIZE_SENSES:
            raise MpsParseError("unsupported objective sense {!r}".format(tokens[0]), line_number)

    def row(self, tokens, line_number):
        if len(tokens) != 2:
            raise MpsParseError("a row needs a type and a name", line_number)
        kind, name = tokens[0].upper(), tokens[1]
        if kind not in ROW_TYPES:
            raise MpsParseError("unknown row type {!r}".format(tokens[0]), line_number)
        if name in self.rows or name == self.objective:
            raise MpsParseError("duplicate row name {!r}".format(name), line_number)
        if kind == 'N':
            if self.objective is None:
                self.objective = name
            else:
                logger.warning("Ignoring additional objective row %s on line %d", name, line_number)
                self.rows[name] = _MpsRow(name, kind)
            return
        self.rows[name] = _MpsRow(name, kind)

    def column(self, tokens, line_number):
        if len(tokens) >= 3 and tokens[1].strip("'").upper() == 'MARKER':
            marker = tokens[2].strip("'").upper()
            if marker == 'INTORG':
                self.integer_marker = True
            elif marker == 'INTEND':
                self.integer_marker = False
            else:
                raise MpsParseError("unknown marker {!r}".format(tokens[2]), line_number)
            return
        if len(tokens) not in (3, 5):
            raise MpsParseError("a column line needs one or two (row, value) pairs", line_number)
        name = tokens[0]
        if name not in self.columns:
            self.columns[name] = len(self.columns)
            if self.integer_marker:
                self.relaxed_integers = True
        index = self.columns[name]
        for row_name, token in zip(tokens[1::2], tokens[2::2]):
            value = self._float(token, line_number)
            row = self._row(row_name, line_number)
            if row is None:
                self.costs[index] = self.costs.get(index, 0.0) + value
            elif row.kind != 'N':
                self.entries.append((row.name, index, value))

    def _pairs(self, tokens, line_number):
        # An odd token count means the line starts with a set name.
        if len(tokens) % 2 == 1:
            tokens = tokens[1:]
        if not tokens:
            raise MpsParseError("expected (row, value) pairs", line_number)
        return zip(tokens[0::2], tokens[1::2])

    def rhs(self, tokens, line_number):
        for row_name, token in self._pairs(tokens, line_number):
            value = self._float(token, line_number)
            row = self._row(row_name, line_number)
            if row is None:
                self.objective_offset = -value
            else:
                row.rhs = value

    def ranges(self, tokens, line_number):
        for row_name, token in self._pairs(tokens, line_number):
            value = self._float(token, line_number)
            row = self._row(row_name, line_number)
            if row is None or row.kind == 'N':
                raise MpsParseError("range on objective row {!r}".format(row_name), line_number)
            row.range = value

    def bound(self, tokens, line_number):
        kind = tokens[0].upper()
        if kind in VALUED_BOUNDS:
            if len(tokens) not in (3, 4):
                raise MpsParseError("bound {} needs a column and a value".format(kind), line_number)
            column, value = tokens[-2], self._float(tokens[-1], line_number)
            if abs(value) >= MPS_INFINITY:
                value = np.copysign(np.inf, value)
        elif kind in FLAG_BOUNDS:
            # Optional set name, optional (ignored) value.
            if len(tokens) == 2:
                column = tokens[1]
            elif len(tokens) == 3:
                column = tokens[2] if tokens[2] in self.columns else tokens[1]
            elif len(tokens) == 4:
                column = tokens[2]
            else:
                raise MpsParseError("malformed bound line", line_number)
            value = None
        else:
            raise MpsParseError("unsupported bound type {!r}".format(tokens[0]), line_number)
        index = self._column(column, line_number)

        if kind == 'LO':
            self.lower[index] = value
        elif kind == 'UP':
            if value < 0 and index not in self.lower:
                logger.warning("Negative upper bound on column %s with default lower bound; "
                               "setting its lower bound to -inf (line %d)", column, line_number)
                self.lower[index] = -np.inf
            self.upper[index] = value
        elif kind == 'FX':
            self.lower[index] = self.upper[index] = value
        elif kind == 'FR':
            self.lower[index], self.upper[index] = -np.inf, np.inf
        elif kind == 'MI':
            self.lower[index] = -np.inf
        elif kind == 'PL':
            self.upper[index] = np.inf
        elif kind == 'BV':
            self.lower[index], self.upper[index] = 0.0, 1.0
            self.relaxed_integers = True

    def feed(self, tokens, line_number):
        handlers = {
            'OBJSENSE': self.objective_sense,
            'ROWS': self.row,
            'COLUMNS': self.column,
            'RHS': self.rhs,
            'RANGES': self.ranges,
            'BOUNDS': self.bound,
        }
        if self.section not in handlers:
            raise MpsParseError("data line outside of a section", line_number)
        handlers[self.section](tokens, line_number)

    def problem(self):
        if self.relaxed_integers:
            logger.warning("Integer columns in %s are relaxed to continuous columns", self.name or "MPS input")
        n = len(self.columns)
        c = np.zeros(n)
        for index, value in self.costs.items():
            c[index] = value
        l = np.zeros(n)
        u = np.full(n, np.inf)
        for index, value in self.lower.items():
            l[index] = value
        for index, value in self.upper.items():
            u[index] = value

        # Equalities go to A; every finite inequality limit becomes a >= row of G.
        eq_rows, ge_rows = {}, {}
        b, h = [], []
        for row in self.rows.values():
            if row.kind == 'N':
                continue
            lower, upper = row.limits()
            if row.kind == 'E' and lower == upper:
                eq_rows[row.name] = [(len(b), 1.0)]
                b.append(lower)
                continue
            targets = []
            if np.isfinite(lower):
                targets.append((len(h), 1.0))
                h.append(lower)
            if np.isfinite(upper):
                targets.append((len(h), -1.0))
                h.append(-upper)
            ge_rows[row.name] = targets

        A_triplets, G_triplets = ([], [], []), ([], [], [])
        for row_name, col, value in self.entries:
            if row_name in eq_rows:
                targets, triplets = eq_rows[row_name], A_triplets
            else:
                targets, triplets = ge_rows[row_name], G_triplets
            for target, sign in targets:
                triplets[0].append(target)
                triplets[1].append(col)
                triplets[2].append(sign * value)

        return LpProblem(
            c=c,
            A=ConstraintMatrix.from_triplets(*A_triplets, shape=(len(b), n)),
            b=np.array(b, dtype=float),
            G=ConstraintMatrix.from_triplets(*G_triplets, shape=(len(h), n)),
            h=np.array(h, dtype=float),
            l=l,
            u=u,
            storage=Storage.SPARSE_CSR,
            objective_offset=self.objective_offset,
            name=self.name,
        )


def _text(data):
    if hasattr(data, 'read'):
        data = data.read()
    if isinstance(data, bytes):
        data = data.decode('utf-8')
    return data


def parse_mps(data):
    """Parse a free-format MPS document into an `LpProblem`.

    @param data: MPS text as ``bytes``, ``str`` or a readable file object.
    @raise MpsParseError: On unknown sections, duplicate rows, unknown rows or columns, and
        malformed lines. The error carries the 1-based line number.
    """
    reader = _MpsReader()
    for line_number, line in enumerate(_text(data).splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith('*'):
            continue
        tokens = line.split()
        if line[0].isspace():
            reader.feed(tokens, line_number)
        else:
            reader.header(tokens, line_number)
            if reader.finished:
                break
    if reader.objective is None and reader.columns:
        logger.warning("MPS input has no objective row; using a zero objective")
    return reader.problem()


def _number(value):
    return repr(float(value))


def write_mps(problem):
    """Return `problem` as a free-format MPS document.

    Rows are named ``G<i>`` and ``E<i>``, columns ``X<j>``; `parse_mps` reads the result back
    into the same structure.
    """
    n = problem.n
    K = ConstraintMatrix.vstack([problem.G, problem.A], Storage.SPARSE_CSR).data.tocsc()
    row_names = ['G{}'.format(i) for i in range(problem.num_inequalities)]
    row_names += ['E{}'.format(i) for i in range(problem.num_equalities)]

    lines = ['NAME {}'.format(problem.name or 'PROBLEM').rstrip(), 'ROWS', ' N  {}'.format(OBJECTIVE_ROW)]
    lines += [' G  {}'.format(name) for name in row_names[:problem.num_inequalities]]
    lines += [' E  {}'.format(name) for name in row_names[problem.num_inequalities:]]

    lines.append('COLUMNS')
    for j in range(n):
        column = 'X{}'.format(j)
        if problem.c[j] != 0:
            lines.append('    {}  {}  {}'.format(column, OBJECTIVE_ROW, _number(problem.c[j])))
        for pointer in range(K.indptr[j], K.indptr[j + 1]):
            lines.append('    {}  {}  {}'.format(column, row_names[K.indices[pointer]], _number(K.data[pointer])))
        if problem.c[j] == 0 and K.indptr[j] == K.indptr[j + 1]:
            # Keep empty columns declared.
            lines.append('    {}  {}  {}'.format(column, OBJECTIVE_ROW, _number(0.0)))

    lines.append('RHS')
    if problem.objective_offset:
        lines.append('    RHS  {}  {}'.format(OBJECTIVE_ROW, _number(-problem.objective_offset)))
    for name, value in zip(row_names, np.concatenate([problem.h, problem.b])):
        if value != 0:
            lines.append('    RHS  {}  {}'.format(name, _number(value)))

    lines.append('BOUNDS')
    for j, (lower, upper) in enumerate(zip(problem.l, problem.u)):
        column = 'X{}'.format(j)
        if lower == upper:
            lines.append(' FX BND  {}  {}'.format(column, _number(lower)))
            continue
        if lower == -np.inf and upper == np.inf:
            lines.append(' FR BND  {}'.format(column))
            continue
        if lower == -np.inf:
            lines.append(' MI BND  {}'.format(column))
        elif lower != 0:
            lines.append(' LO BND  {}  {}'.format(column, _number(lower)))
        if upper != np.inf:
            lines.append(' UP BND  {}  {}'.format(column, _number(upper)))
    lines.append('ENDATA')
    return '\n'.join(lines) + '\n'


def _json_vector(document, key, length=None, infinite=False):
    values = document.get(key)
    if values is None:
        return None
    if not isinstance(values, list):
        raise JsonProblemError("{!r} must be a list".format(key))
    parsed = []
    for value in values:
        if isinstance(value, str):
            if not infinite or value not in ('inf', '-inf'):
                raise JsonProblemError("invalid entry {!r} in {!r}".format(value, key))
            value = float(value)
        elif not isinstance(value, (int, float)) or isinstance(value, bool):
            raise JsonProblemError("invalid entry {!r} in {!r}".format(value, key))
        parsed.append(value)
    if length is not None and len(parsed) != length:
        raise JsonProblemError("{!r} has length {}, expected {}".format(key, len(parsed), length))
    return np.array(parsed, dtype=float)


def _json_matrix(document, key, nrows, ncols):
    triplets = document.get(key)
    if triplets is None:
        return None
    try:
        rows, cols, data = triplets['rows'], triplets['cols'], triplets['data']
    except (KeyError, TypeError):
        raise JsonProblemError("{!r} must be an object with 'rows', 'cols' and 'data'".format(key))
    if not len(rows) == len(cols) == len(data):
        raise JsonProblemError("{!r} triplet lists differ in length".format(key))
    shape = tuple(triplets.get('shape') or (nrows, ncols))
    if len(shape) != 2:
        raise JsonProblemError("{!r} shape must have two entries".format(key))
    if rows and (min(rows) < 0 or max(rows) >= shape[0]) or cols and (min(cols) < 0 or max(cols) >= shape[1]):
        raise JsonProblemError("{!r} has an index outside of its {}x{} shape".format(key, *shape))
    return ConstraintMatrix.from_triplets(rows, cols, data, shape=shape)


def read_json_problem(data):
    """Parse a JSON problem document.

    Matrices are ``{"rows": [...], "cols": [...], "data": [...]}`` triplets with an optional
    ``"shape"``; without it, rows are sized by the matching rhs and columns by ``c``. Bounds may
    use the strings ``"inf"`` and ``"-inf"``.
    """
    try:
        document = json.loads(_text(data))
    except ValueError as error:
        raise JsonProblemError("invalid JSON: {}".format(error))
    if not isinstance(document, dict):
        raise JsonProblemError("a problem document must be a JSON object")
    c = _json_vector(document, 'c')
    if c is None:
        raise JsonProblemError("missing objective 'c'")
    n = c.shape[0]
    b = _json_vector(document, 'b')
    h = _json_vector(document, 'h')
    A = _json_matrix(document, 'A', 0 if b is None else b.shape[0], n)
    G = _json_matrix(document, 'G', 0 if h is None else h.shape[0], n)
    try:
        storage = Storage(document.get('storage', Storage.SPARSE_CSR.value))
    except ValueError:
        raise JsonProblemError("unknown storage {!r}".format(document.get('storage')))
    return LpProblem(
        c=c,
        A=A,
        b=b,
        G=G,
        h=h,
        l=_json_vector(document, 'l', n, infinite=True),
        u=_json_vector(document, 'u', n, infinite=True),
        storage=storage,
        objective_offset=document.get('objective_offset', 0.0),
        name=document.get('name', ''),
    )


def _json_triplets(matrix):
    coo = matrix.to_csr().tocoo()
    return {
        'rows': coo.row.tolist(),
        'cols': coo.col.tolist(),
        'data': coo.data.tolist(),
        'shape': list(matrix.shape),
    }


def _json_bounds(values):
    return [value if np.isfinite(value) else ('inf' if value > 0 else '-inf') for value in values.tolist()]


def write_json_problem(problem):
    """Return `problem` as a JSON problem document."""
    document = {
        'name': problem.name,
        'storage': problem.storage.value,
        'objective_offset': problem.objective_offset,
        'c': problem.c.tolist(),
        'A': _json_triplets(problem.A),
        'b': problem.b.tolist(),
        'G': _json_triplets(problem.G),
        'h': problem.h.tolist(),
        'l': _json_bounds(problem.l),
        'u': _json_bounds(problem.u),
    }
    return json.dumps(document, indent=4, sort_keys=True, separators=(',', ': ')) + '\n'


def guess_format(path):
    extension = os.path.splitext(path)[1].lower().lstrip('.')
    if extension not in FORMATS:
        raise ValueError("cannot tell the format of {!r}; use 'mps' or 'json'".format(path))
    return extension


def read_problem(path, format=None):
    """Read a problem file, choosing the reader by `format` or by the file extension."""
    format = format or guess_format(path)
    with open(path, 'rb') as source:
        data = source.read()
    if format == MPS:
        return parse_mps(data)
    if format == JSON:
        return read_json_problem(data)
    raise ValueError("unknown problem format {!r}".format(format))


def dump_problem(problem, format):
    """Return `problem` serialized in `format`."""
    if format == MPS:
        return write_mps(problem)
    if format == JSON:
        return write_json_problem(problem)
    raise ValueError("unknown problem format {!r}".format(format))
