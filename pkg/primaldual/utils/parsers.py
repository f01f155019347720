"""
Text formats for problems, instances and solutions.

All formats are line oriented; blank lines and anything after '#' are
ignored; indices are 0-based. Every malformed input raises ParseError with
the offending line number.
"""

import logging
import re
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np

from ..discrete.lp_duality import LpProblem
from ..discrete.setcover import SetCoverInstance
from ..errors import ParseError, PrimalDualError
from ..linalg.linop import DenseOp, GraphIncidence, IdentityOp, LinOp, incidence_operator
from ..mrf.model import MrfModel
from ..prox.calculus import ScaleFn, Separable, Translate
from ..prox.functions import (
    IND_NONNEG,
    BoxIndicator,
    L1Norm,
    LeastSquares,
    PowerFn,
    ProxFn,
    SquaredDistance,
    ZeroFn,
    ZeroSmooth,
)
from ..solvers.problem import CompositeProblem, Term

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _read(source: PathLike) -> str:
    try:
        return Path(source).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {source}: {exc}") from exc


def _lines(text: str) -> List[Tuple[int, List[str]]]:
    out = []
    for number, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split('#', 1)[0].split()
        if tokens:
            out.append((number, tokens))
    return out


def _float(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"expected a number, got {token!r}", line) from None
    if np.isnan(value):
        raise ParseError("NaN is not allowed", line)
    return value


def _int(token: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}", line) from None


def _floats(tokens: List[str], line: int, count: int = None) -> np.ndarray:
    if count is not None and len(tokens) != count:
        raise ParseError(f"expected {count} numbers, got {len(tokens)}", line)
    values = np.array([_float(t, line) for t in tokens])
    if not np.all(np.isfinite(values)):
        raise ParseError("infinite values are not allowed here", line)
    return values


class _Cursor:
    def __init__(self, text: str):
        self.lines = _lines(text)
        self.pos = 0

    def next(self, what: str) -> Tuple[int, List[str]]:
        if self.pos >= len(self.lines):
            last = self.lines[-1][0] if self.lines else 0
            raise ParseError(f"unexpected end of input, expected {what}", last)
        item = self.lines[self.pos]
        self.pos += 1
        return item

    def done(self) -> bool:
        return self.pos >= len(self.lines)

    def expect_end(self) -> None:
        if not self.done():
            line, _ = self.lines[self.pos]
            raise ParseError("trailing content", line)


# ============================================
# VECTORS
# ============================================

def parse_vector(text: str) -> np.ndarray:
    values = []
    for line, tokens in _lines(text):
        values.extend(_floats(tokens, line))
    return np.array(values, dtype=np.float64)


def read_vector(path: PathLike) -> np.ndarray:
    return parse_vector(_read(path))


def format_vector(x) -> str:
    return ''.join(f"{v:.17g}\n" for v in np.asarray(x, dtype=np.float64).ravel())


def write_vector(path: PathLike, x) -> None:
    Path(path).write_text(format_vector(x))


# ============================================
# LP AND SET COVER
# ============================================

def parse_lp(text: str) -> LpProblem:
    """'N K', then the c row, the b row and K rows of L."""
    cursor = _Cursor(text)
    line, tokens = cursor.next("'N K'")
    if len(tokens) != 2:
        raise ParseError("header must be 'N K'", line)
    n, k = _int(tokens[0], line), _int(tokens[1], line)
    if n < 1 or k < 1:
        raise ParseError("N and K must be positive", line)
    line, tokens = cursor.next('c row')
    c = _floats(tokens, line, n)
    line, tokens = cursor.next('b row')
    b = _floats(tokens, line, k)
    rows = []
    for _ in range(k):
        line, tokens = cursor.next('row of L')
        rows.append(_floats(tokens, line, n))
    cursor.expect_end()
    return LpProblem(np.array(rows), b, c)


def read_lp(path: PathLike) -> LpProblem:
    return parse_lp(_read(path))


def parse_setcover(text: str) -> SetCoverInstance:
    """'K N', then one line per set: 'cost m i_1 ... i_m'."""
    cursor = _Cursor(text)
    line, tokens = cursor.next("'K N'")
    if len(tokens) != 2:
        raise ParseError("header must be 'K N'", line)
    k, n = _int(tokens[0], line), _int(tokens[1], line)
    if k < 0 or n < 0:
        raise ParseError("K and N must be nonnegative", line)
    sets = []
    for _ in range(n):
        line, tokens = cursor.next('set line')
        if len(tokens) < 2:
            raise ParseError("set line must be 'cost m i_1 ... i_m'", line)
        cost = _float(tokens[0], line)
        m = _int(tokens[1], line)
        if len(tokens) != 2 + m:
            raise ParseError(f"set declares {m} members but lists {len(tokens) - 2}", line)
        members = [_int(t, line) for t in tokens[2:]]
        bad = [i for i in members if not 0 <= i < k]
        if bad:
            raise ParseError(f"members {bad} outside 0..{k - 1}", line)
        sets.append((members, cost))
    cursor.expect_end()
    return SetCoverInstance.from_sets(k, sets)


def read_setcover(path: PathLike) -> SetCoverInstance:
    return parse_setcover(_read(path))


# ============================================
# MRF
# ============================================

def parse_mrf(text: str) -> MrfModel:
    """
    'V n L k', optional 'GRID rows cols', n lines of k unary costs, then per
    edge 'E p q' followed by k rows of k pairwise costs.
    """
    cursor = _Cursor(text)
    line, tokens = cursor.next("'V n L k'")
    if len(tokens) != 4 or tokens[0] != 'V' or tokens[2] != 'L':
        raise ParseError("header must be 'V <n> L <k>'", line)
    n, k = _int(tokens[1], line), _int(tokens[3], line)
    if n < 1 or k < 1:
        raise ParseError("V and L must be positive", line)

    grid = None
    unary = []
    while len(unary) < n:
        line, tokens = cursor.next('unary row')
        if tokens[0] == 'GRID':
            if len(tokens) != 3 or grid is not None:
                raise ParseError("GRID must appear once as 'GRID <rows> <cols>'", line)
            grid = (_int(tokens[1], line), _int(tokens[2], line))
            if grid[0] * grid[1] != n:
                raise ParseError(f"grid {grid[0]}x{grid[1]} does not have {n} vertices", line)
            continue
        unary.append(_floats(tokens, line, k))

    edges, pairwise = [], []
    while not cursor.done():
        line, tokens = cursor.next('edge')
        if tokens[0] == 'GRID':
            if len(tokens) != 3 or grid is not None:
                raise ParseError("GRID must appear once as 'GRID <rows> <cols>'", line)
            grid = (_int(tokens[1], line), _int(tokens[2], line))
            continue
        if tokens[0] != 'E' or len(tokens) != 3:
            raise ParseError("edge header must be 'E <p> <q>'", line)
        p, q = _int(tokens[1], line), _int(tokens[2], line)
        if not (0 <= p < n and 0 <= q < n) or p == q:
            raise ParseError(f"invalid edge ({p}, {q})", line)
        table = []
        for _ in range(k):
            row_line, row = cursor.next('pairwise row')
            table.append(_floats(row, row_line, k))
        edges.append((p, q))
        pairwise.append(table)

    try:
        return MrfModel(n, k, np.array(unary), np.array(edges, dtype=np.int64).reshape(-1, 2),
                        np.array(pairwise).reshape(-1, k, k), grid)
    except PrimalDualError as exc:
        raise ParseError(str(exc)) from exc


def read_mrf(path: PathLike) -> MrfModel:
    return parse_mrf(_read(path))


def format_labeling(z) -> str:
    return ''.join(f"{int(v)}\n" for v in np.asarray(z).ravel())


# ============================================
# COMPOSITE PROBLEM FILES
# ============================================

_TOKEN = re.compile(r'\s*(?:(?P<num>[-+]?(?:inf|(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?))'
                    r'|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[(),]))')


def _tokenize_fnspec(text: str, line: int) -> List[Tuple[str, str]]:
    tokens, pos = [], 0
    text = text.strip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match or match.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r} in function spec", line)
        kind = match.lastgroup
        tokens.append((kind, match.group(kind)))
        pos = match.end()
    return tokens


class _FnSpecParser:
    """Recursive descent over atoms and combinators; names resolve to VECTORs."""

    def __init__(self, tokens, vectors: Dict[str, np.ndarray], line: int):
        self.tokens = tokens
        self.pos = 0
        self.vectors = vectors
        self.line = line

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, value=None):
        kind, text = self.peek()
        if kind is None or (value is not None and text != value):
            raise ParseError(f"expected {value or 'token'} in function spec", self.line)
        self.pos += 1
        return kind, text

    def value(self):
        kind, text = self.take()
        if kind == 'num':
            return float(text)
        if kind == 'name' and text in self.vectors:
            return self.vectors[text]
        raise ParseError(f"expected a number or VECTOR name, got {text!r}", self.line)

    def args(self, parse_item):
        self.take('(')
        items = [parse_item()]
        while self.peek()[1] == ',':
            self.take(',')
            items.append(parse_item())
        self.take(')')
        return items

    def fn(self) -> ProxFn:
        kind, name = self.take()
        if kind != 'name':
            raise ParseError(f"expected a function name, got {name!r}", self.line)
        try:
            if name == 'ZERO':
                return ZeroFn()
            if name == 'IND_NONNEG':
                return IND_NONNEG()
            if name == 'L1':
                (lam,) = self._values(1)
                return L1Norm(lam)
            if name == 'SQ':
                w, y = self._values(2)
                return SquaredDistance(w, y)
            if name == 'BOX':
                lo, hi = self._values(2)
                return BoxIndicator(lo, hi)
            if name == 'POW':
                p, lam = self._values(2)
                return PowerFn(p, lam)
            if name in ('TRANSLATE', 'SCALE'):
                self.take('(')
                inner = self.fn()
                self.take(',')
                arg = self.value()
                self.take(')')
                return Translate(inner, arg) if name == 'TRANSLATE' else ScaleFn(inner, float(arg))
            if name == 'SEPARABLE':
                return Separable(self.args(self.fn))
        except ParseError:
            raise
        except (PrimalDualError, TypeError, ValueError) as exc:
            raise ParseError(f"{name}: {exc}", self.line) from exc
        raise ParseError(f"unknown function {name!r}", self.line)

    def _values(self, count: int):
        values = self.args(self.value)
        if len(values) != count:
            raise ParseError(f"expected {count} arguments, got {len(values)}", self.line)
        return values


def parse_fnspec(text: str, vectors: Dict[str, np.ndarray] = None, line: int = 0) -> ProxFn:
    parser = _FnSpecParser(_tokenize_fnspec(text, line), vectors or {}, line)
    fn = parser.fn()
    if parser.pos != len(parser.tokens):
        raise ParseError("trailing tokens after function spec", line)
    return fn


def _split_fnspec(rest: str, line: int) -> Tuple[str, str]:
    """Split 'fnspec opspec' at the first top-level whitespace after the spec."""
    depth = 0
    for i, ch in enumerate(rest):
        if ch == '(':
            depth += 1
        elif ch == ')':
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced parentheses", line)
        elif ch.isspace() and depth == 0:
            return rest[:i], rest[i:].strip()
    return rest, ''


def parse_problem(text: str) -> CompositeProblem:
    """
    Parse the composite problem format:

        N <n>
        VECTOR <name> v1 v2 ...
        MATRIX <name> <rows> <cols>       (then <rows> lines)
        GRAPH <name>                      (then 'V <count>', 'E p q w' lines, 'END')
        F <fnspec>
        H ZERO | H SQ <w> <vector|scalar> | H LSQ <matrix> <vector> [w]
        G <fnspec> <I | matrix | INC graph>   (repeatable)
    """
    raw_lines = text.splitlines()
    n = None
    vectors: Dict[str, np.ndarray] = {}
    matrices: Dict[str, np.ndarray] = {}
    graphs: Dict[str, GraphIncidence] = {}
    f, h = None, None
    term_specs = []

    i = 0
    while i < len(raw_lines):
        line = i + 1
        content = raw_lines[i].split('#', 1)[0].strip()
        i += 1
        if not content:
            continue
        keyword, _, rest = content.partition(' ')
        rest = rest.strip()
        tokens = rest.split()

        if keyword == 'N':
            if len(tokens) != 1 or n is not None:
                raise ParseError("N must appear once as 'N <n>'", line)
            n = _int(tokens[0], line)
            if n < 1:
                raise ParseError("N must be positive", line)
        elif keyword == 'VECTOR':
            if len(tokens) < 2:
                raise ParseError("VECTOR needs a name and at least one value", line)
            vectors[tokens[0]] = _floats(tokens[1:], line)
        elif keyword == 'MATRIX':
            if len(tokens) != 3:
                raise ParseError("MATRIX header must be 'MATRIX <name> <rows> <cols>'", line)
            name, rows, cols = tokens[0], _int(tokens[1], line), _int(tokens[2], line)
            data = []
            while len(data) < rows:
                if i >= len(raw_lines):
                    raise ParseError(f"MATRIX {name} ends early", line)
                row = raw_lines[i].split('#', 1)[0].split()
                i += 1
                if row:
                    data.append(_floats(row, i, cols))
            matrices[name] = np.array(data).reshape(rows, cols)
        elif keyword == 'GRAPH':
            if len(tokens) != 1:
                raise ParseError("GRAPH header must be 'GRAPH <name>'", line)
            count, edges = None, []
            while True:
                if i >= len(raw_lines):
                    raise ParseError(f"GRAPH {tokens[0]} has no END", line)
                row = raw_lines[i].split('#', 1)[0].split()
                i += 1
                if not row:
                    continue
                if row[0] == 'END':
                    break
                if row[0] == 'V' and len(row) == 2:
                    count = _int(row[1], i)
                elif row[0] == 'E' and len(row) in (3, 4):
                    w = _float(row[3], i) if len(row) == 4 else 1.0
                    edges.append((_int(row[1], i), _int(row[2], i), w))
                else:
                    raise ParseError("graph lines are 'V <count>', 'E p q [w]' or 'END'", i)
            if count is None:
                raise ParseError(f"GRAPH {tokens[0]} lacks a 'V <count>' line", line)
            graphs[tokens[0]] = GraphIncidence.from_edges(count, edges)
        elif keyword == 'F':
            if f is not None:
                raise ParseError("F given twice", line)
            f = parse_fnspec(rest, vectors, line)
        elif keyword == 'H':
            if h is not None:
                raise ParseError("H given twice", line)
            h = _parse_smooth(tokens, vectors, matrices, line)
        elif keyword == 'G':
            spec, opspec = _split_fnspec(rest, line)
            term_specs.append((parse_fnspec(spec, vectors, line), opspec, line))
        else:
            raise ParseError(f"unknown keyword {keyword!r}", line)

    if n is None:
        raise ParseError("missing 'N <n>' line")
    terms = [Term(g, _parse_operator(opspec, n, matrices, graphs, line)) for g, opspec, line in term_specs]
    try:
        return CompositeProblem(n, f or ZeroFn(), h or ZeroSmooth(), terms)
    except PrimalDualError as exc:
        raise ParseError(str(exc)) from exc


def _parse_smooth(tokens, vectors, matrices, line):
    if tokens == ['ZERO']:
        return ZeroSmooth()
    try:
        if tokens and tokens[0] == 'SQ' and len(tokens) == 3:
            y = vectors[tokens[2]] if tokens[2] in vectors else _float(tokens[2], line)
            return SquaredDistance(_float(tokens[1], line), y)
        if tokens and tokens[0] == 'LSQ' and len(tokens) in (3, 4):
            if tokens[1] not in matrices or tokens[2] not in vectors:
                raise ParseError("LSQ needs a MATRIX name and a VECTOR name", line)
            w = _float(tokens[3], line) if len(tokens) == 4 else 1.0
            return LeastSquares(matrices[tokens[1]], vectors[tokens[2]], w)
    except ParseError:
        raise
    except PrimalDualError as exc:
        raise ParseError(str(exc), line) from exc
    raise ParseError("H must be 'ZERO', 'SQ <w> <y>' or 'LSQ <matrix> <vector> [w]'", line)


def _parse_operator(opspec: str, n: int, matrices, graphs, line: int) -> LinOp:
    tokens = opspec.split()
    try:
        if tokens == ['I']:
            return IdentityOp(n)
        if len(tokens) == 2 and tokens[0] == 'INC' and tokens[1] in graphs:
            return incidence_operator(graphs[tokens[1]])
        if len(tokens) == 1 and tokens[0] in matrices:
            return DenseOp(matrices[tokens[0]])
    except PrimalDualError as exc:
        raise ParseError(str(exc), line) from exc
    raise ParseError(f"operator must be 'I', a MATRIX name or 'INC <graph>', got {opspec!r}", line)


def read_problem(path: PathLike) -> CompositeProblem:
    return parse_problem(_read(path))
