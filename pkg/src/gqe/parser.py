"""Recursive-descent parser for the supported openCypher fragment.

A query is a UNION of single queries; each single query is a sequence of
query parts, and the clauses of each part follow
``MATCH* ((WITH UNWIND?) | UNWIND | RETURN)`` with RETURN only in the
last part.  Keywords are case-insensitive, identifiers are not.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .errors import CypherSyntaxError, StructureError
from .expressions import (
    AggCall,
    Arith,
    BoolOp,
    Cmp,
    HasLabels,
    IsNull,
    Literal,
    PatternPredicate,
    PropAccess,
    Var,
)

# --- AST --------------------------------------------------------------------


@dataclass(frozen=True)
class NodePattern:
    name: Optional[str] = None
    labels: tuple = ()


@dataclass(frozen=True)
class RelPattern:
    """A relationship; ``max_hops=None`` means unbounded, ``ranged`` marks ``*`` syntax."""

    name: Optional[str] = None
    direction: str = "both"
    types: tuple = ()
    min_hops: int = 1
    max_hops: Optional[int] = 1
    ranged: bool = False


@dataclass(frozen=True)
class PatternPart:
    nodes: tuple
    rels: tuple = ()

    def __post_init__(self):
        if len(self.nodes) != len(self.rels) + 1:
            raise ValueError("a pattern needs one more node than relationships")


@dataclass(frozen=True)
class MatchClause:
    patterns: tuple
    optional: bool = False
    where: object = None


@dataclass(frozen=True)
class ReturnItem:
    expr: object
    alias: Optional[str] = None
    text: str = ""

    @property
    def name(self) -> str:
        return self.alias if self.alias is not None else self.text


@dataclass(frozen=True)
class SortItem:
    expr: object
    descending: bool = False


@dataclass(frozen=True)
class UnwindItem:
    expr: object
    alias: str


@dataclass(frozen=True)
class With:
    items: tuple
    distinct: bool = False
    where: object = None
    unwind: Optional[UnwindItem] = None


@dataclass(frozen=True)
class UnwindOnly:
    unwind: UnwindItem


@dataclass(frozen=True)
class Return:
    items: tuple
    distinct: bool = False
    order_by: tuple = ()
    skip: Optional[int] = None
    limit: Optional[int] = None


@dataclass(frozen=True)
class QueryPart:
    matches: tuple
    tail: object


@dataclass(frozen=True)
class SingleQuery:
    parts: tuple


@dataclass(frozen=True)
class Query:
    singles: tuple
    combinators: tuple = ()  # "UNION" or "UNION ALL"


# --- lexer ------------------------------------------------------------------

KEYWORDS = {
    "MATCH", "OPTIONAL", "WHERE", "WITH", "UNWIND", "RETURN", "AS", "DISTINCT",
    "ORDER", "BY", "SKIP", "LIMIT", "ASC", "ASCENDING", "DESC", "DESCENDING",
    "UNION", "ALL", "AND", "OR", "NOT",
}
CLAUSE_START = {"MATCH", "OPTIONAL", "WITH", "UNWIND", "RETURN", "UNION"}
FUNCTIONS = {"count", "sum", "avg", "min", "max", "collect"}


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, KEYWORD, INT, FLOAT, STRING, PUNCT, EOF
    value: object
    start: int
    end: int
    quoted: bool = False

    def is_kw(self, *words) -> bool:
        return self.kind == "KEYWORD" and self.value in words

    def is_punct(self, *symbols) -> bool:
        return self.kind == "PUNCT" and self.value in symbols

    def describe(self) -> str:
        if self.kind == "EOF":
            return "end of input"
        if self.kind == "STRING":
            return "string literal"
        return repr(str(self.value))


_NUMBER = re.compile(r"\d+(?:\.\d+(?![.\d]))?(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_PUNCT2 = ("..", "<>", "<=", ">=")
_PUNCT1 = "()[]{}:,.*|-+/=<>;%"
_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f", "\\": "\\", "'": "'", '"': '"'}


def position(text: str, offset: int) -> tuple[int, int]:
    """1-based (line, column) of a character offset."""
    offset = max(0, min(offset, len(text)))
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, column


def _error(text, offset, message, cls=CypherSyntaxError):
    line, column = position(text, offset)
    return cls(message, line, column, offset)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if text.startswith("//", i):
            nl = text.find("\n", i)
            i = n if nl < 0 else nl + 1
            continue
        if ch.isdigit():
            m = _NUMBER.match(text, i)
            raw = m.group()
            if "." in raw or "e" in raw or "E" in raw:
                tokens.append(Token("FLOAT", float(raw), i, m.end()))
            else:
                tokens.append(Token("INT", int(raw), i, m.end()))
            i = m.end()
            continue
        if ch.isalpha() or ch == "_":
            m = _IDENT.match(text, i)
            word = m.group()
            if word.upper() in KEYWORDS:
                tokens.append(Token("KEYWORD", word.upper(), i, m.end()))
            else:
                tokens.append(Token("IDENT", word, i, m.end()))
            i = m.end()
            continue
        if ch == "`":
            j, buf = i + 1, []
            while True:
                if j >= n:
                    raise _error(text, i, "unterminated quoted identifier")
                if text[j] == "`":
                    if text.startswith("``", j):
                        buf.append("`")
                        j += 2
                        continue
                    break
                buf.append(text[j])
                j += 1
            if not buf:
                raise _error(text, i, "empty quoted identifier")
            tokens.append(Token("IDENT", "".join(buf), i, j + 1, quoted=True))
            i = j + 1
            continue
        if ch in "'\"":
            j, buf = i + 1, []
            while True:
                if j >= n:
                    raise _error(text, i, "unterminated string literal")
                c = text[j]
                if c == ch:
                    break
                if c == "\\":
                    if j + 1 >= n:
                        raise _error(text, i, "unterminated string literal")
                    esc = text[j + 1]
                    if esc == "u":
                        digits = text[j + 2 : j + 6]
                        if len(digits) != 4 or not all(d in "0123456789abcdefABCDEF" for d in digits):
                            raise _error(text, j, "invalid unicode escape")
                        buf.append(chr(int(digits, 16)))
                        j += 6
                        continue
                    if esc not in _ESCAPES:
                        raise _error(text, j, f"invalid escape sequence '\\{esc}'")
                    buf.append(_ESCAPES[esc])
                    j += 2
                    continue
                buf.append(c)
                j += 1
            tokens.append(Token("STRING", "".join(buf), i, j + 1))
            i = j + 1
            continue
        two = text[i : i + 2]
        if two in _PUNCT2:
            tokens.append(Token("PUNCT", two, i, i + 2))
            i += 2
            continue
        if ch in _PUNCT1:
            tokens.append(Token("PUNCT", ch, i, i + 1))
            i += 1
            continue
        raise _error(text, i, f"unexpected character {ch!r}")
    tokens.append(Token("EOF", None, n, n))
    return tokens


# --- parser -----------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def fail(self, expected: str, token: Token | None = None):
        token = token or self.tok
        return _error(self.text, token.start, f"expected {expected} but found {token.describe()}")

    def expect_punct(self, symbol: str) -> Token:
        if not self.tok.is_punct(symbol):
            raise self.fail(f"'{symbol}'")
        return self.advance()

    def expect_kw(self, word: str) -> Token:
        if not self.tok.is_kw(word):
            raise self.fail(word)
        return self.advance()

    def accept_punct(self, symbol: str) -> bool:
        if self.tok.is_punct(symbol):
            self.advance()
            return True
        return False

    def accept_kw(self, *words) -> bool:
        if self.tok.is_kw(*words):
            self.advance()
            return True
        return False

    def ident(self, what: str = "identifier") -> str:
        if self.tok.kind != "IDENT":
            raise self.fail(what)
        return self.advance().value

    def nat(self, what: str) -> int:
        if self.tok.kind != "INT":
            raise self.fail(what)
        return self.advance().value

    # query structure

    def query(self) -> Query:
        singles = [self.single_query()]
        combinators = []
        while self.tok.is_kw("UNION"):
            self.advance()
            combinators.append("UNION ALL" if self.accept_kw("ALL") else "UNION")
            singles.append(self.single_query())
        self.accept_punct(";")
        if self.tok.kind != "EOF":
            if self.tok.is_kw(*CLAUSE_START):
                raise _error(self.text, self.tok.start, f"{self.tok.value} cannot follow RETURN", StructureError)
            raise self.fail("end of query")
        return Query(tuple(singles), tuple(combinators))

    def single_query(self) -> SingleQuery:
        parts: list[QueryPart] = []
        matches: list[MatchClause] = []
        start = self.tok
        while True:
            t = self.tok
            if t.is_kw("MATCH", "OPTIONAL"):
                matches.append(self.match_clause())
            elif t.is_kw("WITH"):
                tail = self.with_clause()
                parts.append(QueryPart(tuple(matches), tail))
                matches = []
            elif t.is_kw("UNWIND"):
                parts.append(QueryPart(tuple(matches), UnwindOnly(self.unwind_clause())))
                matches = []
            elif t.is_kw("RETURN"):
                parts.append(QueryPart(tuple(matches), self.return_clause()))
                nxt = self.tok
                if nxt.is_kw("MATCH", "OPTIONAL", "WITH", "UNWIND", "RETURN"):
                    raise _error(self.text, nxt.start, f"{nxt.value} cannot follow RETURN", StructureError)
                return SingleQuery(tuple(parts))
            else:
                if t.kind == "EOF" and (parts or matches):
                    raise _error(self.text, t.start, "query must end with a RETURN clause", StructureError)
                if t.is_kw("UNION") and (parts or matches):
                    raise _error(self.text, t.start, "UNION must follow a RETURN clause", StructureError)
                if t is start or t.kind == "EOF":
                    raise self.fail("MATCH, OPTIONAL MATCH, WITH, UNWIND or RETURN")
                raise self.fail("a clause (MATCH, WITH, UNWIND or RETURN)")

    def match_clause(self) -> MatchClause:
        optional = self.accept_kw("OPTIONAL")
        self.expect_kw("MATCH")
        patterns = [self.pattern()]
        while self.accept_punct(","):
            patterns.append(self.pattern())
        where = self.expr() if self.accept_kw("WHERE") else None
        return MatchClause(tuple(patterns), optional, where)

    def with_clause(self) -> With:
        self.expect_kw("WITH")
        distinct = self.accept_kw("DISTINCT")
        items = self.items()
        where = self.expr() if self.accept_kw("WHERE") else None
        unwind = self.unwind_clause() if self.tok.is_kw("UNWIND") else None
        return With(items, distinct, where, unwind)

    def unwind_clause(self) -> UnwindItem:
        self.expect_kw("UNWIND")
        expr = self.expr()
        self.expect_kw("AS")
        return UnwindItem(expr, self.ident("variable name after AS"))

    def return_clause(self) -> Return:
        self.expect_kw("RETURN")
        distinct = self.accept_kw("DISTINCT")
        items = self.items()
        order_by = []
        if self.accept_kw("ORDER"):
            self.expect_kw("BY")
            while True:
                expr = self.expr()
                descending = False
                if self.accept_kw("DESC", "DESCENDING"):
                    descending = True
                else:
                    self.accept_kw("ASC", "ASCENDING")
                order_by.append(SortItem(expr, descending))
                if not self.accept_punct(","):
                    break
        skip = self.nat("a non-negative integer after SKIP") if self.accept_kw("SKIP") else None
        limit = self.nat("a non-negative integer after LIMIT") if self.accept_kw("LIMIT") else None
        return Return(items, distinct, tuple(order_by), skip, limit)

    def items(self) -> tuple:
        out = [self.item()]
        while self.accept_punct(","):
            out.append(self.item())
        return tuple(out)

    def item(self) -> ReturnItem:
        first = self.tok
        if first.kind == "EOF" or first.is_kw(*CLAUSE_START):
            raise self.fail("an expression")
        expr = self.expr()
        last = self.tokens[self.pos - 1]
        text = self.text[first.start : last.end].strip()
        alias = self.ident("alias after AS") if self.accept_kw("AS") else None
        return ReturnItem(expr, alias, text)

    # patterns

    def pattern(self) -> PatternPart:
        nodes = [self.node()]
        rels = []
        while self.tok.is_punct("-", "<"):
            rels.append(self.relationship())
            nodes.append(self.node())
        return PatternPart(tuple(nodes), tuple(rels))

    def node(self) -> NodePattern:
        self.expect_punct("(")
        name = self.advance().value if self.tok.kind == "IDENT" else None
        labels = []
        while self.accept_punct(":"):
            labels.append(self.ident("label name"))
        self.expect_punct(")")
        return NodePattern(name, tuple(labels))

    def relationship(self) -> RelPattern:
        left = self.accept_punct("<")
        self.expect_punct("-")
        name, types, lo, hi, ranged = None, [], 1, 1, False
        if self.accept_punct("["):
            if self.tok.kind == "IDENT":
                name = self.advance().value
            if self.accept_punct(":"):
                types.append(self.ident("relationship type"))
                while self.accept_punct("|"):
                    self.accept_punct(":")
                    types.append(self.ident("relationship type"))
            if self.tok.is_punct("*"):
                star = self.advance()
                ranged = True
                lo, hi = 1, None
                if self.tok.kind == "INT":
                    lo = self.advance().value
                    hi = lo
                    if self.accept_punct(".."):
                        hi = self.advance().value if self.tok.kind == "INT" else None
                elif self.accept_punct(".."):
                    hi = self.nat("an upper bound after '..'")
                if hi is not None and lo > hi:
                    raise _error(self.text, star.start, f"invalid range *{lo}..{hi}")
            self.expect_punct("]")
        self.expect_punct("-")
        right = self.accept_punct(">")
        if left and not right:
            direction = "in"
        elif right and not left:
            direction = "out"
        else:
            direction = "both"
        return RelPattern(name, direction, tuple(types), lo, hi, ranged)

    # expressions

    def expr(self):
        return self.or_expr()

    def or_expr(self):
        operands = [self.and_expr()]
        while self.accept_kw("OR"):
            operands.append(self.and_expr())
        return operands[0] if len(operands) == 1 else BoolOp("or", tuple(operands))

    def and_expr(self):
        operands = [self.not_expr()]
        while self.accept_kw("AND"):
            operands.append(self.not_expr())
        return operands[0] if len(operands) == 1 else BoolOp("and", tuple(operands))

    def not_expr(self):
        if self.accept_kw("NOT"):
            return BoolOp("not", (self.not_expr(),))
        return self.comparison()

    def comparison(self):
        left = self.additive()
        t = self.tok
        if t.is_punct("=", "<>", "<", "<=", ">", ">="):
            self.advance()
            left = Cmp(t.value, left, self.additive())
            t = self.tok
        if t.kind == "IDENT" and not t.quoted and t.value.upper() == "IS":
            self.advance()
            negated = self.accept_kw("NOT")
            nt = self.tok
            if not (nt.kind == "IDENT" and not nt.quoted and nt.value.upper() == "NULL"):
                raise self.fail("NULL")
            self.advance()
            left = IsNull(left, negated)
        return left

    def additive(self):
        left = self.multiplicative()
        while self.tok.is_punct("+", "-"):
            op = self.advance().value
            left = Arith(op, (left, self.multiplicative()))
        return left

    def multiplicative(self):
        left = self.unary()
        while self.tok.is_punct("*", "/"):
            op = self.advance().value
            left = Arith(op, (left, self.unary()))
        return left

    def unary(self):
        if self.accept_punct("-"):
            operand = self.unary()
            if isinstance(operand, Literal) and type(operand.value) in (int, float):
                return Literal(-operand.value)
            return Arith("-", (operand,))
        if self.accept_punct("+"):
            return self.unary()
        return self.postfix()

    def postfix(self):
        start = self.tok
        base = self.primary()
        if self.tok.is_punct("."):
            if not isinstance(base, Var):
                raise _error(self.text, self.tok.start, "property access requires a variable")
            self.advance()
            key = self.property_key()
            if self.tok.is_punct("."):
                raise _error(self.text, self.tok.start, "nested property access is not supported")
            return PropAccess(base.name, key)
        if self.tok.is_punct(":") and isinstance(base, Var) and start.kind == "IDENT":
            labels = []
            while self.accept_punct(":"):
                labels.append(self.ident("label name"))
            return HasLabels(base.name, tuple(labels))
        return base

    def property_key(self) -> str:
        t = self.tok
        if t.kind == "IDENT" or t.kind == "KEYWORD":
            self.advance()
            return t.value if t.kind == "IDENT" else self.text[t.start : t.end]
        raise self.fail("property name")

    def primary(self):
        t = self.tok
        if t.kind in ("INT", "FLOAT", "STRING"):
            self.advance()
            return Literal(t.value)
        if t.kind == "IDENT":
            if not t.quoted:
                upper = t.value.upper()
                if upper in ("TRUE", "FALSE"):
                    self.advance()
                    return Literal(upper == "TRUE")
                if upper == "NULL":
                    self.advance()
                    return Literal(None)
                if self.peek().is_punct("("):
                    return self.function_call()
            self.advance()
            return Var(t.value)
        if t.is_punct("("):
            pattern = self.try_pattern()
            if pattern is not None:
                return pattern
            self.advance()
            inner = self.expr()
            self.expect_punct(")")
            return inner
        raise self.fail("an expression")

    def try_pattern(self):
        """Parse ``(`` as a pattern if that works and yields more than a bare node."""
        saved = self.pos
        try:
            part = self.pattern()
        except CypherSyntaxError:
            self.pos = saved
            return None
        if part.rels:
            return PatternPredicate(part)
        node = part.nodes[0]
        if node.labels and node.name is not None:
            return HasLabels(node.name, node.labels)
        self.pos = saved
        return None

    def function_call(self):
        name_tok = self.advance()
        fn = name_tok.value.lower()
        if fn not in FUNCTIONS:
            raise _error(self.text, name_tok.start, f"unknown function '{name_tok.value}'")
        self.expect_punct("(")
        if fn == "count" and self.accept_punct("*"):
            self.expect_punct(")")
            return AggCall("count", None)
        distinct = self.accept_kw("DISTINCT")
        if distinct and fn != "count":
            raise _error(self.text, self.tokens[self.pos - 1].start, "DISTINCT is only supported inside count()")
        arg = self.expr()
        self.expect_punct(")")
        return AggCall("count_distinct" if distinct else fn, arg)


def parse(text: str) -> Query:
    """Parse query text into a :class:`Query`."""
    return _Parser(text).query()


def parse_expr(text: str):
    """Parse a standalone expression (test and debugging entry point)."""
    p = _Parser(text)
    expr = p.expr()
    if p.tok.kind != "EOF":
        raise p.fail("end of expression")
    return expr


def parse_pattern(text: str) -> PatternPart:
    p = _Parser(text)
    part = p.pattern()
    if p.tok.kind != "EOF":
        raise p.fail("end of pattern")
    return part
