"""Boolean predicates over the control-register value ``x``.

A predicate is written in a small C-like expression language, parsed into an
AST and compiled to a dense :class:`TruthTable` over ``x in [0, 2**n)``.
Arithmetic is unsigned 64-bit; shifts by 64 or more give 0.

Grammar (lowest precedence first)::

    expr      = or_expr ;
    or_expr   = and_expr { "||" and_expr } ;
    and_expr  = cmp_expr { "&&" cmp_expr } ;
    cmp_expr  = bor_expr [ ("==" | "!=" | "<" | "<=" | ">" | ">=") bor_expr ] ;
    bor_expr  = bxor_expr { "|" bxor_expr } ;
    bxor_expr = band_expr { "^" band_expr } ;
    band_expr = shift_expr { "&" shift_expr } ;
    shift_expr= unary { ("<<" | ">>") unary } ;
    unary     = "!" unary | primary ;
    primary   = INT | "x" | "true" | "false" | "(" expr ")" ;
    INT       = decimal | "0x" hex digits | "0b" binary digits ;
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np
import numpy.typing as npt

from .errors import (
    CapacityError,
    PredicateSyntaxError,
    PredicateTypeError,
    UnknownIdentifierError,
    ValidationError,
)

MAX_WIDTH = 20
U64_MAX = 2**64 - 1

COMPARISON_OPS = ("==", "!=", "<", "<=", ">", ">=")
BITWISE_OPS = ("&", "|", "^", "<<", ">>")
LOGICAL_OPS = ("&&", "||")


# --- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Var:
    name: str = "x"


@dataclass(frozen=True)
class Not:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


Node = Union[IntLit, BoolLit, Var, Not, BinOp]


def to_source(node: Node) -> str:
    """Render an AST back to fully parenthesised source."""
    if isinstance(node, IntLit):
        return str(node.value)
    if isinstance(node, BoolLit):
        return "true" if node.value else "false"
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Not):
        return f"!{to_source(node.operand)}"
    return f"({to_source(node.left)} {node.op} {to_source(node.right)})"


# --- lexer -------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<int>0[xX][0-9a-fA-F]+|0[bB][01]+|[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>&&|\|\||==|!=|<=|>=|<<|>>|[<>!&|^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "int", "ident", "op", "eof"
    text: str
    offset: int  # byte offset into the UTF-8 source


def _tokenize(source: str) -> Iterator[_Token]:
    pos = 0
    byte_pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise PredicateSyntaxError(f"unexpected character {source[pos]!r}", byte_pos)
        text = m.group()
        if m.lastgroup != "ws":
            yield _Token(m.lastgroup, text, byte_pos)
        pos = m.end()
        byte_pos += len(text.encode("utf-8"))
    yield _Token("eof", "", byte_pos)


# --- parser ------------------------------------------------------------------

_PRIMARY_START = ("INT", "x", "true", "false", "(", "!")


class _Parser:
    def __init__(self, source: str):
        self.tokens = list(_tokenize(source))
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _take(self, *ops: str) -> str | None:
        if self.tok.kind == "op" and self.tok.text in ops:
            self.i += 1
            return self.tokens[self.i - 1].text
        return None

    def _fail(self, expected: tuple[str, ...]):
        what = "end of input" if self.tok.kind == "eof" else f"token {self.tok.text!r}"
        raise PredicateSyntaxError(f"unexpected {what}", self.tok.offset, expected)

    def parse(self) -> Node:
        node = self.or_expr()
        if self.tok.kind != "eof":
            self._fail(("||", "&&", *COMPARISON_OPS, *BITWISE_OPS, "end of input"))
        return node

    def _left_assoc(self, ops: tuple[str, ...], sub) -> Node:
        node = sub()
        while (op := self._take(*ops)) is not None:
            node = BinOp(op, node, sub())
        return node

    def or_expr(self) -> Node:
        return self._left_assoc(("||",), self.and_expr)

    def and_expr(self) -> Node:
        return self._left_assoc(("&&",), self.cmp_expr)

    def cmp_expr(self) -> Node:
        node = self.bor_expr()
        op = self._take(*COMPARISON_OPS)
        if op is not None:
            node = BinOp(op, node, self.bor_expr())
            if self.tok.kind == "op" and self.tok.text in COMPARISON_OPS:
                raise PredicateSyntaxError(
                    "chained comparisons need parentheses", self.tok.offset, ("&&", "||", ")", "end of input")
                )
        return node

    def bor_expr(self) -> Node:
        return self._left_assoc(("|",), self.bxor_expr)

    def bxor_expr(self) -> Node:
        return self._left_assoc(("^",), self.band_expr)

    def band_expr(self) -> Node:
        return self._left_assoc(("&",), self.shift_expr)

    def shift_expr(self) -> Node:
        return self._left_assoc(("<<", ">>"), self.unary)

    def unary(self) -> Node:
        if self._take("!"):
            return Not(self.unary())
        return self.primary()

    def primary(self) -> Node:
        tok = self.tok
        if tok.kind == "int":
            value = int(tok.text, 0) if not tok.text.isdigit() else int(tok.text)
            if value > U64_MAX:
                raise PredicateSyntaxError("integer literal does not fit in 64 bits", tok.offset)
            self.i += 1
            return IntLit(value)
        if tok.kind == "ident":
            self.i += 1
            if tok.text == "x":
                return Var()
            if tok.text in ("true", "false"):
                return BoolLit(tok.text == "true")
            raise UnknownIdentifierError(tok.text, tok.offset)
        if self._take("("):
            node = self.or_expr()
            if not self._take(")"):
                self._fail((")",))
            return node
        self._fail(_PRIMARY_START)


def parse(source: str) -> Node:
    """Parse predicate source text into an AST.

    >>> parse("x == 3")
    BinOp(op='==', left=Var(name='x'), right=IntLit(value=3))
    """
    return _Parser(source).parse()


# --- typing ------------------------------------------------------------------

def infer_type(node: Node) -> str:
    """Return ``"int"`` or ``"bool"``; raise PredicateTypeError on mismatch."""
    if isinstance(node, (IntLit, Var)):
        return "int"
    if isinstance(node, BoolLit):
        return "bool"
    if isinstance(node, Not):
        if infer_type(node.operand) != "bool":
            raise PredicateTypeError("'!' needs a boolean operand")
        return "bool"
    lt, rt = infer_type(node.left), infer_type(node.right)
    if node.op in LOGICAL_OPS:
        if lt != "bool" or rt != "bool":
            raise PredicateTypeError(f"'{node.op}' needs boolean operands, got {lt} and {rt}")
        return "bool"
    if lt != "int" or rt != "int":
        raise PredicateTypeError(f"'{node.op}' needs integer operands, got {lt} and {rt}")
    return "bool" if node.op in COMPARISON_OPS else "int"


# --- truth tables --------------------------------------------------------------

class TruthTable:
    """Dense table of f over ``[0, 2**n)``; immutable."""

    __slots__ = ("n", "bits")

    def __init__(self, n: int, bits):
        arr = np.array(bits, dtype=np.uint8).reshape(-1)
        if n < 1:
            raise ValidationError(f"table width must be positive, got n={n}")
        if arr.size != 2**n:
            raise ValidationError(f"table for n={n} needs {2**n} bits, got {arr.size}")
        if np.any(arr > 1):
            raise ValidationError("truth table entries must be 0 or 1")
        arr.flags.writeable = False
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "bits", arr)

    def __setattr__(self, name, value):
        raise AttributeError("TruthTable is immutable")

    @classmethod
    def from_marked(cls, n: int, marked) -> "TruthTable":
        bits = np.zeros(2**n, dtype=np.uint8)
        for y in marked:
            if not 0 <= y < 2**n:
                raise ValidationError(f"marked value {y} outside [0, {2**n})")
            bits[y] = 1
        return cls(n, bits)

    @classmethod
    def constant(cls, n: int, value: int) -> "TruthTable":
        return cls(n, np.full(2**n, value, dtype=np.uint8))

    @property
    def size(self) -> int:
        return self.bits.size

    def __len__(self) -> int:
        return self.bits.size

    def __getitem__(self, y: int) -> int:
        return int(self.bits[y])

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash((self.n, self.bits.tobytes()))

    def __repr__(self) -> str:
        if self.size <= 16:
            return f"TruthTable(n={self.n}, bits={self.bits.tolist()})"
        return f"TruthTable(n={self.n}, marked={len(marked_set(self))})"

    def to_dict(self) -> dict:
        return {"n": self.n, "bits": self.bits.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "TruthTable":
        try:
            return cls(int(d["n"]), d["bits"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed truth table object: {exc}") from exc

    def to_hex(self) -> str:
        """Hex packing: bit y of the integer sum(bits[y] << y), most significant digit first."""
        value = int.from_bytes(np.packbits(self.bits[::-1]).tobytes(), "big") >> ((-self.size) % 8)
        return format(value, f"0{max(1, (self.size + 3) // 4)}x")

    @classmethod
    def from_hex(cls, n: int, text: str) -> "TruthTable":
        value = int(text, 16)
        if value >> (2**n):
            raise ValidationError(f"hex table has bits beyond index {2**n - 1}")
        return cls(n, [(value >> y) & 1 for y in range(2**n)])


def _eval(node: Node, xs: npt.NDArray[np.uint64]) -> np.ndarray:
    size = xs.size
    if isinstance(node, IntLit):
        return np.full(size, node.value, dtype=np.uint64)
    if isinstance(node, BoolLit):
        return np.full(size, node.value, dtype=bool)
    if isinstance(node, Var):
        return xs
    if isinstance(node, Not):
        return ~_eval(node.operand, xs)
    a, b = _eval(node.left, xs), _eval(node.right, xs)
    op = node.op
    if op == "||":
        return a | b
    if op == "&&":
        return a & b
    if op == "==":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    if op == "&":
        return a & b
    if op == "|":
        return a | b
    if op == "^":
        return a ^ b
    big = b >= np.uint64(64)
    amount = np.where(big, np.uint64(0), b)
    shifted = (a << amount) if op == "<<" else (a >> amount)
    return np.where(big, np.uint64(0), shifted)


def compile_truth_table(ast: Node | str, n: int, max_width: int = MAX_WIDTH) -> TruthTable:
    """Evaluate the predicate at every ``x in [0, 2**n)``."""
    if isinstance(ast, str):
        ast = parse(ast)
    if n < 1:
        raise ValidationError(f"control width must be positive, got n={n}")
    if n > max_width:
        raise CapacityError(f"control width n={n} exceeds cap {max_width}")
    if infer_type(ast) != "bool":
        raise PredicateTypeError("predicate must be boolean-valued (e.g. 'x & 1 == 1', not 'x & 1')")
    xs = np.arange(2**n, dtype=np.uint64)
    return TruthTable(n, _eval(ast, xs).astype(np.uint8))


def marked_set(table: TruthTable) -> list[int]:
    """Ascending list of the values y with f(y) = 1."""
    return np.flatnonzero(table.bits).tolist()
