"""
Recursive-descent parser for Hamiltonian expressions.

Grammar (usual precedence, ^ binds tightest and is right-associative):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | IDENT | FUNC '(' expr ')' | '(' expr ')'

Identifiers are q1..qn and p1..pn (plain q and p for one degree of
freedom); functions are sin, cos and exp. Exponents must be integer
constants.
"""

import math
import re
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from models.errors import ExpressionError

FUNCTIONS = {
    'sin': (math.sin, 'sin'),
    'cos': (math.cos, 'cos'),
    'exp': (math.exp, 'exp'),
}

TOKEN_PATTERN = re.compile(r"""
    (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
  | (?P<space>\s+)
""", re.VERBOSE)

VARIABLE_PATTERN = re.compile(r'^([qp])(\d*)$')


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


# =============================================================================
# SYNTAX TREE
# =============================================================================

class Node:
    def evaluate(self, env):
        raise NotImplementedError


@dataclass(frozen=True)
class Number(Node):
    value: float

    def evaluate(self, env):
        return self.value


@dataclass(frozen=True)
class Variable(Node):
    kind: str      # 'q' or 'p'
    index: int     # zero-based degree of freedom

    def evaluate(self, env):
        return env[(self.kind, self.index)]


@dataclass(frozen=True)
class Negate(Node):
    operand: Node

    def evaluate(self, env):
        return -self.operand.evaluate(env)


@dataclass(frozen=True)
class Binary(Node):
    op: str
    left: Node
    right: Node

    def evaluate(self, env):
        a = self.left.evaluate(env)
        b = self.right.evaluate(env)
        if self.op == '+':
            return a + b
        if self.op == '-':
            return a - b
        if self.op == '*':
            return a * b
        return a / b


@dataclass(frozen=True)
class Power(Node):
    base: Node
    exponent: int

    def evaluate(self, env):
        return self.base.evaluate(env) ** self.exponent


@dataclass(frozen=True)
class Call(Node):
    name: str
    argument: Node

    def evaluate(self, env):
        value = self.argument.evaluate(env)
        if isinstance(value, (int, float)):
            return FUNCTIONS[self.name][0](value)
        return getattr(value, FUNCTIONS[self.name][1])()


# =============================================================================
# PARSER
# =============================================================================

def tokenize(text: str) -> List[Token]:
    tokens = []
    position = 0
    while position < len(text):
        match = TOKEN_PATTERN.match(text, position)
        if not match:
            raise ExpressionError(f"unexpected character '{text[position]}'", position)
        kind = match.lastgroup
        if kind != 'space':
            tokens.append(Token(kind, match.group(), position))
        position = match.end()
    tokens.append(Token('end', '', len(text)))
    return tokens


class ExpressionParser:
    """Parses one expression; `variables` collects the (kind, index) pairs used."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.variables = set()

    def parse(self) -> Node:
        if self.tokens[0].kind == 'end':
            raise ExpressionError("empty expression", 0)
        node = self._expr()
        token = self._peek()
        if token.kind != 'end':
            raise ExpressionError(f"unexpected '{token.text}'", token.position)
        return node

    def _peek(self) -> Token:
        return self.tokens[self.pos]

    def _advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def _accept(self, *symbols: str) -> Optional[Token]:
        token = self._peek()
        if token.kind == 'op' and token.text in symbols:
            return self._advance()
        return None

    def _expect(self, symbol: str) -> Token:
        token = self._peek()
        if token.kind == 'op' and token.text == symbol:
            return self._advance()
        found = token.text or 'end of input'
        raise ExpressionError(f"expected '{symbol}' but found '{found}'", token.position)

    def _expr(self) -> Node:
        node = self._term()
        while True:
            token = self._accept('+', '-')
            if not token:
                return node
            node = Binary(token.text, node, self._term())

    def _term(self) -> Node:
        node = self._unary()
        while True:
            token = self._accept('*', '/')
            if not token:
                return node
            node = Binary(token.text, node, self._unary())

    def _unary(self) -> Node:
        if self._accept('-'):
            return Negate(self._unary())
        if self._accept('+'):
            return self._unary()
        return self._power()

    def _power(self) -> Node:
        base = self._atom()
        token = self._accept('^')
        if not token:
            return base
        exponent_position = self._peek().position
        exponent = self._unary()
        value = _constant(exponent)
        if value is None or value != int(value):
            raise ExpressionError("exponent must be an integer constant", exponent_position)
        return Power(base, int(value))

    def _atom(self) -> Node:
        token = self._advance()
        if token.kind == 'number':
            return Number(float(token.text))
        if token.kind == 'ident':
            if token.text in FUNCTIONS:
                self._expect('(')
                argument = self._expr()
                self._expect(')')
                return Call(token.text, argument)
            match = VARIABLE_PATTERN.match(token.text)
            if not match or match.group(2).startswith('0'):
                raise ExpressionError(f"unknown identifier '{token.text}'", token.position)
            index = int(match.group(2)) - 1 if match.group(2) else 0
            variable = Variable(match.group(1), index)
            self.variables.add((variable.kind, variable.index, bool(match.group(2))))
            return variable
        if token.kind == 'op' and token.text == '(':
            node = self._expr()
            self._expect(')')
            return node
        found = token.text or 'end of input'
        raise ExpressionError(f"unexpected '{found}'", token.position)


def _constant(node: Node) -> Optional[float]:
    if isinstance(node, Number):
        return node.value
    if isinstance(node, Negate):
        inner = _constant(node.operand)
        return None if inner is None else -inner
    return None


def parse_expression(text: str, n_pairs: Optional[int] = None) -> Tuple[Node, int]:
    """
    Parse an expression and settle the number of degrees of freedom.

    Args:
        text: Expression text
        n_pairs: Degrees of freedom; inferred from the identifiers when None

    Returns:
        (syntax tree, n_pairs)

    Raises:
        ExpressionError: syntax error, unknown identifier, non-integer
                         exponent, or identifiers beyond n_pairs
    """
    parser = ExpressionParser(text)
    tree = parser.parse()
    used = parser.variables
    bare = any(not numbered for _, _, numbered in used)
    highest = max((index + 1 for _, index, _ in used), default=1)
    if n_pairs is None:
        n_pairs = highest
    if bare and n_pairs != 1:
        raise ExpressionError("bare q and p are only allowed for one degree of freedom")
    if highest > n_pairs:
        raise ExpressionError(f"expression uses degree of freedom {highest} but n = {n_pairs}")
    return tree, n_pairs


def compile_expression(tree: Node, n_pairs: int) -> Callable[[list], object]:
    """φ ↦ value; φ is ordered (q1..qn, p1..pn) and may hold HyperDuals."""
    def evaluate(phi):
        env: Dict[Tuple[str, int], object] = {}
        for i in range(n_pairs):
            env[('q', i)] = phi[i]
            env[('p', i)] = phi[n_pairs + i]
        return tree.evaluate(env)
    return evaluate
