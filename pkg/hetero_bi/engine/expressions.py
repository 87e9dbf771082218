"""Closed-form expressions from run configs.

Custom potentials W(s) and weights a(t) arrive as strings in the config
file. They are parsed with sympy, differentiated symbolically, and turned
into vectorized numpy callables. The accepted grammar is documented in
docs/expression-grammar.md.
"""

from __future__ import annotations

import logging
import re
from collections.abc import Callable
from dataclasses import dataclass
from tokenize import TokenError

import numpy as np
import sympy as sp
from numpy.typing import ArrayLike
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from hetero_bi.engine.errors import ExpressionError

logger = logging.getLogger(__name__)

_ALLOWED_CHARS = re.compile(r"^[0-9a-z.+\-*/^() \t]+$")
_NAME = re.compile(r"[a-z]+")

_FUNCTIONS: dict[str, object] = {
    "sqrt": sp.sqrt,
    "abs": sp.Abs,
    "exp": sp.exp,
    "sin": sp.sin,
    "cos": sp.cos,
    "pi": sp.pi,
}

_TRANSFORMATIONS = standard_transformations + (convert_xor,)


@dataclass(frozen=True)
class CompiledExpression:
    """A parsed expression with its first two derivatives.

    Attributes:
        text: Source string as written in the config.
        variable: Name of the free variable ("s" or "t").
        expr: Parsed sympy expression.
        value: Vectorized f(x).
        derivative: Vectorized f'(x).
        second: Vectorized f''(x).
    """

    text: str
    variable: str
    expr: sp.Expr
    value: Callable[[ArrayLike], float | np.ndarray]
    derivative: Callable[[ArrayLike], float | np.ndarray]
    second: Callable[[ArrayLike], float | np.ndarray]


def _vectorized(fn: Callable) -> Callable[[ArrayLike], float | np.ndarray]:
    def call(x: ArrayLike) -> float | np.ndarray:
        arr = np.asarray(x, dtype=float)
        out = np.asarray(fn(arr), dtype=float)
        if out.shape != arr.shape:
            # constant expressions come back as scalars
            out = np.broadcast_to(out, arr.shape).copy()
        if arr.ndim == 0:
            return float(out)
        return out

    return call


def compile_expression(text: str, variable: str) -> CompiledExpression:
    """Parse and compile an expression in one variable.

    Args:
        text: Expression source, e.g. "0.25*(s^2 - 1)^2".
        variable: The single free variable allowed ("s" for potentials, "t" for weights).

    Returns:
        CompiledExpression with value and derivative callables.

    Raises:
        ExpressionError: If the text uses characters or names outside the grammar,
            fails to parse, or depends on anything but the variable.
    """
    source = text.strip().lower()
    if not source or not _ALLOWED_CHARS.match(source):
        raise ExpressionError(f"expression {text!r} contains characters outside the grammar")

    allowed = {variable, *_FUNCTIONS}
    unknown = sorted({name for name in _NAME.findall(source) if name not in allowed})
    if unknown:
        raise ExpressionError(
            f"expression {text!r} uses unknown names {unknown}; "
            f"allowed: {sorted(allowed)}"
        )

    symbol = sp.Symbol(variable, real=True)
    local_dict = {variable: symbol, **_FUNCTIONS}
    try:
        expr = parse_expr(source, local_dict=local_dict, transformations=_TRANSFORMATIONS)
    except (SyntaxError, TokenError, TypeError, sp.SympifyError) as exc:
        raise ExpressionError(f"cannot parse expression {text!r}: {exc}") from exc

    if not isinstance(expr, sp.Expr):
        raise ExpressionError(f"expression {text!r} is not arithmetic")
    extra = expr.free_symbols - {symbol}
    if extra:
        raise ExpressionError(f"expression {text!r} has free symbols {sorted(map(str, extra))}")

    first = sp.diff(expr, symbol)
    second = sp.diff(first, symbol)
    logger.debug("Compiled %r in %s: derivative %s", text, variable, first)

    return CompiledExpression(
        text=text,
        variable=variable,
        expr=expr,
        value=_vectorized(sp.lambdify(symbol, expr, modules="numpy")),
        derivative=_vectorized(sp.lambdify(symbol, first, modules="numpy")),
        second=_vectorized(sp.lambdify(symbol, second, modules="numpy")),
    )
