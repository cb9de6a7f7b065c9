"""Constant folding over small literal-bound expressions.

Supports the pattern prover and the literal-guard detector. Java expressions
are first normalized into python-evaluable text (Math.* calls, .length,
instanceof, casts, array literals). Evaluation walks a restricted AST; any
construct outside the whitelist raises FoldError, which callers treat as
"unprovable", never as a crash.
"""

from __future__ import annotations

import ast
import math
import re

from .code_model import Language


class FoldError(Exception):
    pass


_TYPE_SENTINELS = {"int": int, "str": str, "float": float, "bool": bool, "list": list}

_CALLS = {
    "floor": math.floor,
    "sorted": sorted,
    "abs": abs,
    "len": len,
    "min": min,
    "max": max,
    "int": int,
    "str": str,
    "float": float,
}

_JAVA_EXPR_REWRITES = [
    (re.compile(r"\bMath\.(floor|abs|min|max)\b"), r"\1"),
    (re.compile(r"\bInteger\.valueOf\b"), "int"),
    (re.compile(r"\bString\.valueOf\b"), "str"),
    (re.compile(r"(\w+)\.length\(\)"), r"len(\1)"),
    (re.compile(r"(\w+)\.length\b"), r"len(\1)"),
    (re.compile(r"\(\s*int\s*\)\s*(\w+)"), r"int(\1)"),
    (re.compile(r"\(\s*double\s*\)\s*(\w+)"), r"float(\1)"),
    (re.compile(r"(\w+)\s+instanceof\s+(?:String|CharSequence)"), r"isinstance(\1, str)"),
    (re.compile(r"(\w+)\s+instanceof\s+(?:Integer|Long|Short)"), r"isinstance(\1, int)"),
    (re.compile(r"(\w+)\s+instanceof\s+(?:Double|Float)"), r"isinstance(\1, float)"),
    (re.compile(r"&&"), " and "),
    (re.compile(r"\|\|"), " or "),
    (re.compile(r"!(?!=)"), " not "),
    (re.compile(r"\btrue\b"), "True"),
    (re.compile(r"\bfalse\b"), "False"),
    (re.compile(r"\bnull\b"), "None"),
]

_JAVA_DECL = re.compile(
    r"^(?:final\s+)?(?:int|long|short|byte|double|float|boolean|char|String|Object|var)"
    r"(?:\[\])?\s+([A-Za-z_]\w*)\s*=\s*(.+)$"
)
_JAVA_SORT = re.compile(r"^Arrays\.sort\(\s*([A-Za-z_]\w*)\s*\)$")
_PY_ASSIGN = re.compile(r"^([A-Za-z_]\w*)\s*=(?!=)\s*(.+)$")

_IDENT = re.compile(r"[A-Za-z_]\w*")
_LITERAL_WORDS = {"True", "False", "None", "not", "and", "or", "true", "false", "null"}


def normalize_expr(text: str, language: Language) -> str:
    if language.tag == "java":
        for pat, repl in _JAVA_EXPR_REWRITES:
            text = pat.sub(repl, text)
    return text.strip()


def identifier_free(expr: str, language: Language) -> bool:
    """True when the (normalized) expression contains only literals."""
    normalized = normalize_expr(expr, language)
    return all(tok in _LITERAL_WORDS for tok in _IDENT.findall(normalized))


def eval_expr(expr: str, env: dict, language: Language):
    normalized = normalize_expr(expr, language)
    try:
        tree = ast.parse(normalized, mode="eval")
    except SyntaxError as exc:
        raise FoldError(str(exc)) from None
    return _eval_node(tree.body, env)


def _eval_node(node: ast.AST, env: dict):
    if isinstance(node, ast.Constant):
        if isinstance(node.value, (int, float, str, bool)) or node.value is None:
            return node.value
        raise FoldError(f"constant {node.value!r}")
    if isinstance(node, ast.Name):
        if node.id in env:
            return env[node.id]
        if node.id in _TYPE_SENTINELS:
            return _TYPE_SENTINELS[node.id]
        raise FoldError(f"unbound name {node.id}")
    if isinstance(node, (ast.List, ast.Tuple)):
        return [_eval_node(el, env) for el in node.elts]
    if isinstance(node, ast.UnaryOp):
        val = _eval_node(node.operand, env)
        if isinstance(node.op, ast.USub):
            return -val
        if isinstance(node.op, ast.UAdd):
            return +val
        if isinstance(node.op, ast.Not):
            return not val
        raise FoldError("unary op")
    if isinstance(node, ast.BinOp):
        left, right = _eval_node(node.left, env), _eval_node(node.right, env)
        try:
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                return left / right
            if isinstance(node.op, ast.FloorDiv):
                return left // right
            if isinstance(node.op, ast.Mod):
                return left % right
            if isinstance(node.op, ast.Pow):
                return left**right
        except (TypeError, ZeroDivisionError, ValueError) as exc:
            raise FoldError(str(exc)) from None
        raise FoldError("binary op")
    if isinstance(node, ast.BoolOp):
        vals = [_eval_node(v, env) for v in node.values]
        if isinstance(node.op, ast.And):
            result = True
            for v in vals:
                result = result and v
            return result
        result = False
        for v in vals:
            result = result or v
        return result
    if isinstance(node, ast.Compare):
        left = _eval_node(node.left, env)
        for op, comparator in zip(node.ops, node.comparators):
            right = _eval_node(comparator, env)
            try:
                ok = _compare(op, left, right)
            except TypeError as exc:
                raise FoldError(str(exc)) from None
            if not ok:
                return False
            left = right
        return True
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.keywords:
            raise FoldError("call form")
        name = node.func.id
        args = [_eval_node(a, env) for a in node.args]
        if name == "isinstance" and len(args) == 2:
            if not isinstance(args[1], type):
                raise FoldError("isinstance target")
            return isinstance(args[0], args[1])
        fn = _CALLS.get(name)
        if fn is None:
            raise FoldError(f"call to {name}")
        try:
            return fn(*args)
        except (TypeError, ValueError) as exc:
            raise FoldError(str(exc)) from None
    if isinstance(node, ast.Subscript):
        value = _eval_node(node.value, env)
        idx = _eval_node(node.slice, env)
        if not isinstance(idx, int) or not isinstance(value, (list, str)):
            raise FoldError("subscript form")
        try:
            return value[idx]
        except IndexError as exc:
            raise FoldError(str(exc)) from None
    raise FoldError(f"unsupported node {type(node).__name__}")


def _compare(op: ast.cmpop, left, right) -> bool:
    if isinstance(op, ast.Eq):
        return left == right
    if isinstance(op, ast.NotEq):
        return left != right
    if isinstance(op, ast.Lt):
        return left < right
    if isinstance(op, ast.LtE):
        return left <= right
    if isinstance(op, ast.Gt):
        return left > right
    if isinstance(op, ast.GtE):
        return left >= right
    raise FoldError("comparison op")


def fold_statements(lines: list[str], language: Language) -> dict:
    """Build an environment from self-contained assignment/assert lines.

    Raises FoldError on anything unsupported or on an assert that does not
    hold (a failing assert means the block would change host behavior).
    """
    env: dict = {}
    for raw in lines:
        stmt = raw.strip()
        if not stmt or stmt.startswith("#") or stmt.startswith("//"):
            continue
        if language.tag == "java":
            stmt = stmt.rstrip(";").strip()
            sort = _JAVA_SORT.match(stmt)
            if sort:
                name = sort.group(1)
                if name not in env or not isinstance(env[name], list):
                    raise FoldError(f"sort of unbound {name}")
                env[name] = sorted(env[name])
                continue
            decl = _JAVA_DECL.match(stmt)
            if decl:
                name, rhs = decl.group(1), decl.group(2)
                if rhs.startswith("{") and rhs.endswith("}"):
                    rhs = "[" + rhs[1:-1] + "]"
                env[name] = eval_expr(rhs, env, language)
                continue
        if stmt.startswith("import "):
            continue
        if stmt.startswith("assert"):
            cond = stmt[len("assert") :].strip()
            if language.tag == "python" and "," in cond:
                cond = cond.split(",", 1)[0]
            if not eval_expr(cond, env, language):
                raise FoldError(f"assert does not hold: {stmt}")
            continue
        m = _PY_ASSIGN.match(stmt)
        if m:
            env[m.group(1)] = eval_expr(m.group(2), env, language)
            continue
        raise FoldError(f"unsupported statement: {stmt!r}")
    return env
