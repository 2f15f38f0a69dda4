"""Flat ``key = value`` documents used for models and experiment configs.

Values are Python literals (numbers, quoted strings, lists, tuples, dicts);
inside a list, ``a..b`` stands for the integers ``a`` to ``b`` inclusive.
``#`` starts a comment.  Errors carry line and column.
"""

from __future__ import annotations

import ast
import re

__all__ = ["DocumentError", "parse_document"]


class DocumentError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def _strip_comment(text: str) -> str:
    out, quote = [], None
    for ch in text:
        if quote:
            if ch == quote:
                quote = None
        elif ch in "'\"":
            quote = ch
        elif ch == "#":
            break
        out.append(ch)
    return "".join(out)


_RANGE = re.compile(r"(-?\d+)\s*\.\.\s*(-?\d+)")


def _expand_ranges(value: str) -> str:
    def repl(mo):
        a, b = int(mo.group(1)), int(mo.group(2))
        return ", ".join(str(k) for k in range(a, b + 1))
    return _RANGE.sub(repl, value)


def parse_document(text: str) -> dict:
    result = {}
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        lineno = i + 1
        raw = _strip_comment(lines[i])
        i += 1
        if not raw.strip():
            continue
        key, sep, value = raw.partition("=")
        if not sep:
            raise DocumentError("expected 'key = value'", lineno, 1)
        key = key.strip()
        if not key.replace("_", "").replace("-", "").isalnum():
            raise DocumentError(f"bad key {key!r}", lineno, 1)
        col0 = raw.index("=") + 2
        # values may continue over following lines while brackets are open
        while value.count("[") + value.count("(") + value.count("{") > \
                value.count("]") + value.count(")") + value.count("}") and i < len(lines):
            value += "\n" + _strip_comment(lines[i])
            i += 1
        if key in result:
            raise DocumentError(f"duplicate key {key!r}", lineno, 1)
        try:
            result[key] = ast.literal_eval(_expand_ranges(value.strip()))
        except (SyntaxError, ValueError) as exc:
            off = getattr(exc, "offset", None) or 1
            err_line = lineno + (getattr(exc, "lineno", 1) or 1) - 1
            raise DocumentError(f"cannot parse value for {key!r}", err_line,
                                col0 + off - 1 if err_line == lineno else off) from None
    return result
