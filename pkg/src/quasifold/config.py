"""Problem description files.

One ``key = value`` per line; ``#`` starts a comment. Facets are written as::

    facet = [1/1, 0/1] ; lambda = -1/2 + 1/3*sqrt(5)

An entry is a sum of terms ``p/q`` or ``p/q*sqrt(m)`` (``/q`` optional, unary
minus allowed, whitespace ignored); every ``sqrt`` must use the file's
``discriminant``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .exactmath import DiscriminantMismatch, FieldScalar, format_scalar, is_squarefree
from .polytope import PolytopeH


class ConfigSyntaxError(SyntaxError):
    def __init__(self, msg: str, line: int, col: int, text: str = ""):
        super().__init__(msg, (None, line, col, text))
        self.line, self.col = line, col

    def __str__(self):
        return f"{self.msg} (line {self.line}, column {self.col})"


class NonSquareFreeDiscriminant(ValueError):
    pass


@dataclass(frozen=True)
class ProblemConfig:
    ambient_dim: int
    discriminant: int
    normals: tuple[tuple[FieldScalar, ...], ...]
    offsets: tuple[FieldScalar, ...]
    samples: int = 10000
    seed: int = 0
    tolerance: float = 1e-9
    emit_samples: str | None = None

    def polytope(self) -> PolytopeH:
        return PolytopeH([list(x) for x in self.normals], list(self.offsets))


_TOKEN = re.compile(r"\s*(?:(\d+)|(sqrt)|([-+*/()\[\],;=]))")


class _EntryParser:
    def __init__(self, text: str, line: int, col0: int, m: int):
        self.text, self.line, self.col0, self.m = text, line, col0, m
        self.pos = 0

    def error(self, msg: str, pos: int | None = None):
        p = self.pos if pos is None else pos
        raise ConfigSyntaxError(msg, self.line, self.col0 + p + 1, self.text)

    def peek(self):
        m = _TOKEN.match(self.text, self.pos)
        if not m or m.end() == m.start():
            rest = self.text[self.pos:].strip()
            return None if not rest else ("bad", rest[0], self.pos)
        tok = m.group(1) or m.group(2) or m.group(3)
        return ("int" if m.group(1) else tok, tok, m.start(m.lastindex))

    def take(self, kind=None):
        t = self.peek()
        if t is None:
            self.error(f"expected {kind or 'token'}, found end of entry")
        if t[0] == "bad":
            self.error(f"unexpected character {t[1]!r}", t[2])
        if kind is not None and t[0] != kind:
            self.error(f"expected {kind!r}, found {t[1]!r}", t[2])
        m = _TOKEN.match(self.text, self.pos)
        self.pos = m.end()
        return t

    def entry(self) -> FieldScalar:
        total = self.term()
        while (t := self.peek()) is not None and t[0] in "+-":
            self.take()
            nxt = self.term()
            total = total + nxt if t[0] == "+" else total - nxt
        return total

    def term(self) -> FieldScalar:
        sign = 1
        while (t := self.peek()) is not None and t[0] in "+-":
            self.take()
            sign = -sign if t[0] == "-" else sign
        t = self.peek()
        if t is not None and t[0] == "sqrt":
            return sign * self.radical()
        coeff = self.rational()
        t = self.peek()
        if t is not None and t[0] == "*":
            self.take()
            return sign * coeff * self.radical()
        return FieldScalar(sign * coeff)

    def rational(self) -> Fraction:
        p = int(self.take("int")[1])
        t = self.peek()
        if t is not None and t[0] == "/":
            self.take()
            qt = self.take("int")
            q = int(qt[1])
            if q == 0:
                self.error("zero denominator", qt[2])
            return Fraction(p, q)
        return Fraction(p)

    def radical(self) -> FieldScalar:
        start = self.take("sqrt")[2]
        self.take("(")
        k = int(self.take("int")[1])
        self.take(")")
        if not is_squarefree(k):
            raise NonSquareFreeDiscriminant(
                f"sqrt({k}) is not square-free (line {self.line}, column {self.col0 + start + 1})")
        if k != self.m:
            raise DiscriminantMismatch(
                f"sqrt({k}) in a file with discriminant {self.m} "
                f"(line {self.line}, column {self.col0 + start + 1})")
        return FieldScalar(0, 1, k)

    def done(self):
        t = self.peek()
        if t is not None:
            self.error(f"unexpected {t[1]!r}", t[2])


def _parse_entry(text: str, line: int, col0: int, m: int) -> FieldScalar:
    p = _EntryParser(text, line, col0, m)
    if not text.strip():
        p.error("empty entry")
    value = p.entry()
    p.done()
    return value


_INT_KEYS = {"ambient_dim", "discriminant", "samples", "seed"}
# half-open; discriminant gets its own square-free check
_INT_RANGES = {"ambient_dim": (1, 2**31), "samples": (0, 2**63), "seed": (0, 2**64)}


def parse_config(text: str) -> ProblemConfig:
    settings: dict[str, object] = {}
    facets: list[tuple[int, str, int, str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            raise ConfigSyntaxError("expected 'key = value'", lineno, len(line) - len(line.lstrip()) + 1, raw)
        key, _, value = line.partition("=")
        key_s = key.strip()
        vcol = len(key) + 1
        if key_s == "facet":
            facets.append(_split_facet(value, lineno, vcol, raw))
        elif key_s in _INT_KEYS:
            try:
                settings[key_s] = int(value.strip())
            except ValueError:
                raise ConfigSyntaxError(f"{key_s} must be an integer", lineno, vcol + 1, raw) from None
            lo, hi = _INT_RANGES.get(key_s, (None, None))
            if lo is not None and not lo <= settings[key_s] < hi:
                raise ConfigSyntaxError(f"{key_s} is out of range", lineno, vcol + 1, raw)
        elif key_s == "tolerance":
            try:
                settings[key_s] = float(value.strip())
            except ValueError:
                raise ConfigSyntaxError("tolerance must be a number", lineno, vcol + 1, raw) from None
        elif key_s == "emit_samples":
            settings[key_s] = value.strip()
        else:
            raise ConfigSyntaxError(f"unknown key {key_s!r}", lineno, len(key) - len(key.lstrip()) + 1, raw)

    if "ambient_dim" not in settings:
        raise ConfigSyntaxError("missing ambient_dim", 1, 1)
    n = settings["ambient_dim"]
    m = settings.get("discriminant", 1)
    if m < 1 or not is_squarefree(m):
        raise NonSquareFreeDiscriminant(f"discriminant {m} is not a square-free positive integer")
    if not facets:
        raise ConfigSyntaxError("no facets given", 1, 1)
    normals, offsets = [], []
    for lineno, normal_text, ncol, lam_text, lcol in facets:
        entries = _split_list(normal_text, lineno, ncol)
        if len(entries) != n:
            raise ConfigSyntaxError(f"facet has {len(entries)} entries, expected {n}", lineno, ncol + 1)
        normals.append(tuple(_parse_entry(t, lineno, c, m) for t, c in entries))
        offsets.append(_parse_entry(lam_text, lineno, lcol, m))
    return ProblemConfig(
        ambient_dim=n,
        discriminant=m,
        normals=tuple(normals),
        offsets=tuple(offsets),
        samples=settings.get("samples", 10000),
        seed=settings.get("seed", 0),
        tolerance=settings.get("tolerance", 1e-9),
        emit_samples=settings.get("emit_samples"),
    )


def _split_facet(value: str, lineno: int, col: int, raw: str):
    """Split ``[entries] ; lambda = entry`` into its two texts with their columns."""
    lb = value.find("[")
    rb = value.find("]")
    if lb < 0 or rb < lb or value[:lb].strip():
        raise ConfigSyntaxError("facet normal must be a bracketed list", lineno, col + max(lb, 0) + 1, raw)
    rest = value[rb + 1:]
    m = re.match(r"\s*;\s*lambda\s*=", rest)
    if not m:
        raise ConfigSyntaxError("expected '; lambda = <entry>' after the normal", lineno, col + rb + 2, raw)
    lam_off = rb + 1 + m.end()
    return lineno, value[lb + 1:rb], col + lb + 1, value[lam_off:], col + lam_off


def _split_list(text: str, lineno: int, col: int) -> list[tuple[str, int]]:
    out, start = [], 0
    for part in text.split(","):
        out.append((part, col + start))
        start += len(part) + 1
    if len(out) == 1 and not out[0][0].strip():
        return []
    return out


def format_config(cfg: ProblemConfig) -> str:
    """Inverse of :func:`parse_config` (exact data and options)."""
    lines = [
        f"ambient_dim = {cfg.ambient_dim}",
        f"discriminant = {cfg.discriminant}",
    ]
    for normal, lam in zip(cfg.normals, cfg.offsets):
        entries = ", ".join(format_scalar(x) for x in normal)
        lines.append(f"facet = [{entries}] ; lambda = {format_scalar(lam)}")
    lines += [
        f"samples = {cfg.samples}",
        f"seed = {cfg.seed}",
        f"tolerance = {cfg.tolerance!r}",
    ]
    if cfg.emit_samples:
        lines.append(f"emit_samples = {cfg.emit_samples}")
    return "\n".join(lines) + "\n"


def config_from_polytope(P: PolytopeH, **options) -> ProblemConfig:
    return ProblemConfig(
        ambient_dim=P.n,
        discriminant=P.m,
        normals=tuple(h.normal for h in P.halfspaces),
        offsets=P.offsets,
        **options,
    )
