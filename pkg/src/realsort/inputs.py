"""Input files: parsing and seeded generation.

An input file holds one value per line, either ``p/q`` or a decimal string.
Blank lines and lines starting with ``#`` are skipped; the order of the
remaining lines defines the input positions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .numeric import ParseError, parse_real

__all__ = ["InputFile", "InputParseError", "read_input", "parse_lines", "generate", "DISTRIBUTIONS"]


class InputParseError(ParseError):
    def __init__(self, lineno: int, text: str, reason: str):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno
        self.text = text


@dataclass
class InputFile:
    texts: list[str]
    values: list[Fraction]
    linenos: list[int]

    def __len__(self) -> int:
        return len(self.values)


def parse_lines(lines) -> InputFile:
    texts, values, linenos = [], [], []
    for lineno, raw in enumerate(lines, 1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        try:
            values.append(parse_real(text))
        except ParseError as exc:
            raise InputParseError(lineno, text, str(exc)) from None
        texts.append(text)
        linenos.append(lineno)
    return InputFile(texts, values, linenos)


def read_input(path: str | Path) -> InputFile:
    with open(path, encoding="utf-8") as fh:
        return parse_lines(fh)


def _decimal(num: int, digits: int) -> str:
    """Exact decimal text of ``num / 10**digits``."""
    sign = "-" if num < 0 else ""
    whole, frac = divmod(abs(num), 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def _uniform(n, rng, digits=18):
    return [_decimal(rng.randrange(10**digits), digits) for _ in range(n)]


def _clustered(n, rng, clusters=None, spread_digits=12):
    clusters = clusters or max(1, n // 64)
    digits = 6 + spread_digits
    centers = [rng.randrange(-10**12, 10**12) * 10**spread_digits for _ in range(clusters)]
    return [
        _decimal(rng.choice(centers) + rng.randrange(10**spread_digits), digits)
        for _ in range(n)
    ]


def _geometric_gaps(n, rng, max_k=64):
    """Pairs ``(b, b + 2**-k)`` with ``k`` sweeping ``1..max_k``.

    Bases sit near distinct even integers, so values from different pairs are
    more than 1 apart and the closest neighbours are exactly ``2**-max_k``.
    """
    pairs = n // 2
    slots = rng.sample(range(4 * n + 4), n - pairs)
    bases = [2 * m + Fraction(rng.randrange(1 << 16), 1 << 18) for m in slots]
    if pairs == 1:
        ks = [max_k]
    else:
        ks = [1 + i * (max_k - 1) // (pairs - 1) for i in range(pairs)]
    rng.shuffle(ks)
    values = []
    for b, k in zip(bases, ks):
        values.append(b)
        values.append(b + Fraction(1, 1 << k))
    values.extend(bases[pairs:])
    rng.shuffle(values)
    return [f"{v.numerator}/{v.denominator}" for v in values]


def _duplicates_heavy(n, rng, digits=12):
    distinct = [_decimal(rng.randrange(10**digits), digits) for _ in range(max(1, n // 2))]
    out = distinct + [rng.choice(distinct) for _ in range(n - len(distinct))]
    rng.shuffle(out)
    return out


DISTRIBUTIONS = {
    "uniform": _uniform,
    "clustered": _clustered,
    "geometric-gaps": _geometric_gaps,
    "duplicates-heavy": _duplicates_heavy,
}


def generate(distribution: str, n: int, seed: int, **params) -> list[str]:
    """Value lines for ``n`` draws from ``distribution``; deterministic in ``seed``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    try:
        fn = DISTRIBUTIONS[distribution]
    except KeyError:
        raise ValueError(
            f"unknown distribution {distribution!r}; choose from {', '.join(DISTRIBUTIONS)}"
        ) from None
    return fn(n, random.Random(seed), **params)
