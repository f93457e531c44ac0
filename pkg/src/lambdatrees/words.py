"""Words over free generators.

A letter is a (symbol, sign) pair with sign +1 or -1; a word is a tuple
of letters.  The text form is whitespace-separated letters with a
trailing "-" marking an inverse, so "a b- a" is a * b^-1 * a.
"""

from __future__ import annotations

from typing import Iterable, Tuple

from .errors import SymbolError

Letter = Tuple[str, int]
Word = Tuple[Letter, ...]


def check_symbol(symbol: str) -> str:
    if not symbol or symbol != symbol.strip() or " " in symbol:
        raise SymbolError(f"bad generator symbol {symbol!r}")
    if symbol.endswith("-"):
        raise SymbolError(f"generator symbol {symbol!r} may not end with '-'")
    return symbol


def parse_word(text: str) -> Word:
    letters = []
    for token in text.split():
        if token.endswith("-"):
            letters.append((check_symbol(token[:-1]), -1))
        else:
            letters.append((check_symbol(token), 1))
    return tuple(letters)


def format_word(word: Word) -> str:
    return " ".join(sym if sign > 0 else sym + "-" for sym, sign in word)


def invert_word(word: Word) -> Word:
    return tuple((sym, -sign) for sym, sign in reversed(word))


def free_reduce(word: Word) -> Word:
    out = []
    for letter in word:
        if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def cyclic_reduce(word: Word) -> Word:
    word = free_reduce(word)
    while len(word) >= 2 and word[0][0] == word[-1][0] and word[0][1] == -word[-1][1]:
        word = word[1:-1]
    return word


def _letter_key(letter: Letter):
    # positive letters sort before their inverses: a < a- < b
    return (letter[0], 0 if letter[1] > 0 else 1)


def word_key(word: Word):
    return tuple(_letter_key(letter) for letter in word)


def least_rotation(word: Word) -> Word:
    if not word:
        return word
    best = word
    best_key = word_key(word)
    for i in range(1, len(word)):
        candidate = word[i:] + word[:i]
        key = word_key(candidate)
        if key < best_key:
            best, best_key = candidate, key
    return best


def word_symbols(word: Word) -> Iterable[str]:
    return (sym for sym, _ in word)
