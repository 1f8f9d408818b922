"""Porter suffix-stripping stemmer.

Implements the classic five-step algorithm in the form that matches the
widely circulated reference vocabulary, including its two step-2 rule
adjustments (bli -> ble instead of abli -> able, plus logi -> log).
Tokens of length <= 2 and tokens containing anything other than ASCII
letters pass through unchanged.
"""

from __future__ import annotations

_VOWELS = frozenset("aeiou")


class _Buffer(object):
    """Mutable word buffer with the measure and shape predicates.

    k is the index of the last live character; j marks the stem boundary
    set by the most recent successful suffix match.
    """

    __slots__ = ("b", "k", "j")

    def __init__(self, word: str) -> None:
        self.b = list(word)
        self.k = len(word) - 1
        self.j = 0

    def cons(self, i: int) -> bool:
        ch = self.b[i]
        if ch in _VOWELS:
            return False
        if ch == "y":
            return True if i == 0 else not self.cons(i - 1)
        return True

    def m(self) -> int:
        """Count vowel-consonant sequences in b[0..j]."""
        n = 0
        i = 0
        j = self.j
        while True:
            if i > j:
                return n
            if not self.cons(i):
                break
            i += 1
        i += 1
        while True:
            while True:
                if i > j:
                    return n
                if self.cons(i):
                    break
                i += 1
            i += 1
            n += 1
            while True:
                if i > j:
                    return n
                if not self.cons(i):
                    break
                i += 1
            i += 1

    def vowel_in_stem(self) -> bool:
        for i in range(self.j + 1):
            if not self.cons(i):
                return True
        return False

    def doublec(self, j: int) -> bool:
        if j < 1:
            return False
        if self.b[j] != self.b[j - 1]:
            return False
        return self.cons(j)

    def cvc(self, i: int) -> bool:
        if i < 2 or not self.cons(i) or self.cons(i - 1) or not self.cons(i - 2):
            return False
        return self.b[i] not in ("w", "x", "y")

    def ends(self, s: str) -> bool:
        length = len(s)
        if s[-1] != self.b[self.k]:
            return False
        if length > self.k + 1:
            return False
        if self.b[self.k - length + 1 : self.k + 1] != list(s):
            return False
        self.j = self.k - length
        return True

    def setto(self, s: str) -> None:
        self.b[self.j + 1 : self.j + 1 + len(s)] = list(s)
        self.k = self.j + len(s)

    def r(self, s: str) -> None:
        if self.m() > 0:
            self.setto(s)


def _step1ab(w: _Buffer) -> None:
    if w.b[w.k] == "s":
        if w.ends("sses"):
            w.k -= 2
        elif w.ends("ies"):
            w.setto("i")
        elif w.b[w.k - 1] != "s":
            w.k -= 1
    if w.ends("eed"):
        if w.m() > 0:
            w.k -= 1
    elif (w.ends("ed") or w.ends("ing")) and w.vowel_in_stem():
        w.k = w.j
        if w.ends("at"):
            w.setto("ate")
        elif w.ends("bl"):
            w.setto("ble")
        elif w.ends("iz"):
            w.setto("ize")
        elif w.doublec(w.k):
            w.k -= 1
            if w.b[w.k] in ("l", "s", "z"):
                w.k += 1
        elif w.m() == 1 and w.cvc(w.k):
            w.setto("e")


def _step1c(w: _Buffer) -> None:
    if w.ends("y") and w.vowel_in_stem():
        w.b[w.k] = "i"


_STEP2 = {
    "a": (("ational", "ate"), ("tional", "tion")),
    "c": (("enci", "ence"), ("anci", "ance")),
    "e": (("izer", "ize"),),
    "l": (("bli", "ble"), ("alli", "al"), ("entli", "ent"), ("eli", "e"),
          ("ousli", "ous")),
    "o": (("ization", "ize"), ("ation", "ate"), ("ator", "ate")),
    "s": (("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
          ("ousness", "ous")),
    "t": (("aliti", "al"), ("iviti", "ive"), ("biliti", "ble")),
    "g": (("logi", "log"),),
}

_STEP3 = {
    "e": (("icate", "ic"), ("ative", ""), ("alize", "al")),
    "i": (("iciti", "ic"),),
    "l": (("ical", "ic"), ("ful", "")),
    "s": (("ness", ""),),
}

_STEP4 = {
    "a": ("al",),
    "c": ("ance", "ence"),
    "e": ("er",),
    "i": ("ic",),
    "l": ("able", "ible"),
    "n": ("ant", "ement", "ment", "ent"),
    "o": ("ion", "ou"),
    "s": ("ism",),
    "t": ("ate", "iti"),
    "u": ("ous",),
    "v": ("ive",),
    "z": ("ize",),
}


def _step2(w: _Buffer) -> None:
    for suffix, repl in _STEP2.get(w.b[w.k - 1], ()):
        if w.ends(suffix):
            w.r(repl)
            return


def _step3(w: _Buffer) -> None:
    for suffix, repl in _STEP3.get(w.b[w.k], ()):
        if w.ends(suffix):
            w.r(repl)
            return


def _step4(w: _Buffer) -> None:
    matched = False
    for suffix in _STEP4.get(w.b[w.k - 1], ()):
        if w.ends(suffix):
            if suffix == "ion" and not (w.j >= 0 and w.b[w.j] in ("s", "t")):
                continue
            matched = True
            break
    if matched and w.m() > 1:
        w.k = w.j


def _step5(w: _Buffer) -> None:
    w.j = w.k
    if w.b[w.k] == "e":
        a = w.m()
        if a > 1 or (a == 1 and not w.cvc(w.k - 1)):
            w.k -= 1
    if w.b[w.k] == "l" and w.doublec(w.k) and w.m() > 1:
        w.k -= 1


def stem(token: str) -> str:
    """Stem a lowercase ASCII-alphabetic token; other tokens pass through."""
    if len(token) <= 2:
        return token
    if not (token.isascii() and token.isalpha()):
        return token
    w = _Buffer(token)
    _step1ab(w)
    if w.k > 0:
        _step1c(w)
        _step2(w)
        _step3(w)
        _step4(w)
        _step5(w)
    return "".join(w.b[: w.k + 1])
