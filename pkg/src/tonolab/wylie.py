"""Table-driven transducer between Tibetan Unicode and Wylie (EWTS).

The letter inventories, legal stacks, prefix compatibilities, and suffix
tables live in ``data/ewts_tables.json``; this module only walks them.
Unicode -> Wylie is total (unconvertible codepoints become bracketed
escapes); Wylie -> Unicode is strict and raises positioned parse errors.

Ambiguity policy for all-consonant syllables: a three-letter group reads as
root+suffix+postsuffix when that is legal (so U+0F51 U+0F42 U+0F66 is
"dags", not "dgas"); the prefix reading applies otherwise. The legal
syllable enumeration used for round-trip testing skips the few prefixed
forms that collide under this rule, mirroring how native orthography avoids
them with a final achung.
"""
from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

__all__ = [
    "TranslitStats",
    "Vocabulary",
    "WylieParseError",
    "build_vocab",
    "enumerate_legal_syllables",
    "tibetan_to_wylie",
    "tibetan_to_wylie_stats",
    "tokenize_chars",
    "wylie_to_tibetan",
]

BLANK_SYMBOL = "<blank>"
UNKNOWN_SYMBOL = "<unk>"
DELIMITER_SYMBOL = "|"

_BREAKERS = " /;*\n\t\r"


class WylieParseError(ValueError):
    """Wylie input that the EWTS tables cannot account for."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class TranslitStats:
    escaped: int = 0
    passed_through: int = 0


class _Tables:
    def __init__(self, raw: dict):
        self.version = raw["version"]
        self.cons = {w: chr(int(cp, 16)) for w, cp in raw["consonants"].items()}
        self.cons_rev = {cp: w for w, cp in self.cons.items()}
        # subjoined forms sit a fixed offset above the base block
        self.sub = {w: chr(ord(cp) + 0x50) for w, cp in self.cons.items()}
        self.sub_rev = {cp: w for w, cp in self.sub.items()}
        self.vowels = {w: chr(int(cp, 16)) for w, cp in raw["vowels"].items()}
        self.vowels_rev = {cp: w for w, cp in self.vowels.items()}
        self.vowel_combos = {w: tuple(v) for w, v in raw["vowel_combos"].items()}
        self.finals = {w: chr(int(cp, 16)) for w, cp in raw["finals"].items()}
        self.finals_rev = {cp: w for w, cp in self.finals.items()}
        self.punct = {w: chr(int(cp, 16)) for w, cp in raw["punctuation"].items()}
        self.punct_rev = {cp: w for w, cp in self.punct.items()}
        self.stacks = set(raw["stacks"])
        self.prefixes = {p: set(s) for p, s in raw["prefixes"].items()}
        self.suffixes = set(raw["suffixes"])
        # post -> suffixes it may follow
        self.postsuffixes = {p: set(s) for p, s in raw["postsuffixes"].items()}
        self.archaic_post = set(raw["archaic_postsuffixes"])
        self.decomp = {
            chr(int(k, 16)): "".join(chr(int(v, 16)) for v in vs)
            for k, vs in raw["decompositions"].items()
        }
        self.letters_desc = sorted(self.cons, key=len, reverse=True)
        # "a" is the inherent vowel: parseable as a token, written as nothing
        self.vowel_tokens_desc = sorted(
            list(self.vowels) + list(self.vowel_combos) + ["a"],
            key=len,
            reverse=True,
        )
        self.final_tokens_desc = sorted(self.finals, key=len, reverse=True)
        self.merge_tokens = [
            tok
            for tok in list(self.cons) + self.vowel_tokens_desc
            if len(tok) >= 2
        ]


@lru_cache(maxsize=1)
def _tables() -> _Tables:
    raw = json.loads(
        resources.files("tonolab.data").joinpath("ewts_tables.json").read_text()
    )
    return _Tables(raw)


# ---------------------------------------------------------------------------
# Tibetan Unicode -> Wylie


@dataclass
class _Unit:
    """One consonant slot: head letter, anything stacked under it, attached
    vowel signs, and trailing marks."""

    letters: list[str] = field(default_factory=list)
    vowels: list[str] = field(default_factory=list)
    finals: list[str] = field(default_factory=list)

    @property
    def is_single(self) -> bool:
        return len(self.letters) == 1 and not self.vowels and not self.finals

    def letter(self) -> str:
        return self.letters[0]


def tibetan_to_wylie(text: str) -> str:
    return tibetan_to_wylie_stats(text)[0]


def tibetan_to_wylie_stats(text: str) -> tuple[str, TranslitStats]:
    """Convert Tibetan script to Wylie, returning escape/passthrough counts."""
    t = _tables()
    text = unicodedata.normalize("NFC", text)
    text = "".join(t.decomp.get(ch, ch) for ch in text)

    out: list[str] = []
    units: list[_Unit] = []
    escaped = 0
    passed = 0

    def flush():
        if units:
            out.append(_units_to_wylie(units, t))
            units.clear()

    for ch in text:
        if ch in t.cons_rev:
            units.append(_Unit(letters=[t.cons_rev[ch]]))
        elif ch in t.sub_rev and units:
            units[-1].letters.append(t.sub_rev[ch])
        elif ch in t.vowels_rev and units:
            units[-1].vowels.append(t.vowels_rev[ch])
        elif ch in t.finals_rev and units:
            units[-1].finals.append(t.finals_rev[ch])
        else:
            flush()
            if ch in t.punct_rev:
                out.append(t.punct_rev[ch])
            elif "༠" <= ch <= "༩":
                out.append(chr(ord("0") + ord(ch) - 0x0F20))
            elif ord(ch) < 0x0F00:
                out.append(ch)  # Latin text, digits, whitespace: verbatim
                if not ch.isspace():
                    passed += 1
            else:
                out.append(f"[U+{ord(ch):04X}]")
                escaped += 1
    flush()
    return "".join(out), TranslitStats(escaped=escaped, passed_through=passed)


def _units_to_wylie(units: list[_Unit], t: _Tables) -> str:
    parts: list[str] = []
    rest = units
    while rest:
        part, rest = _take_subsyllable(rest, t)
        _append_part(parts, part, t)
    return "".join(parts)


def _take_subsyllable(units, t):
    """Consume one sub-syllable from the unit list; return (wylie, rest)."""
    v = next((i for i, u in enumerate(units) if u.vowels), None)
    if v is None:
        return _parse_no_vowel(units, t)
    if v == 0:
        return _consume_coda(units, 0, None, t)
    if v == 1 and _valid_prefix(units[0], units[1], t):
        return _consume_coda(units, 1, units[0].letter(), t)
    # no legal reading joins the leading group to the root: split before it
    head, rem = _parse_no_vowel(units[:v], t)
    return head, rem + units[v:]


def _consume_coda(units, root_idx, prefix, t):
    root = units[root_idx]
    coda: list[str] = []
    j = root_idx + 1
    if j < len(units) and units[j].is_single:
        u = units[j].letter()
        nxt = units[j + 1] if j + 1 < len(units) else None
        if u == "'" and nxt is not None and nxt.is_single and nxt.letter() in t.suffixes:
            # vowelless contraction of a following particle ('am, 'ang)
            return _emit(prefix, root, [], t) + "'a" + nxt.letter(), units[j + 2 :]
        if u in t.suffixes:
            coda.append(u)
            j += 1
            if j < len(units) and units[j].is_single:
                post = units[j].letter()
                if post in t.postsuffixes and u in t.postsuffixes[post]:
                    coda.append(post)
                    j += 1
    return _emit(prefix, root, coda, t), units[j:]


def _parse_no_vowel(units, t):
    """Ordered structural readings for a run of vowelless units."""
    n = len(units)

    def single(i):
        return units[i].letter() if i < n and units[i].is_single else None

    s0, s1, s2, s3 = (single(i) for i in range(4))

    def suffix_post(a, b):
        return a in t.suffixes and b in t.postsuffixes and a in t.postsuffixes[b]

    # root + suffix + live postsuffix ("dags" wins over "dgas")
    if n >= 3 and suffix_post(s1, s2) and s2 not in t.archaic_post:
        return _emit(None, units[0], [s1, s2], t), units[3:]
    # root + contracted particle ("pa'am")
    if n >= 3 and s1 == "'" and s2 in t.suffixes:
        return _emit(None, units[0], [], t) + "'a" + s2, units[3:]
    if n >= 4 and s0 is not None and _valid_prefix(units[0], units[1], t):
        # prefix + root + suffix + postsuffix ("bsags")
        if suffix_post(s2, s3):
            return _emit(s0, units[1], [s2, s3], t), units[4:]
        # prefix + root + contracted particle ("dga'am")
        if s2 == "'" and s3 in t.suffixes:
            return _emit(s0, units[1], [], t) + "'a" + s3, units[4:]
    # prefix + root + suffix ("bdag", "mnga'", "gnad")
    if n >= 3 and s0 is not None and _valid_prefix(units[0], units[1], t) and s2 in t.suffixes:
        return _emit(s0, units[1], [s2], t), units[3:]
    # root + suffix + archaic da-drag ("gyurd"-type input)
    if n >= 3 and suffix_post(s1, s2):
        return _emit(None, units[0], [s1, s2], t), units[3:]
    # root + suffix ("dag")
    if n >= 2 and s1 in t.suffixes:
        return _emit(None, units[0], [s1], t), units[2:]
    # prefix + root ("dka")
    if n >= 2 and s0 is not None and _valid_prefix(units[0], units[1], t):
        return _emit(s0, units[1], [], t), units[2:]
    return _emit(None, units[0], [], t), units[1:]


def _valid_prefix(prefix_unit, root_unit, t):
    if not prefix_unit.is_single:
        return False
    p = prefix_unit.letter()
    return p in t.prefixes and "".join(root_unit.letters) in t.prefixes[p]


def _emit(prefix, root, coda, t):
    stack = "".join(root.letters)
    if len(root.letters) > 1 and stack not in t.stacks:
        stack = "+".join(root.letters)  # non-native pile: keep it explicit
    out = ""
    if prefix:
        out = prefix + ("." if (prefix + stack) in t.stacks else "")
    vowel = _vowel_wylie(root.vowels, t)
    if stack == "a":
        out += vowel  # the carrier letter is implicit in EWTS
    else:
        out += stack + vowel
    return out + "".join(root.finals) + "".join(coda)


def _vowel_wylie(vowels, t):
    if not vowels:
        return "a"
    key = tuple(sorted(vowels))
    for combo, members in t.vowel_combos.items():
        if key == tuple(sorted(members)):
            return combo
    return "".join(vowels)


def _append_part(parts, part, t):
    """Append a sub-syllable, dotting the seam if letters would re-merge."""
    if parts and part:
        prev = parts[-1]
        for tok in t.merge_tokens:
            for split in range(1, len(tok)):
                if prev.endswith(tok[:split]) and part.startswith(tok[split:]):
                    parts.extend([".", part])
                    return
    parts.append(part)


# ---------------------------------------------------------------------------
# Wylie -> Tibetan Unicode


def wylie_to_tibetan(wylie: str) -> str:
    """Invert the transliteration; raises WylieParseError on non-EWTS input."""
    t = _tables()
    out: list[str] = []
    i = 0
    n = len(wylie)
    while i < n:
        ch = wylie[i]
        if wylie.startswith("//", i):
            out.append(t.punct["//"])
            i += 2
        elif ch in t.punct:
            out.append(t.punct[ch])
            i += 1
        elif ch.isdigit():
            out.append(chr(0x0F20 + int(ch)))
            i += 1
        elif ch in "\n\t\r":
            out.append(ch)
            i += 1
        else:
            emitted, i = _parse_group(wylie, i, t)
            out.append(emitted)
    return "".join(out)


def _match(text, i, choices):
    for c in choices:
        if text.startswith(c, i):
            return c
    return None


def _parse_group(text, start, t):
    """Parse one delimiter-free group (possibly several sub-syllables)."""
    out = []
    i = start
    n = len(text)
    while i < n and text[i] not in _BREAKERS and not text[i].isdigit():
        emitted, i = _parse_subsyllable(text, i, t)
        out.append(emitted)
        if i < n and text[i] == ".":
            i += 1  # seam disambiguator between sub-syllables
    return "".join(out), i


def _parse_subsyllable(text, start, t):
    i = start
    n = len(text)
    onset: list[str] = []
    explicit = False
    prefix_split = False

    while i < n:
        vowel = _match(text, i, t.vowel_tokens_desc)
        letter = _match(text, i, t.letters_desc)
        if vowel and not (letter and len(letter) > len(vowel)):
            break
        if text[i] == "+" and onset:
            explicit = True
            i += 1
            continue
        if text[i] == "." and len(onset) == 1 and not prefix_split:
            prefix_split = True
            i += 1
            continue
        if letter is None:
            break
        onset.append(letter)
        i += len(letter)

    vowel = _match(text, i, t.vowel_tokens_desc)
    if vowel is None:
        raise WylieParseError(
            f"expected a vowel near {text[start:start + 8]!r}", start
        )
    i += len(vowel)

    prefix, stack = _split_onset(onset, explicit, prefix_split, t, start)
    emitted = []
    if prefix:
        emitted.append(t.cons[prefix])
    emitted.append(_stack_unicode(stack, t) if stack else t.cons["a"])
    emitted.append(_vowel_unicode(vowel, t))

    while i < n:  # trailing nasal/aspiration marks
        fin = _match(text, i, t.final_tokens_desc)
        if fin is None:
            break
        emitted.append(t.finals[fin])
        i += len(fin)

    suffix = None
    for slot in range(2):
        if i >= n or text[i] in _BREAKERS or text[i] in ".+" or text[i].isdigit():
            break
        nxt_vowel = _match(text, i, t.vowel_tokens_desc)
        letter = _match(text, i, t.letters_desc)
        if letter is None or (nxt_vowel and len(nxt_vowel) >= len(letter)):
            break
        rest_has_vowel = any(
            _match(text, j, t.vowel_tokens_desc) is not None
            for j in range(i, min(n, i + 12))
        )
        if slot == 0:
            if letter in t.suffixes:
                if letter == "'" and _match(text, i + 1, t.vowel_tokens_desc):
                    break  # "ba'i": the achung roots a particle sub-syllable
                suffix = letter
                emitted.append(t.cons[letter])
                i += len(letter)
                continue
            if rest_has_vowel:
                break  # next sub-syllable begins here
            raise WylieParseError(f"invalid suffix {letter!r}", i)
        if letter in t.postsuffixes and suffix in t.postsuffixes[letter]:
            emitted.append(t.cons[letter])
            i += len(letter)
        elif rest_has_vowel:
            break
        else:
            raise WylieParseError(f"invalid postsuffix {letter!r}", i)
    return "".join(emitted), i


def _split_onset(onset, explicit, prefix_split, t, offset):
    if not onset:
        return None, None
    if explicit:
        return None, onset
    if prefix_split:
        prefix, rest = onset[0], onset[1:]
        if prefix in t.prefixes and "".join(rest) in t.prefixes[prefix]:
            return prefix, rest
        raise WylieParseError(
            f"invalid prefixed group {prefix + '.' + ''.join(rest)!r}", offset
        )
    whole = "".join(onset)
    if whole in t.stacks or len(onset) == 1:
        return None, onset
    if onset[0] in t.prefixes and "".join(onset[1:]) in t.prefixes[onset[0]]:
        return onset[0], onset[1:]
    raise WylieParseError(f"ill-formed consonant group {whole!r}", offset)


def _stack_unicode(stack, t):
    return t.cons[stack[0]] + "".join(t.sub[letter] for letter in stack[1:])


def _vowel_unicode(vowel, t):
    if vowel == "a":
        return ""
    if vowel in t.vowel_combos:
        return "".join(t.vowels[v] for v in t.vowel_combos[vowel])
    return t.vowels[vowel]


# ---------------------------------------------------------------------------
# Character tokenization and vocabulary


def tokenize_chars(wylie: str) -> list[str]:
    """One token per Unicode scalar; spaces are tokens too."""
    return list(wylie)


@dataclass(frozen=True)
class Vocabulary:
    """Bijective symbol<->id map with reserved blank/unknown/delimiter ids."""

    symbol_to_id: dict

    def __len__(self) -> int:
        return len(self.symbol_to_id)

    @property
    def id_to_symbol(self) -> dict:
        return {i: s for s, i in self.symbol_to_id.items()}

    def encode(self, tokens) -> list[int]:
        unk = self.symbol_to_id[UNKNOWN_SYMBOL]
        return [
            self.symbol_to_id.get(DELIMITER_SYMBOL if tok == " " else tok, unk)
            for tok in tokens
        ]

    def decode(self, ids) -> list[str]:
        rev = self.id_to_symbol
        return [rev[i] for i in ids]

    def to_json(self) -> str:
        return json.dumps(self.symbol_to_id, ensure_ascii=False)


def build_vocab(corpus) -> Vocabulary:
    """Vocabulary over all corpus character tokens plus reserved symbols.

    Symbols are ordered blank, unknown, delimiter, then corpus symbols
    sorted by codepoint, so rebuilding from the same corpus is stable.
    """
    symbols: set[str] = set()
    n_texts = 0
    for text in corpus:
        n_texts += 1
        for tok in tokenize_chars(text):
            symbols.add(DELIMITER_SYMBOL if tok == " " else tok)
    if n_texts == 0:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    symbols.discard(DELIMITER_SYMBOL)
    table = {BLANK_SYMBOL: 0, UNKNOWN_SYMBOL: 1, DELIMITER_SYMBOL: 2}
    for sym in sorted(symbols):
        table[sym] = len(table)
    return Vocabulary(symbol_to_id=table)


# ---------------------------------------------------------------------------
# Legal syllable enumeration (drives round-trip testing)


def enumerate_legal_syllables() -> list[str]:
    """Every syllable generable from the native tables.

    Skips prefixed forms whose script spelling collides with a
    root+suffix(+postsuffix) reading under the documented ambiguity policy.
    """
    t = _tables()
    vowels = ["a", "i", "u", "e", "o"]
    post_s_hosts = t.postsuffixes["s"]
    syllables = []
    for stack in sorted(t.stacks):
        prefix_options = [None] + [
            p for p, allowed in sorted(t.prefixes.items()) if stack in allowed
        ]
        for prefix in prefix_options:
            for vowel in vowels:
                for suffix in [None] + sorted(t.suffixes):
                    posts = [None] + (["s"] if suffix in post_s_hosts else [])
                    for post in posts:
                        if prefix and len(stack) <= 2 and stack in t.suffixes and vowel == "a":
                            if suffix is None:
                                continue  # reads back as root+suffix
                            if suffix == "s" and post is None and stack in post_s_hosts:
                                continue  # reads back as root+suffix+post
                        dotted = "." if prefix and (prefix + stack) in t.stacks else ""
                        body = vowel if stack == "a" else stack + vowel
                        syllables.append(
                            (prefix or "") + dotted + body + (suffix or "") + (post or "")
                        )
    return syllables
