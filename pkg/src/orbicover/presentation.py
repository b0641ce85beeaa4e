"""Finite group presentations: parsing, normalization, invariants, Tietze moves.

A word is a tuple of signed 1-based generator indices; a negative entry
is the inverse of the corresponding generator.  Presentations are
immutable values.  The abelianization runs an exact integer Smith normal
form and is the independent oracle against which the geometric pipeline
is checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Iterator

Word = tuple[int, ...]

# Both the ASCII apostrophe and the prime sign mark an inverse letter.
_INVERSE_MARKS = frozenset({"'", "′"})


class PresentationError(ValueError):
    """Malformed presentation text, with 1-based line and column."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


def free_reduce(letters: Iterable[int]) -> Word:
    """Cancel adjacent inverse pairs until none remain."""
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(letters: Iterable[int]) -> Word:
    w = list(free_reduce(letters))
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


def invert_word(word: Iterable[int]) -> Word:
    return tuple(-x for x in reversed(tuple(word)))


def _canonical_cyclic(word: Word) -> Word:
    """Lexicographically minimal rotation over the word and its inverse."""
    best: Word | None = None
    for w in (word, invert_word(word)):
        n = len(w)
        for i in range(n):
            rot = w[i:] + w[:i]
            if best is None or rot < best:
                best = rot
    return best if best is not None else ()


@dataclass(frozen=True)
class GroupPresentation:
    """Generators 1..generator_count plus relator words.

    The constructor checks letter ranges only; `normalize` establishes
    the cyclically-reduced storage convention.
    """

    generator_count: int
    relators: tuple[Word, ...]

    def __post_init__(self) -> None:
        if self.generator_count < 0:
            raise ValueError("generator_count must be nonnegative")
        for rel in self.relators:
            for x in rel:
                if x == 0 or abs(x) > self.generator_count:
                    raise ValueError(f"letter {x} out of range 1..{self.generator_count}")

    def total_relator_length(self) -> int:
        return sum(len(r) for r in self.relators)


@dataclass(frozen=True)
class AbelianInvariants:
    """Torsion coefficients (each >= 2, each dividing the next) plus free rank."""

    torsion: tuple[int, ...]
    free_rank: int

    def __post_init__(self) -> None:
        for d in self.torsion:
            if d < 2:
                raise ValueError("torsion coefficients must be >= 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a != 0:
                raise ValueError("torsion coefficients must form a divisibility chain")
        if self.free_rank < 0:
            raise ValueError("free_rank must be nonnegative")


def _scan_positions(text: str) -> Iterator[tuple[str, int, int]]:
    line, col = 1, 1
    for ch in text:
        yield ch, line, col
        if ch == "\n":
            line += 1
            col = 1
        else:
            col += 1


def parse_presentation(text: str) -> GroupPresentation:
    """Parse `gen[,gen]* '|' [word[,word]*]` into a normalized presentation.

    Generators are single lowercase ASCII letters; a trailing apostrophe
    inverts the preceding letter; whitespace is insignificant.  Raises
    PresentationError with line/column on any malformed input.
    """
    chars = list(_scan_positions(text))
    bar_positions = [i for i, (ch, _, _) in enumerate(chars) if ch == "|"]
    if len(bar_positions) == 0:
        tail = chars[-1] if chars else ("", 1, 1)
        raise PresentationError("missing '|' separator", tail[1], tail[2])
    if len(bar_positions) > 1:
        _, line, col = chars[bar_positions[1]]
        raise PresentationError("more than one '|' separator", line, col)

    bar = bar_positions[0]
    names: list[str] = []
    index_of: dict[str, int] = {}

    expecting_name = True
    for ch, line, col in (chars[i] for i in range(bar)):
        if ch.isspace():
            continue
        if ch == ",":
            if expecting_name:
                raise PresentationError("expected generator name before ','", line, col)
            expecting_name = True
            continue
        if ch.isupper():
            raise PresentationError(f"uppercase generator {ch!r} rejected", line, col)
        if not ("a" <= ch <= "z"):
            raise PresentationError(f"invalid generator character {ch!r}", line, col)
        if not expecting_name:
            raise PresentationError(f"missing ',' before generator {ch!r}", line, col)
        if ch in index_of:
            raise PresentationError(f"duplicate generator {ch!r}", line, col)
        index_of[ch] = len(names) + 1
        names.append(ch)
        expecting_name = False
    if expecting_name:
        _, line, col = chars[bar]
        if names:
            raise PresentationError("expected generator name after ','", line, col)
        raise PresentationError("expected at least one generator", line, col)

    relators: list[Word] = []
    current: list[int] = []
    pending_comma = False
    last_marked = True
    last_pos = chars[bar][1:]
    for ch, line, col in (chars[i] for i in range(bar + 1, len(chars))):
        last_pos = (line, col)
        if ch.isspace():
            continue
        if ch == ",":
            if not current:
                raise PresentationError("empty relator word", line, col)
            relators.append(tuple(current))
            current = []
            pending_comma = True
            last_marked = True
            continue
        if ch in _INVERSE_MARKS:
            if not current or last_marked:
                raise PresentationError("inverse mark without a preceding letter", line, col)
            current[-1] = -current[-1]
            last_marked = True
            continue
        if ch.isupper():
            raise PresentationError(f"uppercase letter {ch!r} rejected", line, col)
        if not ("a" <= ch <= "z"):
            raise PresentationError(f"invalid word character {ch!r}", line, col)
        if ch not in index_of:
            raise PresentationError(f"unknown generator symbol {ch!r}", line, col)
        current.append(index_of[ch])
        pending_comma = False
        last_marked = False
    if current:
        relators.append(tuple(current))
    elif pending_comma:
        raise PresentationError("empty relator word", *last_pos)

    return normalize(GroupPresentation(len(names), tuple(relators)))


def normalize(p: GroupPresentation) -> GroupPresentation:
    """Freely and cyclically reduce every relator; drop empty relators."""
    reduced = tuple(w for w in (cyclic_reduce(r) for r in p.relators) if w)
    return GroupPresentation(p.generator_count, reduced)


def _exponent_matrix(p: GroupPresentation) -> list[list[int]]:
    rows = []
    for rel in p.relators:
        row = [0] * p.generator_count
        for x in rel:
            row[abs(x) - 1] += 1 if x > 0 else -1
        rows.append(row)
    return rows


def smith_diagonal(matrix: list[list[int]], cols: int) -> list[int]:
    """Nonzero diagonal of the Smith normal form, divisibility chain enforced.

    Exact integer elimination: pick the submatrix entry of least absolute
    value as pivot, clear its row and column by Euclidean steps, recurse.
    The divisibility chain is restored afterwards with gcd/lcm swaps,
    which preserve the isomorphism type of the quotient group.
    """
    m = [list(row) for row in matrix]
    rows = len(m)
    top = 0
    diag: list[int] = []
    while top < min(rows, cols):
        pivot = None
        for i in range(top, rows):
            for j in range(top, cols):
                if m[i][j] != 0 and (pivot is None or abs(m[i][j]) < abs(m[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        i0, j0 = pivot
        m[top], m[i0] = m[i0], m[top]
        for row in m:
            row[top], row[j0] = row[j0], row[top]
        while True:
            swapped = False
            for i in range(top + 1, rows):
                if m[i][top]:
                    q = m[i][top] // m[top][top]
                    if q:
                        for j in range(top, cols):
                            m[i][j] -= q * m[top][j]
                    if m[i][top]:
                        m[top], m[i] = m[i], m[top]
                        swapped = True
            for j in range(top + 1, cols):
                if m[top][j]:
                    q = m[top][j] // m[top][top]
                    if q:
                        for i in range(top, rows):
                            m[i][j] -= q * m[i][top]
                    if m[top][j]:
                        for i in range(top, rows):
                            m[i][top], m[i][j] = m[i][j], m[i][top]
                        swapped = True
            if not swapped:
                break
        diag.append(abs(m[top][top]))
        top += 1

    # gcd/lcm bubbling: diag(a, b) and diag(gcd, lcm) present the same group
    changed = True
    while changed:
        changed = False
        for i in range(len(diag)):
            for j in range(i + 1, len(diag)):
                if diag[j] % diag[i] != 0:
                    g = gcd(diag[i], diag[j])
                    diag[i], diag[j] = g, diag[i] * diag[j] // g
                    changed = True
    return diag


def abelianize(p: GroupPresentation) -> AbelianInvariants:
    """Abelian invariants of the presented group, via exact Smith normal form."""
    diag = smith_diagonal(_exponent_matrix(p), p.generator_count)
    torsion = tuple(d for d in diag if d > 1)
    return AbelianInvariants(torsion, p.generator_count - len(diag))


def same_abelian(p: GroupPresentation, q: GroupPresentation) -> bool:
    return abelianize(p) == abelianize(q)


def _substitute(rel: Word, gen: int, replacement: Word) -> Word:
    out: list[int] = []
    inv = invert_word(replacement)
    for x in rel:
        if x == gen:
            out.extend(replacement)
        elif x == -gen:
            out.extend(inv)
        else:
            out.append(x)
    return cyclic_reduce(out)


def _drop_generator(p: GroupPresentation, gen: int) -> GroupPresentation:
    def renum(x: int) -> int:
        a = abs(x)
        a2 = a - 1 if a > gen else a
        return a2 if x > 0 else -a2

    rels = tuple(tuple(renum(x) for x in r) for r in p.relators)
    return GroupPresentation(p.generator_count - 1, rels)


def _eliminate_generator(p: GroupPresentation) -> GroupPresentation | None:
    """One Tietze generator elimination, if some relator uses a generator once.

    Candidates are ordered by (relator length, relator index, generator),
    so the move sequence is deterministic.
    """
    best: tuple[int, int, int] | None = None
    for ri, rel in enumerate(p.relators):
        counts: dict[int, int] = {}
        for x in rel:
            counts[abs(x)] = counts.get(abs(x), 0) + 1
        for g, c in sorted(counts.items()):
            if c == 1:
                key = (len(rel), ri, g)
                if best is None or key < best:
                    best = key
                break
    if best is None:
        return None
    _, ri, g = best
    rel = p.relators[ri]
    pos = next(i for i, x in enumerate(rel) if abs(x) == g)
    rot = rel[pos:] + rel[:pos]
    # rot = g^e . w  with w free of g; g = w^-1 when e = +1, g = w when e = -1
    w = rot[1:]
    replacement = invert_word(w) if rot[0] > 0 else w
    rels = tuple(_substitute(r, g, replacement) for i, r in enumerate(p.relators) if i != ri)
    out = GroupPresentation(p.generator_count, tuple(r for r in rels if r))
    return normalize(_drop_generator(out, g))


def _drop_duplicate_relator(p: GroupPresentation) -> GroupPresentation | None:
    seen: dict[Word, int] = {}
    for i, rel in enumerate(p.relators):
        key = _canonical_cyclic(rel)
        if key in seen:
            rels = p.relators[:i] + p.relators[i + 1 :]
            return GroupPresentation(p.generator_count, rels)
        seen[key] = i
    return None


def _longest_overlap(u: Word, v: Word) -> tuple[int, int, int] | None:
    """Longest common contiguous block of the cyclic words u and v.

    Returns (length, start_in_u, start_in_v) with length capped at
    min(len(u), len(v)); ties break toward the smallest start pair.
    """
    if not u or not v:
        return None
    u2 = u + u
    v2 = v + v
    cap = min(len(u), len(v))
    # best[j]: longest match ending at current i (in u2) and j (in v2)
    prev = [0] * (len(v2) + 1)
    best: tuple[int, int, int] | None = None
    for i in range(1, len(u2) + 1):
        cur = [0] * (len(v2) + 1)
        for j in range(1, len(v2) + 1):
            if u2[i - 1] == v2[j - 1]:
                run = prev[j - 1] + 1
                cur[j] = run
                t = min(run, cap)
                su = i - t
                sv = j - t
                if su < len(u) and sv < len(v):
                    key = (t, su, sv)
                    if best is None or (t > best[0]) or (t == best[0] and (su, sv) < (best[1], best[2])):
                        best = key
        prev = cur
    return best


def _shorten_by_overlap(p: GroupPresentation) -> GroupPresentation | None:
    """Rewrite a relator using a long block shared with another relator.

    If relator u contains a cyclic block s that covers more than half of
    another relator v (or of its inverse), replacing s by the inverse of
    the remainder of v strictly shortens u.
    """
    for i, u in enumerate(p.relators):
        for j, v0 in enumerate(p.relators):
            if i == j:
                continue
            for v in (v0, invert_word(v0)):
                hit = _longest_overlap(u, v)
                if hit is None:
                    continue
                t, su, sv = hit
                m = len(v)
                if 2 * t <= m:
                    continue
                u_rot = u[su:] + u[:su]
                v_rot = v[sv:] + v[:sv]
                rest = v_rot[t:]
                new_u = cyclic_reduce(invert_word(rest) + u_rot[t:])
                if len(new_u) >= len(u):
                    continue
                rels = list(p.relators)
                if new_u:
                    rels[i] = new_u
                else:
                    del rels[i]
                return GroupPresentation(p.generator_count, tuple(rels))
    return None


def tietze_simplify(p: GroupPresentation, effort: int = 400) -> GroupPresentation:
    """Bounded deterministic greedy simplification.

    Moves, tried in a fixed order per step: drop a duplicate relator,
    eliminate a generator occurring once in some relator, shorten a
    relator against a long shared block of another.  The search may pass
    through larger intermediate presentations; the returned value is the
    best state seen that does not exceed the input in generator count or
    total relator length, so the result never regresses.
    """
    if effort < 0:
        raise ValueError("effort must be >= 0")
    start = normalize(p)

    def score(q: GroupPresentation) -> tuple[int, int, int]:
        return (q.generator_count, q.total_relator_length(), len(q.relators))

    cur = start
    best = start
    for _ in range(effort):
        nxt = _drop_duplicate_relator(cur) or _eliminate_generator(cur) or _shorten_by_overlap(cur)
        if nxt is None:
            break
        cur = nxt
        if (
            cur.generator_count <= start.generator_count
            and cur.total_relator_length() <= start.total_relator_length()
            and score(cur) < score(best)
        ):
            best = cur
    return best


def format_presentation(p: GroupPresentation) -> str:
    """Render in the CLI grammar; generators named a, b, c, ..."""
    if p.generator_count > 26:
        raise ValueError("only 26 single-letter generator names available")
    names = [chr(ord("a") + i) for i in range(p.generator_count)]
    gens = ",".join(names)
    words = []
    for rel in p.relators:
        words.append("".join(names[abs(x) - 1] + ("" if x > 0 else "'") for x in rel))
    return gens + " | " + ", ".join(words)
