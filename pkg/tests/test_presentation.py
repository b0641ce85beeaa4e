"""Presentation parsing, Smith form invariants, and Tietze simplification."""

import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbicover.presentation import (
    AbelianInvariants,
    GroupPresentation,
    PresentationError,
    abelianize,
    cyclic_reduce,
    format_presentation,
    free_reduce,
    invert_word,
    normalize,
    parse_presentation,
    same_abelian,
    smith_diagonal,
    tietze_simplify,
)

# ---------------------------------------------------------------- parsing


def test_parse_commutator():
    p = parse_presentation("a,b | aba'b'")
    assert p.generator_count == 2
    assert p.relators == ((1, 2, -1, -2),)


def test_parse_four_attaching_words():
    # the words killing both loops of the base complex
    p = parse_presentation("g,r | g, r, gr, gr'")
    assert p.generator_count == 2
    assert p.relators == ((1,), (2,), (1, 2), (1, -2))


def test_parse_whitespace_insignificant():
    p = parse_presentation("a | aa a'")
    assert p.relators == ((1,),)


def test_parse_no_relators():
    p = parse_presentation("a,b |")
    assert p.generator_count == 2
    assert p.relators == ()


def test_parse_prime_mark_accepted():
    p = parse_presentation("a | a′a′")
    assert p.relators == ((-1, -1),)


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("a,b aba'", "missing '|'"),
        ("a | b | c", "more than one"),
        ("A | a", "uppercase"),
        ("a | aB", "uppercase"),
        ("a | ab", "unknown generator"),
        ("a,a | a", "duplicate"),
        ("a, | a", "expected generator name"),
        ("| a", "at least one generator"),
        ("a | a,,a", "empty relator"),
        ("a | a,", "empty relator"),
        ("a | 'a", "inverse mark"),
        ("a | a''", "inverse mark"),
        ("a | a2", "invalid word character"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(PresentationError) as err:
        parse_presentation(text)
    assert fragment in str(err.value)


def test_parse_error_position():
    with pytest.raises(PresentationError) as err:
        parse_presentation("a,b |\n ab x")
    assert err.value.line == 2
    assert err.value.column == 5


# ---------------------------------------------------------------- words


def test_free_reduce():
    assert free_reduce([1, -1, 2]) == (2,)
    assert free_reduce([1, 2, -2, -1]) == ()


def test_cyclic_reduce():
    assert cyclic_reduce([1, 2, -1]) == (2,)
    assert cyclic_reduce([1, 1, -1]) == (1,)


def test_invert_word():
    assert invert_word((1, 2, -3)) == (3, -2, -1)


def test_normalize_drops_empty_relators():
    p = GroupPresentation(2, ((1, -1), (2,)))
    assert normalize(p).relators == ((2,),)


@given(st.lists(st.integers(min_value=-4, max_value=4).filter(bool), max_size=12))
def test_free_reduce_no_adjacent_inverses(letters):
    w = free_reduce(letters)
    assert all(w[i] != -w[i + 1] for i in range(len(w) - 1))


# ---------------------------------------------------------------- Smith form

# Hand-checked Smith forms, frozen before the implementation existed:
#   diag(2,3)            -> diag(1,6)
#   [[2,0],[0,3],[2,2]]  -> diag(1,2)      (row3 - row1 gives (0,2); then chain)
#   [[2,0]] over 2 cols  -> diag(2)
FROZEN_SMITH = [
    ([[2, 0], [0, 3]], 2, [1, 6]),
    ([[2, 0], [0, 3], [2, 2]], 2, [1, 2]),
    ([[2, 0]], 2, [2]),
    ([[0, 0], [0, 0]], 2, []),
    ([], 3, []),
    ([[6, 4], [4, 6]], 2, [2, 10]),
]


@pytest.mark.parametrize("matrix,cols,expected", FROZEN_SMITH)
def test_smith_frozen(matrix, cols, expected):
    assert smith_diagonal(matrix, cols) == expected


def _det(m):
    if len(m) == 1:
        return m[0][0]
    total = 0
    for j, head in enumerate(m[0]):
        if head == 0:
            continue
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        total += (-1) ** j * head * _det(minor)
    return total


def _determinantal_divisors(matrix, cols):
    """Independent route: d_k = gcd(k-minors) / gcd((k-1)-minors)."""
    rows = len(matrix)
    out = []
    prev = 1
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in itertools.combinations(range(rows), k):
            for cs in itertools.combinations(range(cols), k):
                sub = [[matrix[i][j] for j in cs] for i in rs]
                g = math.gcd(g, abs(_det(sub)))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


@given(
    st.lists(
        st.lists(st.integers(min_value=-9, max_value=9), min_size=1, max_size=4),
        min_size=1,
        max_size=4,
    ).filter(lambda rows: len({len(r) for r in rows}) == 1)
)
@settings(max_examples=150, deadline=None)
def test_smith_matches_minor_gcds(rows):
    cols = len(rows[0])
    assert smith_diagonal(rows, cols) == _determinantal_divisors(rows, cols)


# ---------------------------------------------------------------- abelianize


def test_abelianize_z2():
    p = parse_presentation("a,b | aba'b'")
    assert abelianize(p) == AbelianInvariants((), 2)


def test_abelianize_cyclic2():
    p = parse_presentation("a | aa")
    assert abelianize(p) == AbelianInvariants((2,), 0)


def test_abelianize_z6():
    p = parse_presentation("a,b | aa, bbb")
    assert abelianize(p) == AbelianInvariants((6,), 0)


def test_abelianize_klein_bottle():
    p = parse_presentation("a,b | abab'")
    assert abelianize(p) == AbelianInvariants((2,), 1)


def test_abelianize_triangle_like_group():
    p = parse_presentation("a,b | aa, bbb, abab")
    assert abelianize(p) == AbelianInvariants((2,), 0)


def test_divisibility_chain_is_validated():
    with pytest.raises(ValueError):
        AbelianInvariants((3, 2), 0)
    with pytest.raises(ValueError):
        AbelianInvariants((1,), 0)


# ---------------------------------------------------------------- Tietze


def test_tietze_kills_base_presentation():
    p = parse_presentation("g,r | g, r, gr, gr'")
    q = tietze_simplify(p)
    assert q.generator_count == 0
    assert q.relators == ()


def test_tietze_eliminates_dead_generator():
    p = parse_presentation("a,b | b")
    q = tietze_simplify(p)
    assert q.generator_count == 1
    assert q.relators == ()


def test_tietze_fixed_point_on_free():
    p = parse_presentation("a |")
    assert tietze_simplify(p) == p


def test_tietze_shortens_against_other_relator():
    # second relator shares a 3-letter block of the 4-letter first one
    p = parse_presentation("a,b | abab, aba")
    q = tietze_simplify(p)
    assert q.total_relator_length() < p.total_relator_length()
    assert same_abelian(p, q)


def test_tietze_is_deterministic():
    p = parse_presentation("a,b,c | abc, bca, cab, ab")
    assert tietze_simplify(p) == tietze_simplify(p)


words4 = st.lists(st.integers(min_value=-4, max_value=4).filter(bool), max_size=12).map(tuple)
presentations4 = st.builds(
    lambda rels: GroupPresentation(4, tuple(rels)), st.lists(words4, max_size=5)
)


@given(presentations4)
@settings(max_examples=100, deadline=None)
def test_normalize_idempotent(p):
    q = normalize(p)
    assert normalize(q) == q


@given(presentations4)
@settings(max_examples=100, deadline=None)
def test_abelianize_invariant_under_normalize(p):
    assert abelianize(p) == abelianize(normalize(p))


@given(presentations4)
@settings(max_examples=60, deadline=None)
def test_tietze_preserves_abelian_invariants(p):
    q = tietze_simplify(p, effort=60)
    assert abelianize(q) == abelianize(p)
    assert q.generator_count <= p.generator_count
    assert q.total_relator_length() <= normalize(p).total_relator_length()


@given(presentations4)
@settings(max_examples=60, deadline=None)
def test_format_parse_round_trip(p):
    q = normalize(p)
    assert parse_presentation(format_presentation(q)) == q


def test_same_abelian_examples():
    assert same_abelian(parse_presentation("a | aa"), parse_presentation("x | xx"))
    assert not same_abelian(parse_presentation("a |"), parse_presentation("a | aa"))
