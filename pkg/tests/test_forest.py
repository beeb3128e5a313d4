import pytest

from elimdist.forest import EliminationForest, format_forest, parse_forest, read_forest, write_forest


def _sample() -> EliminationForest:
    return EliminationForest(
        {0: None, 1: 0, 2: 0, 3: None},
        {0: frozenset({4}), 1: frozenset({0, 1}), 2: frozenset({2}), 3: frozenset({3})},
    )


def test_structure():
    ef = _sample()
    assert ef.roots == [0, 3]
    assert ef.leaves() == [1, 2, 3]
    assert ef.internal() == [0]
    assert ef.elimination_set() == {4}
    assert ef.heights() == {0: 1, 1: 0, 2: 0, 3: 0}
    assert ef.height == 1
    assert ef.subtree(0) == {0, 1, 2, 4}


def test_round_trip(tmp_path):
    ef = _sample()
    assert parse_forest(format_forest(ef)) == ef
    p = tmp_path / "f.txt"
    write_forest(ef, p)
    assert read_forest(p) == ef


def test_empty_leaf_round_trip():
    ef = EliminationForest({0: None, 1: 0}, {0: frozenset({0}), 1: frozenset()})
    assert parse_forest(format_forest(ef)) == ef


@pytest.mark.parametrize(
    "text",
    ["x 0 - 1\n", "t 0\n", "t a - 1\n", "t 0 - 1\nt 0 - 2\n", "t 0 5 1\n"],
)
def test_parse_errors(text):
    with pytest.raises(ValueError):
        parse_forest(text)
