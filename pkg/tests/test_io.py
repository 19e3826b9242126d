import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kemeny_completion import matrix_io
from kemeny_completion.errors import NotSquare, ParseError
from kemeny_completion.markov import validate_stochastic
from kemeny_completion.partial import validate_partial

TEXT = """# diagonal spec
3
0.5 ? ?

? 0 ?
? ? 0.25
"""


def test_parse_text_with_comments_and_blanks():
    grid, n = matrix_io.loads(TEXT)
    assert n == 3
    assert grid == [[0.5, None, None], [None, 0.0, None], [None, None, 0.25]]


def test_parse_json():
    grid, n = matrix_io.loads('{"n": 2, "rows": [["?", "?"], [0.25, 0.75]]}')
    assert n == 2 and grid == [[None, None], [0.25, 0.75]]


@pytest.mark.parametrize(
    "text",
    [
        "",
        "# only a comment\n",
        "two\n1 0\n0 1\n",
        "0\n",
        "2\n1 abc\n0 1\n",
        "2\n0.1234567890123456789 ?\n? ?\n",
        "2\n1,0\n0 1\n",
        '{"n": 2}',
        '{"n": 2, "rows": [[true, "?"], ["?", "?"]]}',
        '{"n": 2, "rows": [["x", "?"], ["?", "?"]]}',
        "{not json",
    ],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        matrix_io.loads(text)


def test_seventeen_digits_accepted():
    grid, _ = matrix_io.loads("1\n0.33333333333333331\n")
    assert grid[0][0] == 1 / 3


def test_header_row_mismatch_is_not_square(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("3\n? ?\n? ?\n")
    with pytest.raises(NotSquare):
        matrix_io.read_partial(p)
    p.write_text("2\n? ?\n? ?\n? ?\n")
    with pytest.raises(NotSquare):
        matrix_io.read_partial(p)


def test_missing_file_is_parse_error(tmp_path):
    with pytest.raises(ParseError):
        matrix_io.load_grid(tmp_path / "absent.txt")


def test_text_round_trip_partial():
    P = validate_partial(matrix_io.loads(TEXT)[0])
    Q = validate_partial(matrix_io.loads(matrix_io.dumps_text(P))[0])
    np.testing.assert_array_equal(P.free, Q.free)
    np.testing.assert_array_equal(P.values, Q.values)


def test_json_round_trip_partial():
    P = validate_partial(matrix_io.loads(TEXT)[0])
    obj = json.loads(matrix_io.dumps_json(P))
    assert obj["rows"][0] == [0.5, "?", "?"]
    Q = validate_partial(matrix_io.loads(json.dumps(obj))[0])
    np.testing.assert_array_equal(P.values, Q.values)


@given(st.lists(st.floats(0.0, 1.0, allow_subnormal=True), min_size=2, max_size=6))
def test_float_round_trip_is_exact(vals):
    row = np.array(vals)
    if row.sum() == 0:
        return
    T = validate_stochastic(np.vstack([row / row.sum()] * len(vals)))
    for dump in (matrix_io.dumps_text, matrix_io.dumps_json):
        grid, n = matrix_io.loads(dump(T))
        assert n == T.n
        np.testing.assert_array_equal(np.array(grid), T.entries)
