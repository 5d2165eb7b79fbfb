import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_array_equal

from tcpkit.io import (
    InputError,
    dumps_tensor,
    fixture_names,
    load_fixture,
    loads_tensor,
    parse_tensor_file,
    parse_vector,
    tensor_from_dict,
    tensor_to_dict,
    write_tensor_file,
)
from tcpkit.tensor import Tensor


def test_diag_shorthand():
    assert loads_tensor('{"order": 4, "dim": 2, "diag": [1, 1]}') == Tensor.identity(4, 2)


def test_example_file_round_trip(tmp_path, ex4):
    path = tmp_path / "ex4.json"
    path.write_text(json.dumps({"order": 4, "dim": 2, "entries": [
        [[1, 1, 1, 1], 1], [[2, 2, 2, 2], 1], [[1, 1, 1, 2], -2], [[1, 1, 2, 2], -4]]}))
    assert parse_tensor_file(path) == ex4


@pytest.mark.parametrize("doc, message", [
    ('{"order": 4, "dim": 2, "entries": [[[1, 1, 1], 1]]}', "expected order 4"),
    ('{"order": 2, "dim": 2, "entries": [[[1, 1], 1], [[1, 1], 2]]}', "duplicate"),
    ('{"order": 2, "dim": 2, "entries": [[[1, 3], 1]]}', "out of range"),
    ('{"order": 2, "dim": 2, "entries": [[[1, 1], NaN]]}', "non-finite"),
    ('{"order": 2, "dim": 2, "entries": [[[1.5, 1], 1]]}', "integers"),
    ('{"order": 2, "dim": 2}', "exactly one"),
    ('{"order": 2, "dim": 2, "diag": [1], "entries": []}', "exactly one"),
    ('{"order": 1, "dim": 2, "diag": [1, 1]}', "order >= 2"),
    ('{"order": 2, "entries": []}', "missing key"),
    ('[1, 2]', "JSON object"),
])
def test_malformed_documents(doc, message):
    with pytest.raises(InputError, match=message):
        loads_tensor(doc)


def test_json_syntax_error_has_location():
    with pytest.raises(InputError, match=r"line 2 column"):
        loads_tensor('{"order": 2,\n "dim": }')


def test_missing_file(tmp_path):
    with pytest.raises(InputError):
        parse_tensor_file(tmp_path / "nope.json")


def test_canonical_form_is_one_based_and_sparse(ex0):
    assert tensor_to_dict(ex0) == {"order": 4, "dim": 2, "entries": [
        [[1, 1, 1, 1], 1.0], [[1, 1, 1, 2], -2.0], [[2, 2, 2, 2], 1.0]]}


@given(st.integers(1, 3), st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_serialize_parse_round_trip(n, m, seed):
    rng = np.random.default_rng(seed)
    data = rng.uniform(-1, 1, (n,) * m) * (rng.uniform(size=(n,) * m) < 0.5)
    A = Tensor(data)
    text = dumps_tensor(A)
    assert loads_tensor(text) == A
    assert dumps_tensor(loads_tensor(text)) == text


def test_write_then_parse(tmp_path, ex4):
    path = tmp_path / "t.json"
    write_tensor_file(ex4, path)
    assert parse_tensor_file(path) == ex4


def test_parse_vector_forms(tmp_path):
    assert_array_equal(parse_vector("0, -1"), [0.0, -1.0])
    assert_array_equal(parse_vector("[1.5, 2]"), [1.5, 2.0])
    path = tmp_path / "q.json"
    path.write_text("[3, 4]")
    assert_array_equal(parse_vector(str(path), 2), [3.0, 4.0])
    with pytest.raises(InputError):
        parse_vector("1, x")
    with pytest.raises(InputError):
        parse_vector("1, 2", 3)
    with pytest.raises(InputError):
        parse_vector("[1, Infinity]")


def test_bundled_fixtures():
    names = fixture_names()
    assert {"alpha0", "alpha4", "identity_m2", "identity_m3", "identity_m4",
            "odd_scalar_m3", "gus_pattern"} <= set(names)
    assert load_fixture("identity_m3") == Tensor.identity(3, 2)
    assert load_fixture("odd_scalar_m3") == Tensor([[[1.0]]])
    with pytest.raises(InputError):
        load_fixture("missing")
