import json
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussym.core import SpectralTolerances
from gaussym.ensemble import random_gaussian_state
from gaussym.errors import FormatError
from gaussym.io import (MAGIC, from_bytes, from_json, load_binary, read_csv, save_binary,
                        to_bytes, to_json, write_csv)


@pytest.fixture
def state(rng):
    return random_gaussian_state(3, rng)


def test_binary_layout(state):
    raw = to_bytes(state)
    assert len(raw) == 36 + 2 * 16 * 9
    magic, version, ell = struct.unpack_from("<4sII", raw)
    assert (magic, version, ell) == (MAGIC, 1, 3)
    tol = struct.unpack_from("<3d", raw, 12)
    assert tol == (state.tolerances.tol_herm, state.tolerances.tol_spec,
                   state.tolerances.clip_eps)
    re, im = struct.unpack_from("<2d", raw, 36 + 16)
    assert complex(re, im) == state.G[0, 1]


def test_binary_round_trip(state, tmp_path):
    path = tmp_path / "c.gsym"
    save_binary(state, path)
    back = load_binary(path)
    assert back.allclose(state, atol=0.0)
    assert back.tolerances == state.tolerances


def test_custom_tolerances_survive(rng):
    C = random_gaussian_state(2, rng)
    tol = SpectralTolerances(1e-9, 1e-8, 1e-11)
    C2 = type(C)(C.G, C.F, tol)
    assert from_bytes(to_bytes(C2)).tolerances == tol
    assert from_json(to_json(C2)).tolerances == tol


@pytest.mark.parametrize("mutate, msg", [
    (lambda b: b"XXXX" + b[4:], "magic"),
    (lambda b: b[:4] + struct.pack("<I", 7) + b[8:], "version"),
    (lambda b: b[:-1], "length"),
    (lambda b: b[:10], "truncated"),
])
def test_binary_errors(state, mutate, msg):
    with pytest.raises(FormatError, match=msg):
        from_bytes(mutate(to_bytes(state)))


def test_json_round_trip(state):
    text = to_json(state, indent=1)
    doc = json.loads(text)
    assert doc["ell"] == 3 and set(doc["G"]) == {"re", "im"}
    assert from_json(text).allclose(state, atol=0.0)


@pytest.mark.parametrize("text", ["{", "{}", '{"ell": 2, "tolerances": {}, "G": 1, "F": 1}'])
def test_json_errors(text):
    with pytest.raises(FormatError):
        from_json(text)


def test_json_shape_mismatch(state):
    doc = json.loads(to_json(state))
    doc["ell"] = 2
    with pytest.raises(FormatError):
        from_json(json.dumps(doc))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=1,
                max_size=20))
def test_csv_round_trip_is_lossless(tmp_path_factory, values):
    path = tmp_path_factory.mktemp("csv") / "t.csv"
    write_csv(path, ["i", "x"], [(i, v) for i, v in enumerate(values)])
    header, data = read_csv(path)
    assert header == ["i", "x"]
    assert data[:, 1].tolist() == values


def test_csv_text(tmp_path):
    path = write_csv(tmp_path / "sub" / "t.csv", ["a", "b"], [(1, 0.1), (2, 1 / 3)])
    assert path.read_text() == "a,b\n1,0.1\n2,0.3333333333333333\n"


@pytest.mark.parametrize("content", ["", "a,b\n", "a,b\n1\n", "a,b\n1,x\n"])
def test_csv_errors(tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    with pytest.raises(FormatError):
        read_csv(path)
