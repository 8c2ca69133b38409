import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from strainspace.errors import KindMismatchError, MalformedHeaderError, TruncatedPayloadError
from strainspace.fieldio import read_field, read_header, write_field
from strainspace.spectral import make_grid, random_field


@given(st.sampled_from(["scalar", "vector", "symmatrix", "antisymmatrix"]), st.sampled_from([2, 3]), st.integers(0, 1000))
def test_round_trip_is_bitwise(tmp_path_factory, kind, d, seed):
    f = random_field(make_grid(d, 8, 1.5), kind, 1.0, seed)
    for field in (f, f.physical()):
        path = write_field(field, tmp_path_factory.mktemp("f") / "x.field", seed=seed)
        back = read_field(path)
        assert type(back) is type(field)
        assert back.rep == field.rep and back.grid == field.grid
        assert np.array_equal(back.data, field.data)


def test_header_layout(tmp_path):
    f = random_field(make_grid(3, 8), "vector", 1.0, 0).physical()
    path = write_field(f, tmp_path / "v.field", seed=7, meta={"note": "x"})
    raw = path.read_bytes()
    line, payload = raw.split(b"\n", 1)
    head = json.loads(line)
    assert head == read_header(path)
    assert {k: head[k] for k in ("kind", "d", "n", "L", "rep", "seed")} == {
        "kind": "vector", "d": 3, "n": 8, "L": 1.0, "rep": "physical", "seed": 7,
    }
    # components vary fastest: the first three pairs are point 0, components 0..2
    first = np.frombuffer(payload[:48], dtype="<f8").reshape(3, 2)
    assert np.array_equal(first[:, 0], f.data[:, 0, 0, 0].real)
    assert len(payload) == 3 * 8**3 * 16


def test_truncated_payload(tmp_path):
    path = write_field(random_field(make_grid(3, 8), "symmatrix", 1.0, 0), tmp_path / "s.field")
    path.write_bytes(path.read_bytes()[:-200])
    with pytest.raises(TruncatedPayloadError):
        read_field(path)


def test_payload_of_other_dimension(tmp_path):
    g2 = make_grid(2, 8)
    path = write_field(random_field(g2, "vector", 1.0, 0), tmp_path / "v.field")
    line, payload = path.read_bytes().split(b"\n", 1)
    head = json.loads(line)
    head["d"] = 3
    path.write_bytes(json.dumps(head).encode() + b"\n" + payload)
    with pytest.raises(KindMismatchError):
        read_field(path)


def test_longer_payload(tmp_path):
    path = write_field(random_field(make_grid(2, 8), "scalar", 1.0, 0), tmp_path / "s.field")
    path.write_bytes(path.read_bytes() + b"\0" * 24)
    with pytest.raises(KindMismatchError):
        read_field(path)


def test_expected_kind(tmp_path):
    path = write_field(random_field(make_grid(2, 8), "scalar", 1.0, 0), tmp_path / "s.field")
    with pytest.raises(KindMismatchError):
        read_field(path, expect_kind="vector")


@pytest.mark.parametrize(
    "header",
    [b"not json\n", b"[1, 2]\n", b'{"kind": "scalar", "d": 2}\n', b'{"kind": "tensor", "d": 2, "n": 8, "L": 1, "rep": "physical"}\n',
     b'{"kind": "scalar", "d": 2, "n": 7, "L": 1, "rep": "physical"}\n', b'{"kind": "scalar"'],
)
def test_malformed_header(tmp_path, header):
    path = tmp_path / "bad.field"
    path.write_bytes(header)
    with pytest.raises(MalformedHeaderError):
        read_field(path)
