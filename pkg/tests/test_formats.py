import struct

import numpy as np
import pytest

from sparsefourier.errors import FormatError
from sparsefourier.formats import (load_signal_spec, read_rlsf, representation_from_dict,
                                   save_signal_spec, write_rlsf)
from sparsefourier.signal_model import GeneratedSignalSpec, SparseRepresentation


def test_rlsf_header_layout(tmp_path):
    path = tmp_path / "x.rlsf"
    write_rlsf(path, np.array([1 + 2j, -3.5]))
    raw = path.read_bytes()
    assert raw[:4] == b"RLSF"
    assert struct.unpack("<IQI", raw[4:20]) == (1, 2, 1)
    assert struct.unpack("<4d", raw[20:]) == (1.0, 2.0, -3.5, 0.0)


@pytest.mark.parametrize("shape", [(7,), (4, 4), (3, 3, 3)])
def test_rlsf_round_trip(tmp_path, shape):
    rng = np.random.default_rng(0)
    x = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    write_rlsf(tmp_path / "a.rlsf", x)
    assert np.array_equal(read_rlsf(tmp_path / "a.rlsf"), x)


def test_rlsf_rejects_bad_files(tmp_path):
    bad = tmp_path / "bad.rlsf"
    bad.write_bytes(b"XXXX" + bytes(16))
    with pytest.raises(FormatError):
        read_rlsf(bad)
    bad.write_bytes(struct.pack("<4sIQI", b"RLSF", 2, 1, 1) + bytes(16))
    with pytest.raises(FormatError):
        read_rlsf(bad)
    bad.write_bytes(struct.pack("<4sIQI", b"RLSF", 1, 2, 1) + bytes(16))
    with pytest.raises(FormatError):
        read_rlsf(bad)
    bad.write_bytes(b"RL")
    with pytest.raises(FormatError):
        read_rlsf(bad)
    with pytest.raises(FormatError):
        write_rlsf(bad, np.zeros((2, 3)))


def test_signal_spec_round_trip(tmp_path):
    spec = GeneratedSignalSpec(101, 2, modes=[((1, 2), 3 - 1j)], noise_sigma=0.5, seed=3)
    save_signal_spec(tmp_path / "s.json", spec)
    assert load_signal_spec(tmp_path / "s.json") == spec


def test_bad_json(tmp_path):
    (tmp_path / "s.json").write_text("{not json")
    with pytest.raises(FormatError):
        load_signal_spec(tmp_path / "s.json")
    (tmp_path / "s.json").write_text("{}")
    with pytest.raises(FormatError):
        load_signal_spec(tmp_path / "s.json")


def test_representation_round_trip():
    rep = SparseRepresentation(50, 1, [((3,), 1j), ((40,), 2)])
    again = representation_from_dict(rep.to_dict())
    assert again.to_dict() == rep.to_dict()
    with pytest.raises(FormatError):
        representation_from_dict({"n": 5})
