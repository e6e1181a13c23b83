import numpy as np
import pytest

from osig import io
from osig.reach import compute_masks
from osig.sim import rollout


def test_value_table_roundtrip(tmp_path, corridor):
    spec, table, conj = corridor
    f = tmp_path / "v.bin"
    io.save_values(f, table)
    back = io.load_values(f, spec, table.mask)
    assert np.array_equal(back.values, table.values)
    g = tmp_path / "v2.bin"
    io.save_values(g, back)
    assert f.read_bytes() == g.read_bytes()


def test_conjugate_and_mask_roundtrip(tmp_path, corridor):
    spec, table, conj = corridor
    io.save_mask(tmp_path / "m.bin", table.mask, spec)
    mask = io.load_mask(tmp_path / "m.bin", spec)
    assert np.array_equal(mask.feasible, table.mask.feasible)
    io.save_conjugate(tmp_path / "c.bin", conj)
    back = io.load_conjugate(tmp_path / "c.bin", spec, mask)
    assert np.array_equal(back.values, conj.values)


def test_header_is_versioned(tmp_path, bq):
    spec, table, _ = bq
    io.save_values(tmp_path / "v.bin", table)
    header, arr = io.load_array(tmp_path / "v.bin")
    assert header["version"] == "osig-table-v1"
    assert header["kind"] == "value" and header["shape"] == list(table.values.shape)
    header["version"] = "other"
    io.save_array(tmp_path / "bad.bin", header, arr)
    with pytest.raises(ValueError, match="version"):
        io.load_array(tmp_path / "bad.bin")


def test_mismatched_game_is_rejected(tmp_path, corridor, bq):
    spec, table, _ = corridor
    io.save_values(tmp_path / "v.bin", table)
    other = bq[0]
    with pytest.raises(ValueError):
        io.load_values(tmp_path / "v.bin", other, compute_masks(other))
    with pytest.raises(ValueError):
        io.load_mask(tmp_path / "v.bin", spec)


def test_truncated_file(tmp_path):
    (tmp_path / "t.bin").write_bytes(b"\x01")
    with pytest.raises(ValueError):
        io.load_array(tmp_path / "t.bin")


def test_jsonl_roundtrip(tmp_path, bq):
    spec, table, conj = bq
    recs = [rollout(spec, table, conj, [0, 0], seed=s) for s in range(5)]
    io.write_jsonl(tmp_path / "r.jsonl", recs)
    assert io.read_jsonl(tmp_path / "r.jsonl") == recs


def test_csv_uses_twelve_digits(tmp_path):
    io.write_csv(tmp_path / "a.csv", ["a", "b", "c"], [[1 / 3, 7, True], [np.float64(2e-20), None, "x"]])
    text = (tmp_path / "a.csv").read_text()
    assert text == "a,b,c\n0.333333333333,7,true\n2e-20,,x\n"
    with pytest.raises(ValueError):
        io.write_csv(tmp_path / "b.csv", ["a"], [[1, 2]])


def test_trajectory_rows(bq):
    spec, table, conj = bq
    rec = rollout(spec, table, conj, [0, 0], seed=0)
    cols = io.trajectory_columns(rec)
    rows = io.trajectory_rows([rec])
    assert len(rows) == spec.L + 1 and all(len(r) == len(cols) for r in rows)
