import csv

import numpy as np
import pytest

from src.models.grid import Field
from src.models.params import ProfileParams
from src.models.reports import BubbleDecomposition, Profile
from src.services.grid import make_grid
from src.services.presets import gaussian
from src.storage.artifacts import ArtifactStore, get_store, read_field
from src.utils.errors import InvalidDataError

PROVENANCE = {"config_hash": "abc123", "seed": 7, "version": "0.1.0"}


def _rows(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.reader(handle))


def test_csv_starts_with_provenance(tmp_path):
    with get_store(tmp_path, PROVENANCE) as store:
        path = store.write_csv(
            "table.csv", ["a", "b"], [[1, 0.1], [2, True]], trailer=[["# verdict", "ok"]]
        )
    rows = _rows(path)
    assert rows[0] == ["# provenance", "config_hash=abc123", "seed=7", "version=0.1.0"]
    assert rows[1] == ["a", "b"]
    assert rows[2] == ["1", "0.1"]
    assert rows[3] == ["2", "true"]
    assert rows[-1] == ["# verdict", "ok"]


def test_field_dump_reads_back_exactly(tmp_path):
    grid = make_grid(1.5, 8.0, 16)
    f = gaussian(grid, width=0.7, N=2.0)
    store = ArtifactStore(tmp_path / "nested", PROVENANCE)
    path = store.write_field("f.csv", f)
    assert store.written == [path]

    g = read_field(path)
    assert g.grid == grid
    assert np.array_equal(g.values, f.values)
    assert _rows(path)[1][0] == "# field"


def test_rewrite_is_byte_identical(tmp_path):
    f = gaussian(make_grid(0.0, 8.0, 32))
    first = ArtifactStore(tmp_path / "a", PROVENANCE).write_field("f.csv", f)
    second = ArtifactStore(tmp_path / "b", PROVENANCE).write_field("f.csv", f)
    assert first.read_bytes() == second.read_bytes()


def test_read_field_rejects_malformed(tmp_path):
    missing = tmp_path / "missing_header.csv"
    missing.write_text("x,re,im\n0.0,1.0,0.0\n", encoding="utf-8")
    with pytest.raises(InvalidDataError) as info:
        read_field(missing)
    assert info.value.parameter == "input"

    broken = tmp_path / "broken.csv"
    broken.write_text("# field,center=0.0,dx=1.0,n=4\nx,re,im\n0.0,one,0.0\n", encoding="utf-8")
    with pytest.raises(InvalidDataError):
        read_field(broken)

    short = tmp_path / "short.csv"
    short.write_text("# field,center=0.0,dx=1.0,n=4\nx,re,im\n0.0,1.0,0.0\n", encoding="utf-8")
    with pytest.raises(InvalidDataError):
        read_field(short)


def test_read_field_rejects_unreadable_path(tmp_path):
    with pytest.raises(InvalidDataError) as info:
        read_field(tmp_path / "absent.csv")
    assert info.value.parameter == "input"
    with pytest.raises(InvalidDataError):
        read_field(tmp_path)


def test_decomposition_directory(tmp_path):
    grid = make_grid(0.0, 16.0, 64)
    core = gaussian(grid)
    decomposition = BubbleDecomposition(
        profiles=(
            Profile(params=ProfileParams(h=1.0, x0=2.0), core=core, piece=0, alpha=0),
            Profile(params=ProfileParams(h=0.5, xi=3.0), core=core, piece=1, alpha=0),
        ),
        remainder=Field(grid=grid, values=np.zeros(64)),
        delta=0.05,
        l2_gap=1e-3,
    )
    with get_store(tmp_path, PROVENANCE) as store:
        directory = store.write_decomposition("decomposition", decomposition)

    names = sorted(p.name for p in directory.iterdir())
    assert names == ["core_0.csv", "core_1.csv", "manifest.csv", "remainder.csv", "summary.csv"]
    manifest = _rows(directory / "manifest.csv")
    assert manifest[1][:4] == ["index", "piece", "alpha", "h"]
    assert len(manifest) == 4
    assert read_field(directory / "core_1.csv").grid == grid
    summary = _rows(directory / "summary.csv")
    assert summary[2][0] == "2"
