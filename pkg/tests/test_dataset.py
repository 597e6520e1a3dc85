import numpy as np
import pytest

from mddbayes.dataset import Dataset, read_csv, write_csv
from mddbayes.errors import DataError, SchemaError
from mddbayes.synthetic import default_ground_truth, sample_dataset


@pytest.fixture(scope="module")
def demo_csv(tmp_path_factory):
    gt = default_ground_truth(seed=8, n=60)
    ds, _ = sample_dataset(gt)
    path = tmp_path_factory.mktemp("data") / "demo.csv"
    write_csv(ds, path)
    return path, ds


def test_roundtrip_exact(demo_csv):
    path, ds = demo_csv
    loaded = read_csv(path)
    assert loaded.participant_ids == ds.participant_ids
    assert np.array_equal(loaded.age_group, ds.age_group)
    assert np.array_equal(loaded.phq8, ds.phq8)
    assert np.array_equal(loaded.features, ds.features)  # bitwise floats
    assert loaded.country == ds.country


def _mutate_csv(path, tmp_path, line_no, transform, name="bad.csv"):
    lines = path.read_text().splitlines()
    lines[line_no] = transform(lines[line_no])
    out = tmp_path / name
    out.write_text("\n".join(lines) + "\n")
    return out


def test_bad_header_rejected(demo_csv, tmp_path):
    path, _ = demo_csv
    bad = _mutate_csv(path, tmp_path, 0, lambda s: s.replace("age_group", "age"))
    with pytest.raises(SchemaError, match="header"):
        read_csv(bad)


def test_out_of_range_age_rejected(demo_csv, tmp_path):
    path, _ = demo_csv
    def transform(line):
        cells = line.split(",")
        cells[1] = "7"
        return ",".join(cells)
    bad = _mutate_csv(path, tmp_path, 3, transform)
    with pytest.raises(SchemaError, match="age_group"):
        read_csv(bad)


def test_out_of_range_phq_rejected(demo_csv, tmp_path):
    path, _ = demo_csv
    def transform(line):
        cells = line.split(",")
        cells[5] = "4"
        return ",".join(cells)
    bad = _mutate_csv(path, tmp_path, 2, transform)
    with pytest.raises(SchemaError, match="phq8_2"):
        read_csv(bad)


def test_non_numeric_feature_rejected(demo_csv, tmp_path):
    path, _ = demo_csv
    def transform(line):
        cells = line.split(",")
        cells[12] = "abc"
        return ",".join(cells)
    bad = _mutate_csv(path, tmp_path, 1, transform)
    with pytest.raises(SchemaError, match="not a number"):
        read_csv(bad)


def test_partial_activity_blank_rejected(demo_csv, tmp_path):
    path, _ = demo_csv
    def transform(line):
        cells = line.split(",")
        cells[12] = ""  # first nback cell only
        return ",".join(cells)
    bad = _mutate_csv(path, tmp_path, 1, transform)
    with pytest.raises(SchemaError, match="wholesale"):
        read_csv(bad)


def test_whole_activity_blank_allowed(demo_csv, tmp_path):
    path, ds = demo_csv
    n_nback = sum(c.startswith("nback_") for c in ds.feature_columns)
    def transform(line):
        cells = line.split(",")
        for i in range(12, 12 + n_nback):
            cells[i] = ""
        return ",".join(cells)
    ok = _mutate_csv(path, tmp_path, 1, transform, name="ok.csv")
    loaded = read_csv(ok)
    assert np.isnan(loaded.features[0, :n_nback]).all()
    assert not loaded.complete_mask()[0]
    assert loaded.complete_mask()[1:].all()
    rec = loaded.records()[0]
    assert "nback" not in rec.features
    assert "image" in rec.features


def test_blank_phq_item_allowed(demo_csv, tmp_path):
    path, _ = demo_csv
    def transform(line):
        cells = line.split(",")
        cells[4] = ""
        return ",".join(cells)
    ok = _mutate_csv(path, tmp_path, 1, transform, name="ok2.csv")
    loaded = read_csv(ok)
    assert np.isnan(loaded.phq8[0, 0])
    assert np.isnan(loaded.condition()[0])
    assert loaded.records()[0].phq8_items is None


def test_duplicate_ids_rejected(demo_csv, tmp_path):
    path, _ = demo_csv
    lines = path.read_text().splitlines()
    cells = lines[2].split(",")
    cells[0] = lines[1].split(",")[0]
    lines[2] = ",".join(cells)
    bad = tmp_path / "dup.csv"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(DataError, match="duplicate"):
        read_csv(bad)


def test_unknown_feature_prefix_rejected(tmp_path):
    header = (
        "participant_id,age_group,gender,device,"
        + ",".join(f"phq8_{i}" for i in range(1, 9))
        + ",typing_speed_0"
    )
    bad = tmp_path / "cols.csv"
    bad.write_text(header + "\n")
    with pytest.raises(SchemaError):
        read_csv(bad)


def test_records_roundtrip(demo_csv):
    _, ds = demo_csv
    records = ds.records()
    assert len(records) == ds.n
    r = records[0]
    assert r.condition == int(ds.condition()[0])
    assert set(r.features) == {"nback", "image", "paragraph"}
    assert r.metadata["country"] in {"UK", "US"}
