import numpy as np
import pytest

from hdlp.data import (
    Dataset,
    apply_transform,
    attach_metadata,
    demean,
    load_csv,
    load_metadata,
    transform_dataset,
    write_matrix_csv,
)
from hdlp.errors import DataError


def test_transform_code_1_identity():
    out = apply_transform([2.0, 4.0, 8.0], 1)
    assert np.array_equal(out, [2.0, 4.0, 8.0])


def test_transform_code_5_constant():
    c = 3.7
    out = apply_transform([c, c, c], 5)
    assert np.isnan(out[0])
    assert out[1] == 0.0 and out[2] == 0.0


def test_transform_code_2_first_difference():
    out = apply_transform([1.0, 3.0, 6.0], 2)
    assert np.isnan(out[0])
    assert out[1] == 2.0 and out[2] == 3.0


def test_transform_codes_4_and_6():
    x = np.array([1.0, np.e, np.e**3])
    assert np.allclose(apply_transform(x, 4), [0.0, 1.0, 3.0])
    out6 = apply_transform(x, 6)
    assert np.isnan(out6[0]) and np.isnan(out6[1])
    assert out6[2] == pytest.approx(1.0)


def test_transform_second_difference_is_composed_first_difference():
    # code 3 = code 2 o code 2; code 6 adds one more first-difference on
    # top of code 5, on the overlapping sample
    rng = np.random.default_rng(3)
    x = rng.random(30) + 1.0
    for inner, outer_code in ((2, 3), (5, 6)):
        once = apply_transform(x, inner)
        twice = apply_transform(once[1:], 2)
        direct = apply_transform(x, outer_code)
        assert np.allclose(direct[2:], twice[1:])


def test_transform_log_rejects_nonpositive():
    with pytest.raises(DataError, match=r"GDP.*index 1"):
        apply_transform([1.0, -2.0, 3.0], 5, name="GDP")


def test_transform_invalid_code():
    with pytest.raises(DataError, match="transform code 7"):
        apply_transform([1.0, 2.0], 7, name="x")


def test_leading_nan_count_per_code():
    x = np.linspace(1.0, 2.0, 10)
    for code, expected in ((1, 0), (2, 1), (3, 2), (4, 0), (5, 1), (6, 2)):
        out = apply_transform(x, code)
        assert int(np.isnan(out).sum()) == expected
        assert np.isfinite(out[expected:]).all()


def test_demean_examples():
    out, mu = demean(np.array([[1.0], [3.0]]))
    assert np.array_equal(out, [[-1.0], [1.0]])
    assert mu[0] == 2.0
    z, mz = demean(np.zeros((4, 2)))
    assert np.array_equal(z, np.zeros((4, 2)))
    assert np.array_equal(mz, np.zeros(2))


def test_demean_idempotent(rng):
    m = rng.standard_normal((40, 3)) * 7 + 2
    once, _ = demean(m)
    twice, mu = demean(once)
    assert np.max(np.abs(twice - once)) < 1e-12
    assert np.max(np.abs(mu)) < 1e-12


def test_dataset_rejects_internal_gap():
    values = np.ones((5, 1))
    values[2, 0] = np.nan
    with pytest.raises(DataError, match="internal gap"):
        Dataset(names=["a"], values=values)


def test_dataset_allows_leading_nans():
    values = np.ones((5, 1))
    values[0, 0] = np.nan
    ds = Dataset(names=["a"], values=values)
    assert ds.n_obs == 5


def test_csv_metadata_round_trip(tmp_path):
    panel = tmp_path / "panel.csv"
    panel.write_text(
        "date,alpha,beta\n2001-01,1.5,10\n2001-02,2.5,20\n2001-03,3.5,40\n"
    )
    meta = tmp_path / "meta.csv"
    meta.write_text("series,transform,class\nalpha,1,slow\nbeta,5,fast\n")
    ds = attach_metadata(load_csv(panel), load_metadata(meta))
    assert ds.names == ["alpha", "beta"]
    assert ds.transform_codes == [1, 5]
    assert ds.speed_class == ["slow", "fast"]
    assert ds.time_index[0] == "2001-01"
    out = transform_dataset(ds)
    assert np.isnan(out.values[0, 1])
    assert out.values[1, 1] == pytest.approx(np.log(2.0))


def test_metadata_invalid_code(tmp_path):
    meta = tmp_path / "meta.csv"
    meta.write_text("series,transform,class\nalpha,7,slow\n")
    with pytest.raises(DataError, match=r"alpha.*transform code 7"):
        load_metadata(meta)


def test_csv_ragged_row_rejected(tmp_path):
    panel = tmp_path / "panel.csv"
    panel.write_text("date,a,b\n1,1.0\n")
    with pytest.raises(DataError, match="line 2"):
        load_csv(panel)


def test_write_matrix_csv(tmp_path):
    path = tmp_path / "m.csv"
    write_matrix_csv(path, np.array([[1.0, 2.5], [3.0, -4.0]]), ["x", "y"],
                     index=["r1", "r2"])
    lines = path.read_text().strip().splitlines()
    assert lines[0] == ",x,y"
    assert lines[1] == "r1,1.0,2.5"
