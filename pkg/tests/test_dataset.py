"""Sample-set construction, CSV round trips, and the synthetic generators."""

import numpy as np
import pytest

import fastmmd as fm
from fastmmd.errors import ValidationError


class TestSampleSet:
    def test_index_partition(self):
        s = fm.SampleSet(np.zeros((4, 2)), np.array([1, 2, 1, 2]))
        assert list(s.idx1) == [0, 2]
        assert list(s.idx2) == [1, 3]
        assert (s.n, s.d, s.n1, s.n2) == (4, 2, 2, 2)

    def test_rejects_bad_labels(self):
        with pytest.raises(ValidationError, match="outside"):
            fm.SampleSet(np.zeros((2, 1)), np.array([1, 3]))

    def test_rejects_single_group(self):
        with pytest.raises(ValidationError, match="at least one sample"):
            fm.SampleSet(np.zeros((3, 1)), np.array([1, 1, 1]))

    def test_rejects_non_finite(self):
        data = np.zeros((2, 2))
        data[1, 0] = np.nan
        with pytest.raises(ValidationError, match="non-finite"):
            fm.SampleSet(data, np.array([1, 2]))

    def test_immutable(self):
        s = fm.SampleSet(np.zeros((2, 1)), np.array([1, 2]))
        with pytest.raises(ValueError):
            s.data[0, 0] = 1.0


class TestCsv:
    def test_four_row_example(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text(
            "a,b,c,label\n"
            "0.0,1.0,2.0,1\n"
            "0.5,1.5,2.5,1\n"
            "3.0,4.0,5.0,2\n"
            "3.5,4.5,5.5,2\n"
        )
        s = fm.load_csv(path, "label")
        assert (s.n, s.d, s.n1, s.n2) == (4, 3, 2, 2)
        assert s.data[0, 2] == 2.0

    def test_label_by_index(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("label,x\n1,0.0\n2,1.0\n")
        s = fm.load_csv(path, 0)
        assert s.d == 1

    def test_bad_label_reports_row(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("x,label\n0.0,1\n1.0,3\n2.0,2\n")
        with pytest.raises(ValidationError, match="row 3"):
            fm.load_csv(path)

    def test_nan_feature_rejected(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("x,label\nnan,1\n1.0,2\n")
        with pytest.raises(ValidationError, match="non-finite"):
            fm.load_csv(path)

    def test_non_numeric_cell_reports_row_and_column(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("x,y,label\n0.0,oops,1\n1.0,2.0,2\n")
        with pytest.raises(ValidationError, match="row 2.*'y'"):
            fm.load_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValidationError, match="no such file"):
            fm.load_csv(tmp_path / "absent.csv")

    def test_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(7)
        s = fm.two_sample(rng.normal(size=(5, 3)) * 1e-7, rng.normal(size=(4, 3)) * 1e3)
        path = tmp_path / "rt.csv"
        fm.save_csv(s, path)
        loaded = fm.load_csv(path)
        assert np.array_equal(loaded.data, s.data)
        assert np.array_equal(loaded.labels, s.labels)


class TestBlobs:
    def test_deterministic(self):
        spec = fm.BlobSpec(epsilon=2.0, samples_per_set=100)
        a = fm.synth_blobs(spec, "Q", seed=11)
        b = fm.synth_blobs(spec, "Q", seed=11)
        assert np.array_equal(a, b)

    def test_epsilon_one_matches_isotropic(self):
        spec = fm.BlobSpec(epsilon=1.0, samples_per_set=500)
        p = fm.synth_blobs(spec, "P", seed=3)
        q = fm.synth_blobs(spec, "Q", seed=3)
        assert np.array_equal(p, q)

    def test_epsilon_below_one_rejected(self):
        with pytest.raises(ValidationError, match="epsilon"):
            fm.BlobSpec(epsilon=0.5)

    def test_covariance_eigenvalue_ratio(self):
        # Samples of one blob should show an empirical covariance eigenvalue
        # ratio near epsilon, with the long axis on the (1,1) diagonal.  A
        # wide grid makes nearest-center assignment recover the true blob.
        spec = fm.BlobSpec(grid_spacing=50.0, epsilon=4.0, samples_per_set=250_000)
        q = fm.synth_blobs(spec, "Q", seed=5)
        centers = fm.dataset.blob_centers(spec)
        assign = np.argmin(
            ((q[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2), axis=1
        )
        one_blob = q[assign == 12]  # central blob
        eigs, vecs = np.linalg.eigh(np.cov(one_blob.T))
        ratio = eigs[1] / eigs[0]
        assert abs(ratio - 4.0) / 4.0 < 0.05
        assert abs(vecs[:, 1] @ [2**-0.5, 2**-0.5]) > 0.99

    def test_mean_converges_to_center_centroid(self):
        spec = fm.BlobSpec(epsilon=1.0, samples_per_set=100_000)
        p = fm.synth_blobs(spec, "P", seed=1)
        centroid = fm.dataset.blob_centers(spec).mean(axis=0)
        se = p.std(axis=0, ddof=1) / np.sqrt(p.shape[0])
        assert (np.abs(p.mean(axis=0) - centroid) < 3 * se).all()


class TestRing:
    def test_geometry(self):
        s = fm.synth_ring(200, seed=2)
        r2_inside = (s.group(1) ** 2).sum(axis=1)
        r2_outside = (s.group(2) ** 2).sum(axis=1)
        assert ((r2_inside >= 1.0) & (r2_inside <= 16.0)).all()
        assert ((r2_outside < 1.0) | (r2_outside > 16.0)).all()
        assert (np.abs(s.data) <= 5.0).all()

    def test_paper_scale_setup(self):
        s = fm.synth_ring(200, seed=0)
        assert s.n1 == 200 and s.n2 == 200

    def test_deterministic(self):
        a = fm.synth_ring(50, seed=9)
        b = fm.synth_ring(50, seed=9)
        assert np.array_equal(a.data, b.data)


class TestHypercube:
    def test_bounds_per_group(self):
        s = fm.synth_hypercube(100, d=16, seed=4)
        assert s.d == 16
        g1, g2 = s.group(1), s.group(2)
        assert (g1 >= 0.0).all() and (g1 <= 0.95).all()
        assert (g2 >= 0.95).all() and (g2 <= 1.0).all()

    def test_invalid_dimension(self):
        with pytest.raises(ValidationError, match="dimension"):
            fm.synth_hypercube(10, d=0, seed=0)
