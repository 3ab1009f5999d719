import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from irksn.conditions import GroundTruth
from irksn.datagen import gen_example1
from irksn.exceptions import ParameterError
from irksn.metrics import (
    CSV_COLUMNS,
    MetricRow,
    extract_path,
    f1_batch,
    f1_support,
    format_params,
    model_error,
    row_errors,
    support_of,
)
from irksn.solvers import IrksnConfig, SolverRun, irksn


def truth_of(w):
    w = np.asarray(w, dtype=float)
    return GroundTruth(w, np.flatnonzero(w), np.zeros(1))


class TestSupport:
    def test_examples(self):
        np.testing.assert_array_equal(support_of([0, 2, 0, -1], 0.0), [1, 3])
        np.testing.assert_array_equal(support_of([1e-12, 1.0]), [1])
        assert support_of(np.zeros(4)).size == 0

    def test_negative_tol(self):
        with pytest.raises(ParameterError):
            support_of([1.0], -1.0)

    @given(arrays(np.float64, 8, elements=st.floats(-10, 10)), st.floats(0, 5),
           st.floats(0, 5))
    def test_monotone_tolerance(self, w, t1, t2):
        lo, hi = sorted((t1, t2))
        assert support_of(w, hi).size <= support_of(w, lo).size


class TestF1:
    def test_exact(self):
        t = truth_of([1.0, 0, -2.0, 0])
        assert f1_support([3.0, 0, 1.0, 0], t) == (1.0, 1.0, 1.0)

    def test_superset(self):
        t = truth_of([1.0, 1.0, 0, 0])
        f1, p, r = f1_support([1.0, 1.0, 1.0, 1.0], t)
        assert (p, r) == (0.5, 1.0)
        assert f1 == pytest.approx(2 / 3)

    def test_disjoint_and_empty(self):
        t = truth_of([1.0, 0, 0])
        assert f1_support([0, 1.0, 0], t) == (0.0, 0.0, 0.0)
        assert f1_support(np.zeros(3), t) == (0.0, 0.0, 0.0)

    @given(arrays(np.float64, 6, elements=st.sampled_from([0.0, 1.0, -2.0])))
    def test_bounds_and_equality(self, w):
        t = truth_of([1.0, 0, 0, 3.0, 0, 0])
        f1, p, r = f1_support(w, t)
        assert 0.0 <= f1 <= 1.0
        same = np.array_equal(np.flatnonzero(w), t.support)
        assert (f1 == 1.0) == same

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(0)
        coefs = rng.normal(size=(20, 7)) * (rng.random((20, 7)) < 0.4)
        t = truth_of([1.0, 0, 0, 2.0, 0, 1.0, 0])
        f1, p, r, s = f1_batch(coefs, t.support)
        for i, w in enumerate(coefs):
            assert (f1[i], p[i], r[i]) == pytest.approx(f1_support(w, t))
            assert s[i] == np.count_nonzero(w)


class TestErrors:
    def test_model_error(self):
        t = truth_of([3.0, 0, 4.0])
        assert model_error(t.w_star, t) == 0.0
        assert model_error(np.zeros(3), t) == 5.0

    def test_row_errors_overflow_silent(self):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("error")
            errs = row_errors(np.array([[1e300, 1e300], [0.0, 0.0]]), np.zeros(2))
        assert errs[0] == np.inf and errs[1] == 0.0


class TestExtractPath:
    def test_empty(self):
        run = SolverRun("x", np.zeros(0, dtype=int), np.zeros((0, 3)), np.zeros(0))
        assert extract_path(run, truth_of([1.0, 0, 0])) == []

    def test_single_truth_snapshot(self):
        w = np.array([1.0, 0, 2.0])
        run = SolverRun("x", np.array([5]), w[None], np.zeros(1), config={"a": 1})
        (row,) = extract_path(run, truth_of(w), seed=3)
        assert (row.f1, row.err2, row.sparsity, row.iteration, row.seed) == (
            1.0, 0.0, 2, 5.0, 3)
        assert row.hyperparams == {"a": 1}

    def test_exchange_of_variable(self):
        inst, truth = gen_example1(0)
        run = irksn(inst, IrksnConfig(k=3, alpha=1 / 30, max_iter=20000))
        on0 = np.abs(run.coefs[:, 0]) > 1e-8
        on1 = np.abs(run.coefs[:, 1]) > 1e-8
        # first iterate where w0 is active and w1 is not, later swapped
        found = False
        for t in np.flatnonzero(on0 & ~on1):
            later = np.flatnonzero(~on0[t:] & on1[t:])
            if later.size:
                found = True
                break
        assert found

    def test_record_order(self):
        row = MetricRow("irksn", {"b": 2, "a": 0.5}, 1, 10.0, 0.5, 0.4, 0.6, 1.2, 3)
        rec = row.as_record()
        assert tuple(rec) == CSV_COLUMNS
        assert rec["params"] == "a=0.5;b=2"
        assert format_params({}) == ""
