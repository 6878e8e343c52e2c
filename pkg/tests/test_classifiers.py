import numpy as np
import pytest

from reachknn import (
    ClassifierConfig,
    Dataset,
    NeighborSet,
    compute_class_centers,
    fit,
    knn_predict,
    majority_vote,
    ncp_predict,
    predict,
    select_neighbors,
    zknn_predict,
)
from conftest import gaussian_blobs, random_instance
from oracles import naive_predict


class TestConfig:
    def test_aliases(self):
        assert ClassifierConfig("z-knn").algorithm == "z_knn"
        assert ClassifierConfig("NCP-KNN").algorithm == "ncp"

    @pytest.mark.parametrize("kwargs", [{"k": 0}, {"k": 2.5}, {"mu": -1}, {"mu": float("inf")}, {"tie_rule": "coin"}])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            ClassifierConfig("knn", **kwargs)

    def test_k_larger_than_training_set(self):
        data = Dataset.from_arrays(np.zeros((3, 1)), [0, 1, 1])
        with pytest.raises(ValueError, match="exceeds"):
            knn_predict(data, [0.0], ClassifierConfig("knn", k=4))
        with pytest.raises(ValueError, match="exceeds"):
            zknn_predict(data, compute_class_centers(data), [0.0], ClassifierConfig("z_knn", k=4))


class TestSelectNeighbors:
    def test_sorted_exactly_k(self):
        ns = select_neighbors([5.0, 1.0, 3.0, 2.0], 3)
        assert ns.indices.tolist() == [1, 3, 2]
        assert ns.distances.tolist() == [1.0, 2.0, 3.0]

    def test_ties_at_cutoff_admit_lowest_index(self):
        ns = select_neighbors([2.0, 1.0, 2.0, 2.0, 0.5], 3)
        assert ns.indices.tolist() == [4, 1, 0]

    def test_all_rows(self):
        assert select_neighbors([1.0, 1.0], 2).indices.tolist() == [0, 1]

    def test_exhaustive_k_selection(self, rng):
        for _ in range(200):
            d = rng.integers(0, 5, size=30).astype(float)  # many ties
            k = int(rng.integers(1, 31))
            ns = select_neighbors(d, k)
            assert len(ns) == k and len(set(ns.indices.tolist())) == k
            assert np.all(np.diff(ns.distances) >= 0)
            outside = np.setdiff1d(np.arange(30), ns.indices)
            if outside.size:
                assert ns.distances.max() <= d[outside].min()
            ref = sorted(range(30), key=lambda i: (d[i], i))[:k]
            assert ns.indices.tolist() == ref


class TestMajorityVote:
    def _ns(self, idx):
        return NeighborSet(np.array(idx), np.arange(len(idx), dtype=float))

    def test_majority(self):
        assert majority_vote(self._ns([0, 1, 2]), np.array([0, 0, 1])) == 0

    def test_tie_goes_to_nearest_neighbor(self):
        # neighbors sorted by distance: row 1 (class 1) first
        assert majority_vote(self._ns([1, 0]), np.array([0, 1])) == 1
        assert majority_vote(self._ns([1, 0]), np.array([0, 1]), "lowest_class_index") == 0

    def test_nearest_tied_class_when_nearest_is_not_tied(self):
        labels = np.array([2, 0, 1, 0, 1])
        assert majority_vote(self._ns([0, 2, 1, 3, 4]), labels) == 1

    def test_single(self):
        assert majority_vote(self._ns([0]), np.array([3])) == 3

    def test_empty(self):
        with pytest.raises(ValueError):
            majority_vote(self._ns([]), np.array([0]))


class TestPointClassifiers:
    def test_knn_exact_match(self):
        data = Dataset.from_arrays([[0, 0], [5, 5], [9, 9]], ["a", "b", "c"])
        assert knn_predict(data, [5, 5], ClassifierConfig("knn", k=1)) == 1

    def test_knn_majority(self):
        data = Dataset.from_arrays([[0.0], [0.1], [0.2], [5.0]], ["A", "A", "B", "B"])
        assert knn_predict(data, [0.05], ClassifierConfig("knn", k=3)) == 0

    def test_ncp(self):
        data = Dataset.from_arrays([[0, 0], [10, 0]], ["first", "second"])
        cen = compute_class_centers(data)
        assert ncp_predict(cen, [10, 0]) == 1
        assert ncp_predict(cen, [1, 0]) == 0
        assert ncp_predict(cen, [5, 3]) == 0  # tie

    def test_wrong_algorithm(self):
        data = Dataset.from_arrays(np.zeros((2, 1)), [0, 1])
        with pytest.raises(ValueError):
            knn_predict(data, [0.0], ClassifierConfig("z_knn"))
        with pytest.raises(ValueError):
            zknn_predict(data, compute_class_centers(data), [0.0], ClassifierConfig("knn"))

    def test_knn_against_oracle(self, rng):
        X = np.vstack([rng.normal(0, 1, (25, 2)), rng.normal(2, 1, (25, 2))])
        data = Dataset.from_arrays(X, np.repeat([0, 1], 25))
        T = rng.normal(1, 1.5, (40, 2))
        cfg = ClassifierConfig("knn", k=5)
        got = [knn_predict(data, t, cfg) for t in T]
        assert got == naive_predict(X, data.labels, T, "knn", 5, 0.0)

    def test_zknn_against_oracle(self, rng):
        X = np.vstack([rng.normal(m, 1, (n, 2)) for m, n in ((0, 20), (2, 15), (4, 15))])
        data = Dataset.from_arrays(X, np.repeat([0, 1, 2], [20, 15, 15]))
        cen = compute_class_centers(data)
        T = rng.normal(2, 2, (40, 2))
        cfg = ClassifierConfig("z_knn", k=5, mu=1.0)
        got = [zknn_predict(data, cen, t, cfg) for t in T]
        assert got == naive_predict(X, data.labels, T, "z_knn", 5, 1.0)


class TestBatchEquivalence:
    @pytest.mark.parametrize("algorithm", ["knn", "ncp", "z0_knn", "z_knn"])
    @pytest.mark.parametrize("tie_rule", ["nearest_neighbor_class", "lowest_class_index"])
    def test_oracle_instances(self, rng, algorithm, tie_rule):
        for _ in range(25):
            data, T = random_instance(rng)
            k = int(rng.integers(1, min(7, data.n) + 1))
            mu = float(rng.choice([0, 0.5, 1, 5]))
            cfg = ClassifierConfig(algorithm, k=k, mu=mu, tie_rule=tie_rule)
            got = predict(data, T, cfg).tolist()
            assert got == naive_predict(data.features, data.labels, T, algorithm, k, mu, tie_rule)

    def test_duplicate_rows_tie_break(self):
        X = np.array([[1.0], [1.0], [1.0], [1.0]])
        data = Dataset.from_arrays(X, [1, 0, 0, 1])
        # rows 0 and 1 are admitted; one vote each, nearest (row 0) wins
        assert predict(data, [[1.0]], ClassifierConfig("knn", k=2)).tolist() == [1]

    def test_z_mu_zero_is_knn(self, rng):
        for _ in range(30):
            data, T = random_instance(rng)
            k = int(rng.integers(1, min(7, data.n) + 1))
            a = predict(data, T, ClassifierConfig("knn", k=k))
            b = predict(data, T, ClassifierConfig("z_knn", k=k, mu=0.0))
            assert a.tolist() == b.tolist()

    def test_z0_prediction_independent_of_query(self, rng):
        # the query contributes d(t, g) to every row equally
        data, T = random_instance(rng, c_max=3, m=30)
        out = predict(data, T, ClassifierConfig("z0_knn", k=3, mu=1.0))
        assert len(set(out.tolist())) == 1

    def test_large_mu_prefers_class_nearest_global_mean(self, rng):
        data = gaussian_blobs(rng, [25, 15], scale=4.0)
        cen = compute_class_centers(data)
        favoured = int(np.argmin(np.linalg.norm(cen.per_class - cen.global_center, axis=1)))
        T = rng.normal(0, 8, (40, 2))
        out = predict(data, T, ClassifierConfig("z_knn", k=5, mu=1e9))
        assert set(out.tolist()) == {favoured}

    def test_neighbor_set_from_model(self, rng):
        data, T = random_instance(rng, n_max=40)
        model = fit(data, ClassifierConfig("z_knn", k=min(4, data.n), mu=0.5))
        ns = model.neighbors(T[0])
        full = model.distances(T[:1])[0]
        assert len(ns) == min(4, data.n)
        assert np.all(np.diff(ns.distances) >= 0)
        outside = np.setdiff1d(np.arange(data.n), ns.indices)
        if outside.size:
            assert ns.distances.max() <= full[outside].min()

    def test_deterministic(self, rng):
        data, T = random_instance(rng)
        cfg = ClassifierConfig("z_knn", k=min(3, data.n), mu=1.0)
        assert predict(data, T, cfg).tobytes() == predict(data, T, cfg).tobytes()

    def test_dimension_check(self):
        data = Dataset.from_arrays(np.zeros((2, 2)), [0, 1])
        with pytest.raises(ValueError, match="mismatch"):
            predict(data, [[0.0, 0.0, 0.0]], ClassifierConfig("knn", k=1))
