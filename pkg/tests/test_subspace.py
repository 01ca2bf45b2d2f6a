import itertools

import numpy as np
import pytest

from liteembed.core import EmbeddingSet
from liteembed.errors import (
    DegenerateSet,
    InsufficientLabels,
    InvalidSplit,
    TooFewPoints,
)
from liteembed.subspace import (
    PcRatioReport,
    fit_pca,
    pc_ratio_report,
    project,
    split,
    suggest_k,
)


def ratio_oracle(coords, labels):
    """Brute-force pair enumeration of cross/within mean 1-D distances."""
    cross, within = [], []
    for (i, li), (j, lj) in itertools.combinations(enumerate(labels), 2):
        d = abs(coords[i] - coords[j])
        (within if li == lj else cross).append(d)
    w = sum(within) / len(within)
    c = sum(cross) / len(cross)
    return float("inf") if w == 0 else c / w


def random_set(seed, n, d):
    rng = np.random.default_rng(seed)
    return EmbeddingSet.from_matrix([f"p{i}" for i in range(n)], rng.normal(size=(n, d)))


class TestFitPca:
    def test_two_points(self):
        s = EmbeddingSet.from_matrix(["a", "b"], [[1.0, 0.0], [-1.0, 0.0]])
        basis = fit_pca(s, center=True)
        assert basis.rank == 1
        assert np.allclose(basis.components[0], [1.0, 0.0])
        assert basis.eigenvalues[0] == pytest.approx(2.0)

    def test_simplex_equal_eigenvalues(self):
        s = EmbeddingSet.from_matrix(["a", "b", "c"], np.eye(3))
        basis = fit_pca(s, center=True)
        # oracle: explicit 3x3 covariance eigendecomposition
        x = np.eye(3) - np.eye(3).mean(axis=0)
        evals = np.linalg.eigvalsh(x.T @ x / 2)[::-1]
        assert basis.rank == 2
        assert np.allclose(basis.eigenvalues, evals[:2])
        assert basis.eigenvalues[0] == pytest.approx(0.5)
        assert basis.eigenvalues[1] == pytest.approx(0.5)

    def test_projected_variance_equals_eigenvalues(self):
        s = random_set(0, 12, 6)
        basis = fit_pca(s, center=True)
        coords = (s.matrix() - basis.center) @ basis.components.T
        variances = coords.var(axis=0, ddof=1)
        assert np.max(np.abs(variances - basis.eigenvalues)) <= 1e-6

    def test_too_few_points(self):
        with pytest.raises(TooFewPoints):
            fit_pca(EmbeddingSet.from_matrix(["a"], [[1.0, 2.0]]))

    def test_degenerate_set(self):
        s = EmbeddingSet.from_matrix(["a", "b"], [[1.0, 2.0], [1.0, 2.0]])
        with pytest.raises(DegenerateSet):
            fit_pca(s)

    def test_orthonormal_components(self):
        basis = fit_pca(random_set(1, 20, 8), center=True)
        gram = basis.components @ basis.components.T
        assert np.max(np.abs(gram - np.eye(basis.rank))) <= 1e-6

    def test_eigenvalues_nonincreasing_nonnegative(self):
        basis = fit_pca(random_set(2, 15, 10), center=True)
        assert np.all(np.diff(basis.eigenvalues) <= 1e-12)
        assert np.all(basis.eigenvalues >= 0)

    def test_trace_identity(self):
        s = random_set(3, 9, 5)
        basis = fit_pca(s, center=True)
        total_var = np.sum((s.matrix() - basis.center) ** 2) / (len(s) - 1)
        assert abs(basis.eigenvalues.sum() - total_var) <= 1e-5

    def test_full_rank_reconstruction(self):
        s = random_set(4, 6, 10)  # n < d: rank n-1 retained
        basis = fit_pca(s, center=True)
        assert basis.rank == 5
        for e in s:
            coords = basis.components @ (e.vector - basis.center)
            recon = basis.center + basis.components.T @ coords
            assert np.max(np.abs(recon - e.vector)) <= 1e-5

    def test_gram_and_cov_routes_agree(self):
        s = random_set(5, 7, 12)
        eg = fit_pca(s, center=True, method="gram").eigenvalues
        ec = fit_pca(s, center=True, method="cov").eigenvalues
        n = min(len(eg), len(ec))
        assert np.max(np.abs(eg[:n] - ec[:n])) <= 1e-6

    def test_deterministic_sign_convention(self):
        s = random_set(6, 10, 7)
        b1 = fit_pca(s, center=True)
        b2 = fit_pca(s, center=True)
        assert np.array_equal(b1.components, b2.components)
        assert np.array_equal(b1.eigenvalues, b2.eigenvalues)
        for u in b1.components:
            assert u[int(np.argmax(np.abs(u)))] > 0

    def test_uncentered_mode(self):
        s = EmbeddingSet.from_matrix(["a", "b"], [[2.0, 0.0], [1.0, 0.0]])
        basis = fit_pca(s, center=False)
        assert np.array_equal(basis.center, np.zeros(2))
        assert basis.rank >= 1


class TestSplit:
    def test_drop_pc1_shape(self):
        basis = fit_pca(random_set(7, 6, 8), center=True)
        assert basis.rank == 5
        coarse, fine = split(basis, 1)
        assert coarse.shape[0] == 1 and fine.shape[0] == 4

    def test_two_component_split(self):
        s = EmbeddingSet.from_matrix(["a", "b", "c"], [[2.0, 0.0], [0.0, 1.0], [-2.0, -1.0]])
        basis = fit_pca(s, center=True)
        coarse, fine = split(basis, 1)
        assert np.max(np.abs(coarse @ fine.T)) <= 1e-6

    def test_invalid_split(self):
        basis = fit_pca(random_set(8, 6, 8), center=True)
        with pytest.raises(InvalidSplit):
            split(basis, basis.rank)
        with pytest.raises(InvalidSplit):
            split(basis, 0)

    def test_parts_disjoint_exhaustive(self):
        basis = fit_pca(random_set(9, 8, 6), center=True)
        coarse, fine = split(basis, 2)
        stacked = np.vstack([coarse, fine])
        assert np.array_equal(stacked, basis.components)
        assert np.max(np.abs(coarse @ fine.T)) <= 1e-6


class TestProject:
    def test_component_onto_itself(self):
        basis = fit_pca(random_set(10, 6, 5), center=True)
        u1 = basis.components[:1]
        out = project(u1, basis.components[0], np.zeros(5))
        assert out == pytest.approx([1.0])

    def test_orthogonal_vector_zero_coords(self):
        s = EmbeddingSet.from_matrix(["a", "b", "c"],
                                     [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.5, 0.0, 0.0]])
        basis = fit_pca(s, center=True)
        out = project(basis.components, [0.0, 3.0, -2.0], np.zeros(3))
        assert np.max(np.abs(out)) <= 1e-7

    def test_bessel_inequality(self):
        s = random_set(11, 6, 9)
        basis = fit_pca(s, center=True)
        rng = np.random.default_rng(12)
        for _ in range(10):
            z = rng.normal(size=9)
            coords = project(basis.components, z, basis.center)
            assert np.sum(coords ** 2) <= np.sum((z - basis.center) ** 2) + 1e-6


class TestPcRatioReport:
    def test_hand_example_two_categories(self):
        # categories {-1, -1.1} and {+1, +1.1} on one axis
        s = EmbeddingSet.from_matrix(["a", "b", "c", "d"],
                                     [[-1.0], [-1.1], [1.0], [1.1]])
        labels = ["lo", "lo", "hi", "hi"]
        basis = fit_pca(s, center=True)
        report = pc_ratio_report(s, labels, basis)
        coords = ((s.matrix() - basis.center) @ basis.components.T)[:, 0]
        assert report.ratios[0] == pytest.approx(ratio_oracle(coords, labels))
        assert report.ratios[0] == pytest.approx(21.0)

    def test_identical_within_category_gives_inf(self):
        s = EmbeddingSet.from_matrix(["a", "b", "c", "d"],
                                     [[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [1.0, 1.0]])
        basis = fit_pca(s, center=True)
        report = pc_ratio_report(s, ["x", "x", "y", "y"], basis)
        assert report.ratios[0] == float("inf")

    def test_random_matches_oracle_all_components(self):
        rng = np.random.default_rng(13)
        s = EmbeddingSet.from_matrix([f"p{i}" for i in range(8)], rng.normal(size=(8, 4)))
        labels = ["a", "a", "a", "b", "b", "c", "c", "c"]
        basis = fit_pca(s, center=True)
        report = pc_ratio_report(s, labels, basis)
        coords = (s.matrix() - basis.center) @ basis.components.T
        for c in range(basis.rank):
            assert report.ratios[c] == pytest.approx(ratio_oracle(coords[:, c], labels))

    def test_insufficient_labels(self):
        s = random_set(14, 4, 3)
        basis = fit_pca(s, center=True)
        with pytest.raises(InsufficientLabels):
            pc_ratio_report(s, ["a", "a", "a", "b"], basis)


class TestSuggestK:
    @pytest.mark.parametrize("ratios,expected", [
        ((5.02, 1.62, 1.6, 1.6), 1),
        ((10.0, 9.0, 1.0, 1.0), 2),
        ((1.0, 1.0, 1.0), 1),
    ])
    def test_threshold_rule(self, ratios, expected):
        report = PcRatioReport(ratios, ("a", "b"))
        assert suggest_k(report, threshold=3.0) == expected

    def test_capped_below_rank(self):
        report = PcRatioReport((9.0, 8.0, 7.0), ("a", "b"))
        assert suggest_k(report, threshold=3.0) == 2
