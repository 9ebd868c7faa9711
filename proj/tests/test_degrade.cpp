#include "lrldl/degrade.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace lrldl;

namespace {

LabelDistributionMatrix column(std::initializer_list<double> values) {
    Matrix D(static_cast<Index>(values.size()), 1);
    Index j = 0;
    for (double v : values)
        D(j++, 0) = v;
    return LabelDistributionMatrix(D);
}

std::vector<int> as_ints(const MultiLabelMatrix& L, Index col = 0) {
    std::vector<int> out;
    for (Index j = 0; j < L.m(); ++j)
        out.push_back(static_cast<int>(L.data()(j, col)));
    return out;
}

// Labels sorted by degree, descending, ties by lowest index.
std::vector<Index> descending_order(const Vector& d) {
    std::vector<Index> order(static_cast<std::size_t>(d.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return d(a) > d(b); });
    return order;
}

}  // namespace

TEST_CASE("threshold degradation on the four-label example") {
    CHECK(as_ints(threshold_degrade(column({0.25, 0.4, 0.25, 0.1}), 0.5)) == std::vector<int>{1, 1, 0, 0});
}

TEST_CASE("one-hot column selects its single label for any threshold") {
    for (double T : {0.01, 0.3, 0.5, 0.99})
        CHECK(as_ints(threshold_degrade(column({1.0, 0.0, 0.0}), T)) == std::vector<int>{1, 0, 0});
}

TEST_CASE("uniform columns select the smallest count whose mass exceeds T") {
    for (Index m = 1; m <= 12; ++m) {
        const Matrix D = Matrix::Constant(m, 1, 1.0 / static_cast<double>(m));
        for (double T : {0.1, 0.25, 0.5, 0.75}) {
            // brute force over prefix sizes
            Index expected = m;
            for (Index j = 1; j <= m; ++j) {
                double mass = 0.0;
                for (Index t = 0; t < j; ++t)
                    mass += D(t, 0);
                if (mass > T) {
                    expected = j;
                    break;
                }
            }
            const auto L = threshold_degrade(LabelDistributionMatrix(D), T);
            CHECK(L.data().sum() == doctest::Approx(static_cast<double>(expected)));
        }
    }
    const Matrix uniform4 = Matrix::Constant(4, 1, 0.25);
    CHECK(threshold_degrade(LabelDistributionMatrix(uniform4), 0.5).data().sum() == 3.0);
}

TEST_CASE("top-k examples") {
    CHECK(as_ints(topk_degrade(column({0.25, 0.4, 0.25, 0.1}), 3)) == std::vector<int>{1, 1, 1, 0});
    CHECK(as_ints(topk_degrade(column({0.3, 0.3, 0.4}), 1)) == std::vector<int>{0, 0, 1});
    CHECK(as_ints(topk_degrade(column({0.2, 0.5, 0.3}), 3)) == std::vector<int>{1, 1, 1});
}

TEST_CASE("degradation parameters are validated") {
    const auto D = column({0.5, 0.5});
    CHECK_THROWS_AS(threshold_degrade(D, 0.0), InvalidArgument);
    CHECK_THROWS_AS(threshold_degrade(D, 1.0), InvalidArgument);
    CHECK_THROWS_AS(topk_degrade(D, 0), InvalidArgument);
    CHECK_THROWS_AS(topk_degrade(D, 3), InvalidArgument);
}

TEST_CASE("threshold degradation exceeds T and is minimal on random columns") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pickT(0.01, 0.99);
    for (int trial = 0; trial < 2000; ++trial) {
        const Index m = 2 + trial % 10;
        const Matrix D = oracle::random_distributions(rng, m, 1);
        const double T = pickT(rng);
        const Matrix L = threshold_degrade(LabelDistributionMatrix(D), T).data();

        const auto order = descending_order(D.col(0));
        const Index count = static_cast<Index>(L.sum());
        double mass = 0.0;
        for (Index t = 0; t < count; ++t) {
            CHECK(L(order[static_cast<std::size_t>(t)], 0) == 1.0);
            mass += D(order[static_cast<std::size_t>(t)], 0);
        }
        CHECK(mass > T);
        CHECK(mass - D(order[static_cast<std::size_t>(count - 1)], 0) <= T);
    }
}

TEST_CASE("top-k selects exactly k labels dominating the rest") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 2000; ++trial) {
        const Index m = 2 + trial % 10;
        const int k = 1 + trial % static_cast<int>(m);
        const Matrix D = oracle::random_distributions(rng, m, 3);
        const Matrix L = topk_degrade(LabelDistributionMatrix(D), k).data();
        for (Index i = 0; i < D.cols(); ++i) {
            CHECK(L.col(i).sum() == static_cast<double>(k));
            double lowest_in = 1.0, highest_out = 0.0;
            for (Index j = 0; j < m; ++j) {
                if (L(j, i) == 1.0)
                    lowest_in = std::min(lowest_in, D(j, i));
                else
                    highest_out = std::max(highest_out, D(j, i));
            }
            CHECK(lowest_in >= highest_out);
        }
    }
}

TEST_CASE("degradation commutes with label permutations when degrees are distinct") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 300; ++trial) {
        const Index m = 3 + trial % 6;
        const Matrix D = oracle::random_distributions(rng, m, 1);
        std::vector<Index> perm(static_cast<std::size_t>(m));
        std::iota(perm.begin(), perm.end(), Index{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        Matrix Dp(m, 1);
        for (Index j = 0; j < m; ++j)
            Dp(j, 0) = D(perm[static_cast<std::size_t>(j)], 0);

        const Matrix L = threshold_degrade(LabelDistributionMatrix(D), 0.4).data();
        const Matrix Lp = threshold_degrade(LabelDistributionMatrix(Dp), 0.4).data();
        const Matrix K = topk_degrade(LabelDistributionMatrix(D), 2).data();
        const Matrix Kp = topk_degrade(LabelDistributionMatrix(Dp), 2).data();
        for (Index j = 0; j < m; ++j) {
            CHECK(Lp(j, 0) == L(perm[static_cast<std::size_t>(j)], 0));
            CHECK(Kp(j, 0) == K(perm[static_cast<std::size_t>(j)], 0));
        }
    }
}

TEST_CASE("degradation is deterministic and dispatches on the method") {
    std::mt19937_64 rng(14);
    const LabelDistributionMatrix D(oracle::random_distributions(rng, 5, 40));
    CHECK(threshold_degrade(D, 0.3).data() == threshold_degrade(D, 0.3).data());
    CHECK(degrade(D, ThresholdDegradation{0.3}).data() == threshold_degrade(D, 0.3).data());
    CHECK(degrade(D, TopKDegradation{2}).data() == topk_degrade(D, 2).data());
}
