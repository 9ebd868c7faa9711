#include "lrldl/degrade.hpp"

#include <algorithm>
#include <numeric>

namespace lrldl {

namespace {

// Label indices of one column sorted by descending degree, stable on ties.
std::vector<Index> descending_order(const Eigen::Ref<const Vector>& column) {
    std::vector<Index> order(static_cast<std::size_t>(column.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return column(a) > column(b); });
    return order;
}

}  // namespace

MultiLabelMatrix threshold_degrade(const LabelDistributionMatrix& D, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw InvalidArgument("threshold T must satisfy 0 < T < 1");
    const Matrix& dist = D.data();
    Matrix labels = Matrix::Zero(dist.rows(), dist.cols());
    for (Index i = 0; i < dist.cols(); ++i) {
        double running = 0.0;
        for (Index j : descending_order(dist.col(i))) {
            labels(j, i) = 1.0;
            running += dist(j, i);
            if (running > threshold)
                break;
        }
    }
    return MultiLabelMatrix(std::move(labels));
}

MultiLabelMatrix topk_degrade(const LabelDistributionMatrix& D, int k) {
    if (k < 1 || k > D.m())
        throw InvalidArgument("top-k K must satisfy 1 <= K <= m (m = " + std::to_string(D.m()) + ")");
    const Matrix& dist = D.data();
    Matrix labels = Matrix::Zero(dist.rows(), dist.cols());
    for (Index i = 0; i < dist.cols(); ++i) {
        const auto order = descending_order(dist.col(i));
        for (int r = 0; r < k; ++r)
            labels(order[static_cast<std::size_t>(r)], i) = 1.0;
    }
    return MultiLabelMatrix(std::move(labels));
}

MultiLabelMatrix degrade(const LabelDistributionMatrix& D, const Degradation& method) {
    if (const auto* t = std::get_if<ThresholdDegradation>(&method))
        return threshold_degrade(D, t->threshold);
    return topk_degrade(D, std::get<TopKDegradation>(method).k);
}

}  // namespace lrldl
