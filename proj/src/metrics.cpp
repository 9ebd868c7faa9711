#include "lrldl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lrldl {

namespace {

void check_sizes(VectorRef d, VectorRef p) {
    if (d.size() != p.size())
        throw DimensionMismatch("distribution sizes differ: " + std::to_string(d.size()) + " vs " +
                                std::to_string(p.size()));
}

}  // namespace

double chebyshev(VectorRef d, VectorRef p) {
    check_sizes(d, p);
    return (d - p).cwiseAbs().maxCoeff();
}

double clark(VectorRef d, VectorRef p) {
    check_sizes(d, p);
    double acc = 0.0;
    for (Index j = 0; j < d.size(); ++j) {
        const double denom = d(j) + p(j);
        if (denom == 0.0)
            continue;
        const double diff = d(j) - p(j);
        acc += diff * diff / (denom * denom);
    }
    return std::sqrt(acc);
}

double canberra(VectorRef d, VectorRef p) {
    check_sizes(d, p);
    double acc = 0.0;
    for (Index j = 0; j < d.size(); ++j) {
        const double denom = d(j) + p(j);
        if (denom == 0.0)
            continue;
        acc += std::abs(d(j) - p(j)) / denom;
    }
    return acc;
}

double kl(VectorRef d, VectorRef p) {
    check_sizes(d, p);
    Vector q = p;
    if (q.minCoeff() < kKlEpsilon) {
        q = q.cwiseMax(kKlEpsilon);
        q /= q.sum();
    }
    double acc = 0.0;
    for (Index j = 0; j < d.size(); ++j) {
        if (d(j) > 0.0)
            acc += d(j) * std::log(d(j) / q(j));
    }
    return acc;
}

double cosine(VectorRef d, VectorRef p) {
    check_sizes(d, p);
    const double denom = d.norm() * p.norm();
    if (denom == 0.0)
        return 0.0;
    return d.dot(p) / denom;
}

double intersection(VectorRef d, VectorRef p) {
    check_sizes(d, p);
    return d.cwiseMin(p).sum();
}

std::string_view metric_name(Metric metric) {
    switch (metric) {
    case Metric::Chebyshev: return "chebyshev";
    case Metric::Clark: return "clark";
    case Metric::Canberra: return "canberra";
    case Metric::KL: return "kl";
    case Metric::Cosine: return "cosine";
    case Metric::Intersection: return "intersection";
    }
    return "unknown";
}

bool lower_is_better(Metric metric) {
    return metric != Metric::Cosine && metric != Metric::Intersection;
}

double compute_metric(Metric metric, VectorRef d, VectorRef p) {
    switch (metric) {
    case Metric::Chebyshev: return chebyshev(d, p);
    case Metric::Clark: return clark(d, p);
    case Metric::Canberra: return canberra(d, p);
    case Metric::KL: return kl(d, p);
    case Metric::Cosine: return cosine(d, p);
    case Metric::Intersection: return intersection(d, p);
    }
    return 0.0;
}

MetricSummary summarize(const std::vector<double>& values) {
    MetricSummary out;
    if (values.empty())
        return out;
    double sum = 0.0;
    for (double v : values)
        sum += v;
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double sq = 0.0;
        for (double v : values)
            sq += (v - out.mean) * (v - out.mean);
        out.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
    }
    return out;
}

EvalReport evaluate(const Matrix& truth, const Matrix& predicted, bool keep_per_instance) {
    if (truth.rows() != predicted.rows() || truth.cols() != predicted.cols())
        throw DimensionMismatch("evaluate: truth is " + std::to_string(truth.rows()) + "x" +
                                std::to_string(truth.cols()) + " but prediction is " +
                                std::to_string(predicted.rows()) + "x" + std::to_string(predicted.cols()));
    const Index n = truth.cols();
    Matrix scores(n, static_cast<Index>(kAllMetrics.size()));
    for (Index i = 0; i < n; ++i)
        for (std::size_t k = 0; k < kAllMetrics.size(); ++k)
            scores(i, static_cast<Index>(k)) = compute_metric(kAllMetrics[k], truth.col(i), predicted.col(i));

    EvalReport report;
    report.n_evaluated = n;
    for (std::size_t k = 0; k < kAllMetrics.size(); ++k) {
        const auto column = scores.col(static_cast<Index>(k));
        report.scores[k] = summarize(std::vector<double>(column.begin(), column.end()));
    }
    if (keep_per_instance)
        report.per_instance = std::move(scores);
    return report;
}

EvalReport evaluate(const LabelDistributionMatrix& truth, const LabelDistributionMatrix& predicted,
                    bool keep_per_instance) {
    return evaluate(truth.data(), predicted.data(), keep_per_instance);
}

}  // namespace lrldl
