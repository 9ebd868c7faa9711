#pragma once

#include "lrldl/types.hpp"

#include <array>
#include <optional>
#include <string_view>

namespace lrldl {

using VectorRef = Eigen::Ref<const Vector>;

/// Lower bound applied to predicted degrees before the KL logarithm.
inline constexpr double kKlEpsilon = 1e-12;

double chebyshev(VectorRef d, VectorRef p);
/// sqrt(sum (d-p)^2 / (d+p)^2); 0/0 terms count as 0.
double clark(VectorRef d, VectorRef p);
/// sum |d-p| / (d+p); 0/0 terms count as 0.
double canberra(VectorRef d, VectorRef p);
/// sum d log(d / p'), p' = p clamped below at kKlEpsilon and renormalized.
double kl(VectorRef d, VectorRef p);
double cosine(VectorRef d, VectorRef p);
double intersection(VectorRef d, VectorRef p);

enum class Metric { Chebyshev, Clark, Canberra, KL, Cosine, Intersection };

inline constexpr std::array<Metric, 6> kAllMetrics{Metric::Chebyshev, Metric::Clark, Metric::Canberra,
                                                    Metric::KL,        Metric::Cosine, Metric::Intersection};

std::string_view metric_name(Metric metric);
/// True for the distances (lower is better).
bool lower_is_better(Metric metric);
double compute_metric(Metric metric, VectorRef d, VectorRef p);

struct MetricSummary {
    double mean = 0.0;
    /// Sample standard deviation (0 for a single value).
    double std = 0.0;
};

struct EvalReport {
    std::array<MetricSummary, 6> scores{};
    Index n_evaluated = 0;
    /// n x 6 per-instance scores in kAllMetrics order.
    std::optional<Matrix> per_instance;

    const MetricSummary& operator[](Metric metric) const { return scores[static_cast<std::size_t>(metric)]; }
    MetricSummary& operator[](Metric metric) { return scores[static_cast<std::size_t>(metric)]; }
};

/// Scores each column of `predicted` against the same column of `truth` and
/// averages over instances.
EvalReport evaluate(const Matrix& truth, const Matrix& predicted, bool keep_per_instance = false);

EvalReport evaluate(const LabelDistributionMatrix& truth, const LabelDistributionMatrix& predicted,
                    bool keep_per_instance = false);

/// Mean and sample standard deviation of a range of values.
MetricSummary summarize(const std::vector<double>& values);

}  // namespace lrldl
