#include "lrldl/types.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace lrldl {

FeatureMatrix::FeatureMatrix(Matrix data) : data_{std::move(data)} {
    if (data_.rows() < 1 || data_.cols() < 1)
        throw InvalidArgument("feature matrix must have n >= 1 and d >= 1");
    if (!data_.allFinite())
        throw InvalidArgument("feature matrix has non-finite entries");
}

LabelDistributionMatrix::LabelDistributionMatrix(Matrix data) : data_{std::move(data)} {
    if (data_.rows() < 1 || data_.cols() < 1)
        throw InvalidArgument("label distribution matrix must be non-empty");
    if (!data_.allFinite())
        throw InvalidArgument("label distribution matrix has non-finite entries");

    std::vector<std::pair<Index, double>> bad;
    for (Index i = 0; i < data_.cols(); ++i) {
        auto col = data_.col(i);
        const double sum = col.sum();
        const double lo = col.minCoeff();
        const double hi = col.maxCoeff();
        const bool in_unit = lo >= 0.0 && hi <= 1.0;
        if (in_unit && std::abs(sum - 1.0) <= kSimplexTolerance)
            continue;
        const bool near_unit = lo >= -kRenormalizeBand && hi <= 1.0 + kRenormalizeBand;
        if (near_unit && std::abs(sum - 1.0) <= kRenormalizeBand) {
            col = col.cwiseMax(0.0);
            col /= col.sum();
            renormalized_.push_back(i);
            continue;
        }
        bad.emplace_back(i, sum);
    }
    if (!bad.empty()) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "columns not on the probability simplex:";
        for (std::size_t k = 0; k < bad.size() && k < 20; ++k)
            msg << " " << bad[k].first << " (sum " << bad[k].second << ")";
        if (bad.size() > 20)
            msg << " ... " << bad.size() - 20 << " more";
        throw ColumnNotSimplex(bad.front().first, bad.front().second, msg.str());
    }
}

LabelDistributionMatrix validate_distribution_matrix(const Matrix& D) {
    return LabelDistributionMatrix(D);
}

MultiLabelMatrix::MultiLabelMatrix(Matrix data) : data_{std::move(data)} {
    for (Index i = 0; i < data_.cols(); ++i) {
        bool any = false;
        for (Index j = 0; j < data_.rows(); ++j) {
            const double v = data_(j, i);
            if (v != 0.0 && v != 1.0)
                throw InvalidArgument("multi-label matrix entries must be 0 or 1");
            any = any || v == 1.0;
        }
        if (!any)
            throw InvalidArgument("multi-label column " + std::to_string(i) + " has no relevant label");
    }
}

namespace {

template <typename T>
T parse_number(const std::string& text, const char* what) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw InvalidArgument(std::string("cannot parse ") + what + " from '" + text + "'");
    return value;
}

}  // namespace

Degradation parse_degradation(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw InvalidArgument("degradation must be threshold:T or topk:K, got '" + text + "'");
    const std::string kind = text.substr(0, colon);
    const std::string value = text.substr(colon + 1);
    if (kind == "threshold")
        return ThresholdDegradation{parse_number<double>(value, "threshold T")};
    if (kind == "topk")
        return TopKDegradation{parse_number<int>(value, "top-k K")};
    throw InvalidArgument("unknown degradation '" + kind + "' (expected threshold or topk)");
}

std::string to_string(const Degradation& degradation) {
    if (const auto* t = std::get_if<ThresholdDegradation>(&degradation)) {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, t->threshold);
        (void)ec;
        return "threshold:" + std::string(buf, ptr);
    }
    return "topk:" + std::to_string(std::get<TopKDegradation>(degradation).k);
}

Variant parse_variant(const std::string& text) {
    if (text == "full")
        return Variant::Full;
    if (text == "ablation-a")
        return Variant::AblationA;
    if (text == "ablation-b")
        return Variant::AblationB;
    throw InvalidArgument("unknown variant '" + text + "' (expected full, ablation-a or ablation-b)");
}

std::string to_string(Variant variant) {
    switch (variant) {
    case Variant::Full: return "full";
    case Variant::AblationA: return "ablation-a";
    case Variant::AblationB: return "ablation-b";
    }
    return "full";
}

void Hyperparams::validate(Index labels) const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw InvalidArgument("alpha must be >= 0");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw InvalidArgument("lambda must be >= 0");
    if (const auto* t = std::get_if<ThresholdDegradation>(&degradation)) {
        if (!(t->threshold > 0.0 && t->threshold < 1.0))
            throw InvalidArgument("threshold T must satisfy 0 < T < 1");
    } else {
        const int k = std::get<TopKDegradation>(degradation).k;
        if (k < 1)
            throw InvalidArgument("top-k K must satisfy 1 <= K <= m");
        if (labels > 0 && k > labels)
            throw InvalidArgument("top-k K must satisfy 1 <= K <= m (m = " + std::to_string(labels) + ")");
    }
    if (!(mu0 > 0.0) || !(mu0 <= mu_max) || !std::isfinite(mu_max))
        throw InvalidArgument("penalty must satisfy 0 < mu0 <= mu_max");
    if (!(mu_growth > 1.0))
        throw InvalidArgument("mu_growth must be > 1");
    if (max_iters < 1)
        throw InvalidArgument("max_iters must be >= 1");
    if (!(tol > 0.0))
        throw InvalidArgument("tol must be > 0");
}

Matrix Standardizer::apply(const Matrix& X) const {
    if (X.cols() != dim())
        throw DimensionMismatch("standardizer expects " + std::to_string(dim()) + " features, got " +
                                std::to_string(X.cols()));
    return (X.rowwise() - mean.transpose()).array().rowwise() * scale.transpose().array();
}

Vector Standardizer::apply(const Vector& x) const {
    if (x.size() != dim())
        throw DimensionMismatch("standardizer expects " + std::to_string(dim()) + " features, got " +
                                std::to_string(x.size()));
    return (x - mean).cwiseProduct(scale);
}

Standardizer Standardizer::identity(Index d) {
    return Standardizer{Vector::Zero(d), Vector::Ones(d)};
}

}  // namespace lrldl
