#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace lrldl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

class SvdFailure : public Error {
public:
    using Error::Error;
};

/// A label distribution column that is not a point of the probability simplex.
/// `column()` and `sum()` describe the first offending column; the message
/// lists every offending column.
class ColumnNotSimplex : public Error {
public:
    ColumnNotSimplex(Index column, double sum, const std::string& what)
        : Error(what), column_{column}, sum_{sum} {}

    Index column() const noexcept { return column_; }
    double sum() const noexcept { return sum_; }

private:
    Index column_;
    double sum_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line_{line} {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// ---------------------------------------------------------------------------
// Validated matrices
// ---------------------------------------------------------------------------

/// n x d feature matrix, one instance per row.
class FeatureMatrix {
public:
    explicit FeatureMatrix(Matrix data);

    const Matrix& data() const noexcept { return data_; }
    Index n() const noexcept { return data_.rows(); }
    Index d() const noexcept { return data_.cols(); }

private:
    Matrix data_;
};

/// Column sums must be within this of 1 to be accepted unchanged.
inline constexpr double kSimplexTolerance = 1e-9;
/// Columns within this band (but outside kSimplexTolerance) are renormalized.
inline constexpr double kRenormalizeBand = 1e-6;

/// m x n matrix whose columns are label distributions.
class LabelDistributionMatrix {
public:
    /// Validates `data`. Columns off the simplex by at most kRenormalizeBand are
    /// renormalized and reported through renormalized_columns().
    explicit LabelDistributionMatrix(Matrix data);

    const Matrix& data() const noexcept { return data_; }
    Index m() const noexcept { return data_.rows(); }
    Index n() const noexcept { return data_.cols(); }
    const std::vector<Index>& renormalized_columns() const noexcept { return renormalized_; }

private:
    Matrix data_;
    std::vector<Index> renormalized_;
};

LabelDistributionMatrix validate_distribution_matrix(const Matrix& D);

/// m x n binary relevance matrix; every instance has at least one relevant label.
class MultiLabelMatrix {
public:
    explicit MultiLabelMatrix(Matrix data);

    const Matrix& data() const noexcept { return data_; }
    Index m() const noexcept { return data_.rows(); }
    Index n() const noexcept { return data_.cols(); }

private:
    Matrix data_;
};

// ---------------------------------------------------------------------------
// Hyperparameters and model
// ---------------------------------------------------------------------------

struct ThresholdDegradation {
    double threshold = 0.5;
};

struct TopKDegradation {
    int k = 1;
};

using Degradation = std::variant<ThresholdDegradation, TopKDegradation>;

/// Parses "threshold:T" or "topk:K".
Degradation parse_degradation(const std::string& text);
std::string to_string(const Degradation& degradation);

enum class Variant { Full, AblationA, AblationB };

Variant parse_variant(const std::string& text);
std::string to_string(Variant variant);

struct Hyperparams {
    double alpha = 0.1;
    double lambda = 0.1;
    Degradation degradation = ThresholdDegradation{0.5};
    double mu0 = 0.1;
    double mu_max = 1e6;
    double mu_growth = 1.1;
    int max_iters = 200;
    double tol = 1e-5;
    bool standardize = true;
    bool bias = true;

    /// Throws InvalidArgument naming the violated constraint. `labels` bounds k
    /// for top-k degradation; pass 0 to skip that check.
    void validate(Index labels = 0) const;
};

/// Per-feature z-score parameters: x' = (x - mean) * scale with scale = 1/std.
/// A zero scale marks a constant feature, which maps to 0.
struct Standardizer {
    Vector mean;
    Vector scale;

    Index dim() const noexcept { return mean.size(); }
    Matrix apply(const Matrix& X) const;
    Vector apply(const Vector& x) const;

    static Standardizer identity(Index d);
};

struct TlrldlModel {
    Matrix W;
    /// Training-time transformation; empty for ablation variants and for
    /// models read back from disk.
    Matrix O;
    Variant variant = Variant::Full;
    Standardizer standardizer;
    bool bias = true;
    Hyperparams hyperparams;

    /// Feature dimension expected by predict (before bias augmentation).
    Index input_dim() const noexcept { return standardizer.dim(); }
};

struct SolverState {
    Matrix G;
    Matrix Gamma1;
    double mu = 0.1;
    int iter = 0;
    double primal_residual = 0.0;
};

}  // namespace lrldl
