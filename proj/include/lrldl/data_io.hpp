#pragma once

#include "lrldl/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lrldl {

struct Dataset {
    std::string name;
    FeatureMatrix X;
    LabelDistributionMatrix D;
    std::vector<std::string> label_names;

    Dataset(std::string name, FeatureMatrix X, LabelDistributionMatrix D,
            std::vector<std::string> label_names = {});

    Index n() const noexcept { return X.n(); }
    Index d() const noexcept { return X.d(); }
    Index m() const noexcept { return D.m(); }

    /// Instances at `indices`, in that order.
    Dataset select(const std::vector<Index>& indices) const;
};

enum class DataFormat { MatrixText, Csv };

/// Csv for a ".csv" extension, MatrixText otherwise.
DataFormat format_from_path(const std::filesystem::path& path);

/// Returns `path` if it exists, else `$LDL_DATA_DIR/path` if that exists, else `path`.
std::filesystem::path resolve_data_path(const std::filesystem::path& path);

/// MatrixText: header "n d m", n rows of d features, n rows of m degrees.
/// Csv: header row, columns f1..fd then one column per label, one row per instance.
/// Column names starting with 'f' are features; the remaining columns are labels.
Dataset load_dataset(const std::filesystem::path& path, DataFormat format);
Dataset load_dataset(const std::filesystem::path& path);

/// Writes every value with 17 significant digits.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path, DataFormat format);

/// 17-significant-digit decimal rendering that parses back to the same double.
std::string format_exact(double value);

/// Synthetic set with grouped label structure: W* = A B where A (m x r) puts
/// label j in group j mod r with a U(0.5, 1.5) loading and B (r x d) is
/// Gaussian scaled so logits have standard deviation about `logit_scale`.
/// D = column softmax(W* X^T + noise N). Deterministic in `seed`.
Dataset synth_lowrank(Index n, Index d, Index m, Index r, double noise, std::uint64_t seed,
                      double logit_scale = 6.0);

struct FoldPlan {
    int k = 10;
    std::uint64_t seed = 0;
    std::vector<int> assignments;

    std::vector<Index> train_indices(int fold) const;
    std::vector<Index> test_indices(int fold) const;
    std::vector<Index> fold_sizes() const;
};

/// Uniformly shuffled assignment of n instances to k folds; fold sizes differ
/// by at most one, the first n mod k folds being the larger ones.
FoldPlan kfold(Index n, int k, std::uint64_t seed);

/// Per-feature mean and 1/std (population) of the rows of X.
Standardizer fit_standardizer(const Matrix& X);

struct StandardizedSplit {
    Matrix train;
    Matrix test;
    Standardizer standardizer;
};

/// Z-scores with statistics from `train` only.
StandardizedSplit standardize(const Matrix& train, const Matrix& test);

}  // namespace lrldl
