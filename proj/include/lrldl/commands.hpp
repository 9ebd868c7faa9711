#pragma once

#include "lrldl/data_io.hpp"
#include "lrldl/metrics.hpp"
#include "lrldl/report.hpp"
#include "lrldl/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lrldl {

/// Candidate set for alpha and lambda in grid search and sensitivity sweeps.
inline const std::vector<double> kDefaultGrid{0.005, 0.01, 0.05, 0.1, 0.5, 1.0, 10.0};

/// Candidate thresholds T for threshold degradation.
inline const std::vector<double> kDefaultThresholdGrid{0.1, 0.2, 0.3, 0.4, 0.5};

/// Loads a dataset file (path, or relative to $LDL_DATA_DIR) or generates one
/// from "synth:n=200,d=20,m=6,r=2,noise=0.1,seed=1[,scale=6]".
Dataset load_dataset_spec(const std::string& spec);

/// Parses a comma-separated list of reals.
std::vector<double> parse_value_list(const std::string& text);

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

struct GridSpec {
    std::vector<double> alphas;
    std::vector<double> lambdas;
    /// Only searched for the Full variant with threshold degradation.
    std::vector<double> thresholds;
    int inner_folds = 5;

    bool enabled() const noexcept { return !alphas.empty() || !lambdas.empty() || !thresholds.empty(); }
};

struct FoldOutcome {
    EvalReport report;
    bool converged = true;
    int iterations = 0;
    Hyperparams hp;
};

struct CvSummary {
    Variant variant = Variant::Full;
    std::vector<FoldOutcome> folds;
    /// Mean and sample std over folds of the per-fold mean scores.
    std::array<MetricSummary, 6> metrics{};
    int converged_folds = 0;

    const MetricSummary& operator[](Metric metric) const { return metrics[static_cast<std::size_t>(metric)]; }
};

/// k-fold evaluation of one variant. With an enabled grid, alpha, lambda and T are
/// chosen per outer fold by an inner CV on the training split (lowest mean KL;
/// ties go to the earlier grid cell). Fold and grid evaluations run on up to
/// `threads` threads; results do not depend on the thread count.
CvSummary cross_validate(const Dataset& data, Variant variant, const Hyperparams& hp, int folds,
                         std::uint64_t seed, const GridSpec& grid = {}, unsigned threads = 1);

ResultRow to_row(const std::string& dataset, const CvSummary& summary);

// ---------------------------------------------------------------------------
// Commands. Each writes its report to `out` and notes to `err`, and throws
// lrldl::Error on failure.
// ---------------------------------------------------------------------------

struct TrainOptions {
    std::string data;
    Hyperparams hp;
    Variant variant = Variant::Full;
    std::filesystem::path model_out;
    OutputFormat format = OutputFormat::Markdown;
};

FitResult cmd_train(const TrainOptions& options, std::ostream& out, std::ostream& err);

struct PredictOptions {
    std::filesystem::path model;
    std::string data;
    /// Empty writes to `out`.
    std::filesystem::path predictions_out;
};

/// Writes "n m" then one row of m degrees per instance.
Matrix cmd_predict(const PredictOptions& options, std::ostream& out, std::ostream& err);

struct EvaluateOptions {
    std::string data;
    std::filesystem::path model;
    std::filesystem::path predictions;
    OutputFormat format = OutputFormat::Markdown;
};

/// Scores either a model's predictions or a predictions file against `data`.
EvalReport cmd_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err);

struct CvOptions {
    std::string data;
    Hyperparams hp;
    std::vector<Variant> variants{Variant::Full};
    int folds = 10;
    std::uint64_t seed = 42;
    GridSpec grid;
    OutputFormat format = OutputFormat::Markdown;
    unsigned threads = 1;
};

std::vector<CvSummary> cmd_cv(const CvOptions& options, std::ostream& out, std::ostream& err);

/// cmd_cv over Full, AblationA and AblationB with fixed hyperparameters.
std::vector<CvSummary> cmd_ablate(CvOptions options, std::ostream& out, std::ostream& err);

struct DegradeOptions {
    std::string data;
    Degradation method = ThresholdDegradation{0.5};
    /// Multi-label file ("n m" then one 0/1 row per instance); empty skips it.
    std::filesystem::path labels_out;
};

/// Prints per-instance positive counts.
MultiLabelMatrix cmd_degrade(const DegradeOptions& options, std::ostream& out, std::ostream& err);

struct SweepOptions {
    std::string data;
    Hyperparams hp;
    Variant variant = Variant::Full;
    /// "alpha" or "lambda".
    std::string param = "alpha";
    std::vector<double> values = kDefaultGrid;
    int folds = 10;
    std::uint64_t seed = 42;
    OutputFormat format = OutputFormat::Markdown;
    unsigned threads = 1;
};

/// One CV row per candidate value.
std::vector<CvSummary> cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err);

struct SynthOptions {
    Index n = 200;
    Index d = 20;
    Index m = 6;
    Index r = 2;
    double noise = 0.1;
    std::uint64_t seed = 42;
    double logit_scale = 6.0;
    std::filesystem::path out_path;
};

Dataset cmd_synth(const SynthOptions& options, std::ostream& out, std::ostream& err);

/// Multi-label and prediction files ("n m" header, one instance per row).
void save_instance_matrix(const Matrix& by_column, const std::filesystem::path& path, bool integral);
Matrix load_instance_matrix(const std::filesystem::path& path);

}  // namespace lrldl
