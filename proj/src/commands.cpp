#include "lrldl/commands.hpp"

#include "lrldl/degrade.hpp"
#include "lrldl/model_io.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>
#include <variant>

namespace lrldl {

namespace {

// Runs fn(i) for i in [0, count) on up to `threads` workers. The first
// exception by index is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::vector<std::exception_ptr> failures(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    for (unsigned t = 0; t < workers; ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
    for (auto& failure : failures)
        if (failure)
            std::rethrow_exception(failure);
}

double parse_real(const std::string& text, const std::string& what) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw InvalidArgument("cannot parse " + what + " from '" + text + "'");
    return value;
}

long long parse_integer(const std::string& text, const std::string& what) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw InvalidArgument("cannot parse " + what + " from '" + text + "'");
    return value;
}

struct FoldData {
    Dataset train;
    Dataset test;
};

FoldData split(const Dataset& data, const FoldPlan& plan, int fold) {
    return {data.select(plan.train_indices(fold)), data.select(plan.test_indices(fold))};
}

FoldOutcome run_fold(const Dataset& train, const Dataset& test, Variant variant, const Hyperparams& hp) {
    const FitResult result = fit(train.X, train.D, hp, variant);
    FoldOutcome outcome;
    outcome.report = evaluate(test.D.data(), predict(result.model, test.X.data()));
    outcome.converged = result.converged;
    outcome.iterations = result.iterations_run;
    outcome.hp = hp;
    return outcome;
}

std::string describe(const FitResult& result) {
    std::ostringstream s;
    s << "iterations: " << result.iterations_run << '\n'
      << "converged: " << (result.converged ? "yes" : "no") << '\n'
      << "final primal residual: " << format_score(result.final_primal_residual) << '\n';
    if (!result.objective_trace.empty())
        s << "final objective: " << format_score(result.objective_trace.back()) << '\n';
    return s.str();
}

void print_prefixed(std::ostream& out, const std::string& text, OutputFormat format) {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line))
        out << (format == OutputFormat::Csv ? "# " : "") << line << '\n';
}

ResultRow report_row(const std::string& dataset, const std::string& variant, const EvalReport& report) {
    ResultRow row;
    row.keys = {{"dataset", dataset}, {"variant", variant}};
    row.metrics = report.scores;
    return row;
}

void note_convergence(const std::vector<CvSummary>& summaries, std::ostream& err) {
    for (const auto& s : summaries) {
        const int total = static_cast<int>(s.folds.size());
        if (s.converged_folds < total)
            err << "note: " << to_string(s.variant) << " reached max_iters without converging in "
                << total - s.converged_folds << " of " << total << " folds\n";
    }
}

}  // namespace

Dataset load_dataset_spec(const std::string& spec) {
    const std::string prefix = "synth:";
    if (spec.rfind(prefix, 0) != 0)
        return load_dataset(spec);

    std::map<std::string, std::string> params{{"n", "200"}, {"d", "20"},   {"m", "6"},    {"r", "2"},
                                              {"noise", "0.1"}, {"seed", "42"}, {"scale", "6"}};
    std::istringstream fields(spec.substr(prefix.size()));
    std::string field;
    while (std::getline(fields, field, ',')) {
        if (field.empty())
            continue;
        const auto eq = field.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("synthetic dataset parameter '" + field + "' must be key=value");
        const std::string key = field.substr(0, eq);
        if (!params.count(key))
            throw InvalidArgument("unknown synthetic dataset parameter '" + key + "'");
        params[key] = field.substr(eq + 1);
    }
    const long long seed = parse_integer(params["seed"], "seed");
    if (seed < 0)
        throw InvalidArgument("synthetic dataset seed must be >= 0");
    return synth_lowrank(parse_integer(params["n"], "n"), parse_integer(params["d"], "d"),
                         parse_integer(params["m"], "m"), parse_integer(params["r"], "r"),
                         parse_real(params["noise"], "noise"), static_cast<std::uint64_t>(seed),
                         parse_real(params["scale"], "scale"));
}

std::vector<double> parse_value_list(const std::string& text) {
    std::vector<double> values;
    std::istringstream fields(text);
    std::string field;
    while (std::getline(fields, field, ','))
        if (!field.empty())
            values.push_back(parse_real(field, "value"));
    if (values.empty())
        throw InvalidArgument("empty value list '" + text + "'");
    return values;
}

CvSummary cross_validate(const Dataset& data, Variant variant, const Hyperparams& hp, int folds,
                         std::uint64_t seed, const GridSpec& grid, unsigned threads) {
    hp.validate(data.m());
    const FoldPlan plan = kfold(data.n(), folds, seed);

    std::vector<FoldData> splits;
    splits.reserve(static_cast<std::size_t>(folds));
    for (int f = 0; f < folds; ++f)
        splits.push_back(split(data, plan, f));

    // Hyperparameters per outer fold, tuned by inner CV when a grid is given.
    std::vector<Hyperparams> chosen(static_cast<std::size_t>(folds), hp);
    if (grid.enabled()) {
        std::vector<Hyperparams> candidates;
        const std::vector<double> alphas =
            grid.alphas.empty() || variant == Variant::AblationB ? std::vector<double>{hp.alpha} : grid.alphas;
        const std::vector<double> lambdas = grid.lambdas.empty() ? std::vector<double>{hp.lambda} : grid.lambdas;
        const bool search_threshold = !grid.thresholds.empty() && variant == Variant::Full &&
                                      std::holds_alternative<ThresholdDegradation>(hp.degradation);
        std::vector<Degradation> degradations{hp.degradation};
        if (search_threshold) {
            degradations.clear();
            for (double t : grid.thresholds)
                degradations.emplace_back(ThresholdDegradation{t});
        }
        for (double alpha : alphas)
            for (double lambda : lambdas)
                for (const auto& method : degradations) {
                    Hyperparams candidate = hp;
                    candidate.alpha = alpha;
                    candidate.lambda = lambda;
                    candidate.degradation = method;
                    candidate.validate(data.m());
                    candidates.push_back(candidate);
                }
        const std::size_t cells = candidates.size();
        const auto inner = static_cast<std::size_t>(grid.inner_folds);

        std::vector<FoldPlan> inner_plans;
        for (int f = 0; f < folds; ++f)
            inner_plans.push_back(kfold(splits[static_cast<std::size_t>(f)].train.n(), grid.inner_folds,
                                        seed + 1 + static_cast<std::uint64_t>(f)));

        const std::size_t tasks = static_cast<std::size_t>(folds) * cells * inner;
        std::vector<double> inner_kl(tasks, 0.0);
        parallel_for(tasks, threads, [&](std::size_t task) {
            const std::size_t f = task / (cells * inner);
            const std::size_t cell = (task / inner) % cells;
            const int g = static_cast<int>(task % inner);
            const FoldData part = split(splits[f].train, inner_plans[f], g);
            inner_kl[task] = run_fold(part.train, part.test, variant, candidates[cell]).report[Metric::KL].mean;
        });

        for (std::size_t f = 0; f < static_cast<std::size_t>(folds); ++f) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t cell = 0; cell < cells; ++cell) {
                double total = 0.0;
                for (std::size_t g = 0; g < inner; ++g)
                    total += inner_kl[(f * cells + cell) * inner + g];
                const double mean = total / static_cast<double>(inner);
                if (mean < best) {
                    best = mean;
                    chosen[f] = candidates[cell];
                }
            }
        }
    }

    CvSummary summary;
    summary.variant = variant;
    summary.folds.resize(static_cast<std::size_t>(folds));
    parallel_for(static_cast<std::size_t>(folds), threads, [&](std::size_t f) {
        summary.folds[f] = run_fold(splits[f].train, splits[f].test, variant, chosen[f]);
    });

    for (std::size_t k = 0; k < kAllMetrics.size(); ++k) {
        std::vector<double> values;
        for (const auto& fold : summary.folds)
            values.push_back(fold.report.scores[k].mean);
        summary.metrics[k] = summarize(values);
    }
    for (const auto& fold : summary.folds)
        summary.converged_folds += fold.converged ? 1 : 0;
    return summary;
}

ResultRow to_row(const std::string& dataset, const CvSummary& summary) {
    ResultRow row;
    row.keys = {{"dataset", dataset}, {"variant", to_string(summary.variant)}};
    row.metrics = summary.metrics;
    row.note = "converged " + std::to_string(summary.converged_folds) + "/" + std::to_string(summary.folds.size());
    return row;
}

FitResult cmd_train(const TrainOptions& options, std::ostream& out, std::ostream& err) {
    const Dataset data = load_dataset_spec(options.data);
    options.hp.validate(data.m());
    FitResult result = fit(data.X, data.D, options.hp, options.variant);
    if (!options.model_out.empty()) {
        save_model(result.model, options.model_out);
        err << "wrote model to " << options.model_out.string() << '\n';
    }
    print_prefixed(out, describe(result), options.format);
    const EvalReport report = evaluate(data.D.data(), predict(result.model, data.X.data()));
    out << render({report_row(data.name, to_string(options.variant), report)}, options.format);
    return result;
}

void save_instance_matrix(const Matrix& by_column, const std::filesystem::path& path, bool integral) {
    std::ofstream file(path);
    if (!file)
        throw Error("cannot write " + path.string());
    file << by_column.cols() << ' ' << by_column.rows() << '\n';
    for (Index i = 0; i < by_column.cols(); ++i) {
        for (Index j = 0; j < by_column.rows(); ++j) {
            file << (j ? " " : "");
            if (integral)
                file << static_cast<long long>(by_column(j, i));
            else
                file << format_exact(by_column(j, i));
        }
        file << '\n';
    }
    if (!file)
        throw Error("write failed for " + path.string());
}

Matrix load_instance_matrix(const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file)
        throw Error("cannot open " + path.string());
    long long n = 0;
    long long m = 0;
    if (!(file >> n >> m) || n < 1 || m < 1)
        throw ParseError(1, "header must be 'n m' with positive sizes");
    Matrix out(m, n);
    for (long long i = 0; i < n; ++i)
        for (long long j = 0; j < m; ++j) {
            std::string token;
            if (!(file >> token))
                throw ParseError(static_cast<std::size_t>(i + 2), "file ended early");
            out(j, i) = parse_real(token, "value");
        }
    return out;
}

Matrix cmd_predict(const PredictOptions& options, std::ostream& out, std::ostream& err) {
    const TlrldlModel model = load_model(options.model);
    const Dataset data = load_dataset_spec(options.data);
    const Matrix predicted = predict(model, data.X.data());
    if (!options.predictions_out.empty()) {
        save_instance_matrix(predicted, options.predictions_out, false);
        err << "wrote " << predicted.cols() << " predictions to " << options.predictions_out.string() << '\n';
    } else {
        out << predicted.cols() << ' ' << predicted.rows() << '\n';
        for (Index i = 0; i < predicted.cols(); ++i) {
            for (Index j = 0; j < predicted.rows(); ++j)
                out << (j ? " " : "") << format_exact(predicted(j, i));
            out << '\n';
        }
    }
    return predicted;
}

EvalReport cmd_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& /*err*/) {
    const Dataset data = load_dataset_spec(options.data);
    Matrix predicted;
    std::string label;
    if (!options.model.empty()) {
        const TlrldlModel model = load_model(options.model);
        predicted = predict(model, data.X.data());
        label = to_string(model.variant);
    } else if (!options.predictions.empty()) {
        predicted = load_instance_matrix(options.predictions);
        label = options.predictions.stem().string();
    } else {
        throw InvalidArgument("evaluate needs --model or --predictions");
    }
    const EvalReport report = evaluate(data.D.data(), predicted);
    out << render({report_row(data.name, label, report)}, options.format);
    return report;
}

std::vector<CvSummary> cmd_cv(const CvOptions& options, std::ostream& out, std::ostream& err) {
    const Dataset data = load_dataset_spec(options.data);
    std::vector<CvSummary> summaries;
    std::vector<ResultRow> rows;
    for (Variant variant : options.variants) {
        summaries.push_back(
            cross_validate(data, variant, options.hp, options.folds, options.seed, options.grid, options.threads));
        rows.push_back(to_row(data.name, summaries.back()));
    }
    out << render(rows, options.format);
    note_convergence(summaries, err);
    return summaries;
}

std::vector<CvSummary> cmd_ablate(CvOptions options, std::ostream& out, std::ostream& err) {
    options.variants = {Variant::Full, Variant::AblationA, Variant::AblationB};
    return cmd_cv(options, out, err);
}

MultiLabelMatrix cmd_degrade(const DegradeOptions& options, std::ostream& out, std::ostream& err) {
    const Dataset data = load_dataset_spec(options.data);
    MultiLabelMatrix labels = degrade(data.D, options.method);
    if (!options.labels_out.empty()) {
        save_instance_matrix(labels.data(), options.labels_out, true);
        err << "wrote multi-label matrix to " << options.labels_out.string() << '\n';
    }
    out << "instance,positives\n";
    const Vector counts = labels.data().colwise().sum().transpose();
    for (Index i = 0; i < counts.size(); ++i)
        out << i << ',' << static_cast<long long>(counts(i)) << '\n';
    err << "mean positives per instance: " << format_score(counts.mean()) << " (" << to_string(options.method)
        << ")\n";
    return labels;
}

std::vector<CvSummary> cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err) {
    if (options.param != "alpha" && options.param != "lambda")
        throw InvalidArgument("sweep parameter must be alpha or lambda, got '" + options.param + "'");
    if (options.values.empty())
        throw InvalidArgument("sweep needs at least one value");
    const Dataset data = load_dataset_spec(options.data);
    std::vector<CvSummary> summaries;
    std::vector<ResultRow> rows;
    for (double value : options.values) {
        Hyperparams hp = options.hp;
        (options.param == "alpha" ? hp.alpha : hp.lambda) = value;
        summaries.push_back(cross_validate(data, options.variant, hp, options.folds, options.seed, {}, options.threads));
        ResultRow row = to_row(data.name, summaries.back());
        row.keys.emplace_back("param", options.param);
        row.keys.emplace_back("value", format_score(value));
        rows.push_back(std::move(row));
    }
    out << render(rows, options.format);
    note_convergence(summaries, err);
    return summaries;
}

Dataset cmd_synth(const SynthOptions& options, std::ostream& out, std::ostream& /*err*/) {
    if (options.out_path.empty())
        throw InvalidArgument("synth needs an output path");
    Dataset data = synth_lowrank(options.n, options.d, options.m, options.r, options.noise, options.seed,
                                 options.logit_scale);
    save_dataset(data, options.out_path, format_from_path(options.out_path));
    out << "wrote " << data.name << " (n=" << data.n() << ", d=" << data.d() << ", m=" << data.m() << ") to "
        << options.out_path.string() << '\n';
    return data;
}

}  // namespace lrldl
