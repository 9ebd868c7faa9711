#include "lrldl/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <thread>

namespace {

struct SharedFlags {
    double alpha = 0.1;
    double lambda = 0.1;
    std::string degrade = "threshold:0.5";
    std::string variant = "full";
    int folds = 10;
    std::uint64_t seed = 42;
    int max_iters = 200;
    double tol = 1e-5;
    double mu0 = 0.1;
    double mu_max = 1e6;
    bool no_standardize = false;
    bool no_bias = false;
    std::string format = "md";
    unsigned threads = 0;

    lrldl::Hyperparams hyperparams() const {
        lrldl::Hyperparams hp;
        hp.alpha = alpha;
        hp.lambda = lambda;
        hp.degradation = lrldl::parse_degradation(degrade);
        hp.max_iters = max_iters;
        hp.tol = tol;
        hp.mu0 = mu0;
        hp.mu_max = mu_max;
        hp.standardize = !no_standardize;
        hp.bias = !no_bias;
        hp.validate();
        return hp;
    }

    unsigned thread_count() const {
        if (threads > 0)
            return threads;
        return std::max(1u, std::thread::hardware_concurrency());
    }
};

void add_model_flags(CLI::App* cmd, SharedFlags& f) {
    cmd->add_option("--alpha", f.alpha, "Nuclear-norm weight")->capture_default_str();
    cmd->add_option("--lambda", f.lambda, "Ridge weight on W and O")->capture_default_str();
    cmd->add_option("--degrade", f.degrade, "Multi-label degradation: threshold:T or topk:K")->capture_default_str();
    cmd->add_option("--max-iters", f.max_iters, "ADMM iteration cap")->capture_default_str();
    cmd->add_option("--tol", f.tol, "Convergence tolerance")->capture_default_str();
    cmd->add_option("--mu0", f.mu0, "Initial penalty")->capture_default_str();
    cmd->add_option("--mu-max", f.mu_max, "Penalty cap")->capture_default_str();
    cmd->add_flag("--no-standardize", f.no_standardize, "Skip feature z-scoring");
    cmd->add_flag("--no-bias", f.no_bias, "Skip the constant-1 feature column");
}

void add_cv_flags(CLI::App* cmd, SharedFlags& f) {
    cmd->add_option("--folds", f.folds, "Number of CV folds")->capture_default_str();
    cmd->add_option("--seed", f.seed, "Fold shuffling seed")->capture_default_str();
    cmd->add_option("--threads", f.threads, "Worker threads (0 = hardware concurrency)")->capture_default_str();
}

void add_format_flag(CLI::App* cmd, SharedFlags& f) {
    cmd->add_option("--format", f.format, "Table format: csv or md")
        ->check(CLI::IsMember({"csv", "md"}))
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Label distribution learning with low-rank auxiliary multi-label correlation"};
    app.require_subcommand(1);

    SharedFlags flags;
    std::string data;
    std::string model_path;
    std::string out_path;
    std::string predictions_path;
    std::string variants = "full";
    std::string grid_alpha;
    std::string grid_lambda;
    std::string grid_threshold;
    int inner_folds = 5;
    std::string sweep_param = "alpha";
    std::string sweep_values;
    lrldl::SynthOptions synth;

    auto* train = app.add_subcommand("train", "Fit a model and write it to disk");
    train->add_option("--data", data, "Dataset file or synth:... spec")->required();
    train->add_option("--model-out", model_path, "Model output path")->required();
    train->add_option("--variant", flags.variant, "full, ablation-a or ablation-b")->capture_default_str();
    add_model_flags(train, flags);
    add_format_flag(train, flags);

    auto* predict = app.add_subcommand("predict", "Predict label distributions with a saved model");
    predict->add_option("--model", model_path, "Model file")->required();
    predict->add_option("--data", data, "Dataset file or synth:... spec")->required();
    predict->add_option("--out", out_path, "Predictions output (default stdout)");

    auto* evaluate = app.add_subcommand("evaluate", "Score predictions against a dataset");
    evaluate->add_option("--data", data, "Dataset file or synth:... spec")->required();
    auto* model_opt = evaluate->add_option("--model", model_path, "Model file");
    auto* pred_opt = evaluate->add_option("--predictions", predictions_path, "Predictions file");
    model_opt->excludes(pred_opt);
    add_format_flag(evaluate, flags);

    auto* cv = app.add_subcommand("cv", "k-fold cross-validation, optionally with inner grid search");
    cv->add_option("--data", data, "Dataset file or synth:... spec")->required();
    cv->add_option("--variants", variants, "Comma-separated variants")->capture_default_str();
    cv->add_option("--grid-alpha", grid_alpha, "Comma-separated alpha candidates for inner grid search");
    cv->add_option("--grid-lambda", grid_lambda, "Comma-separated lambda candidates for inner grid search");
    cv->add_option("--grid-threshold", grid_threshold,
                   "Comma-separated T candidates for inner grid search (full variant, threshold degradation)");
    cv->add_option("--inner-folds", inner_folds, "Inner CV folds for grid search")->capture_default_str();
    add_model_flags(cv, flags);
    add_cv_flags(cv, flags);
    add_format_flag(cv, flags);

    auto* ablate = app.add_subcommand("ablate", "Compare full, ablation-a and ablation-b by CV");
    ablate->add_option("--data", data, "Dataset file or synth:... spec")->required();
    add_model_flags(ablate, flags);
    add_cv_flags(ablate, flags);
    add_format_flag(ablate, flags);

    auto* degrade = app.add_subcommand("degrade", "Degrade label distributions to multi-labels");
    degrade->add_option("--data", data, "Dataset file or synth:... spec")->required();
    degrade->add_option("--degrade", flags.degrade, "threshold:T or topk:K")->capture_default_str();
    degrade->add_option("--out", out_path, "Multi-label matrix output file");

    auto* sweep = app.add_subcommand("sweep", "Sensitivity of CV scores to alpha or lambda");
    sweep->add_option("--data", data, "Dataset file or synth:... spec")->required();
    sweep->add_option("--param", sweep_param, "alpha or lambda")
        ->check(CLI::IsMember({"alpha", "lambda"}))
        ->capture_default_str();
    sweep->add_option("--values", sweep_values, "Comma-separated candidates (default 0.005,...,10)");
    sweep->add_option("--variant", flags.variant, "full, ablation-a or ablation-b")->capture_default_str();
    add_model_flags(sweep, flags);
    add_cv_flags(sweep, flags);
    add_format_flag(sweep, flags);

    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic low-rank dataset");
    synth_cmd->add_option("--n", synth.n, "Instances")->capture_default_str();
    synth_cmd->add_option("--d", synth.d, "Features")->capture_default_str();
    synth_cmd->add_option("--m", synth.m, "Labels")->capture_default_str();
    synth_cmd->add_option("--r", synth.r, "Label group count (rank of the logit map)")->capture_default_str();
    synth_cmd->add_option("--noise", synth.noise, "Logit noise standard deviation")->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
    synth_cmd->add_option("--scale", synth.logit_scale, "Logit scale")->capture_default_str();
    synth_cmd->add_option("--out", synth.out_path, "Output file (.csv for CSV, else matrix text)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const auto format = lrldl::parse_output_format(flags.format);
        if (train->parsed()) {
            lrldl::TrainOptions options;
            options.data = data;
            options.hp = flags.hyperparams();
            options.variant = lrldl::parse_variant(flags.variant);
            options.model_out = model_path;
            options.format = format;
            lrldl::cmd_train(options, std::cout, std::cerr);
        } else if (predict->parsed()) {
            lrldl::cmd_predict({model_path, data, out_path}, std::cout, std::cerr);
        } else if (evaluate->parsed()) {
            lrldl::cmd_evaluate({data, model_path, predictions_path, format}, std::cout, std::cerr);
        } else if (cv->parsed() || ablate->parsed()) {
            lrldl::CvOptions options;
            options.data = data;
            options.hp = flags.hyperparams();
            options.folds = flags.folds;
            options.seed = flags.seed;
            options.format = format;
            options.threads = flags.thread_count();
            if (ablate->parsed()) {
                lrldl::cmd_ablate(options, std::cout, std::cerr);
            } else {
                options.variants.clear();
                std::istringstream names(variants);
                for (std::string name; std::getline(names, name, ',');)
                    if (!name.empty())
                        options.variants.push_back(lrldl::parse_variant(name));
                if (!grid_alpha.empty())
                    options.grid.alphas = lrldl::parse_value_list(grid_alpha);
                if (!grid_lambda.empty())
                    options.grid.lambdas = lrldl::parse_value_list(grid_lambda);
                if (!grid_threshold.empty())
                    options.grid.thresholds = lrldl::parse_value_list(grid_threshold);
                options.grid.inner_folds = inner_folds;
                lrldl::cmd_cv(options, std::cout, std::cerr);
            }
        } else if (degrade->parsed()) {
            lrldl::cmd_degrade({data, lrldl::parse_degradation(flags.degrade), out_path}, std::cout, std::cerr);
        } else if (sweep->parsed()) {
            lrldl::SweepOptions options;
            options.data = data;
            options.hp = flags.hyperparams();
            options.variant = lrldl::parse_variant(flags.variant);
            options.param = sweep_param;
            if (!sweep_values.empty())
                options.values = lrldl::parse_value_list(sweep_values);
            options.folds = flags.folds;
            options.seed = flags.seed;
            options.format = format;
            options.threads = flags.thread_count();
            lrldl::cmd_sweep(options, std::cout, std::cerr);
        } else if (synth_cmd->parsed()) {
            lrldl::cmd_synth(synth, std::cout, std::cerr);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
