#include "lrldl/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace lrldl {

Dataset::Dataset(std::string name_, FeatureMatrix X_, LabelDistributionMatrix D_,
                 std::vector<std::string> label_names_)
    : name{std::move(name_)}, X{std::move(X_)}, D{std::move(D_)}, label_names{std::move(label_names_)} {
    if (X.n() != D.n())
        throw ShapeMismatch("dataset has " + std::to_string(X.n()) + " feature rows but " +
                            std::to_string(D.n()) + " label distributions");
    if (!label_names.empty() && static_cast<Index>(label_names.size()) != D.m())
        throw ShapeMismatch("dataset has " + std::to_string(label_names.size()) + " label names for " +
                            std::to_string(D.m()) + " labels");
}

Dataset Dataset::select(const std::vector<Index>& indices) const {
    Matrix xs(static_cast<Index>(indices.size()), d());
    Matrix ds(m(), static_cast<Index>(indices.size()));
    for (std::size_t k = 0; k < indices.size(); ++k) {
        xs.row(static_cast<Index>(k)) = X.data().row(indices[k]);
        ds.col(static_cast<Index>(k)) = D.data().col(indices[k]);
    }
    return Dataset(name, FeatureMatrix(std::move(xs)), LabelDistributionMatrix(std::move(ds)), label_names);
}

DataFormat format_from_path(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".csv" ? DataFormat::Csv : DataFormat::MatrixText;
}

std::filesystem::path resolve_data_path(const std::filesystem::path& path) {
    if (std::filesystem::exists(path))
        return path;
    if (const char* root = std::getenv("LDL_DATA_DIR"); root != nullptr && *root != '\0') {
        auto candidate = std::filesystem::path(root) / path;
        if (std::filesystem::exists(candidate))
            return candidate;
    }
    return path;
}

namespace {

struct Line {
    std::size_t number;
    std::string text;
};

std::vector<Line> read_nonblank_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    std::vector<Line> lines;
    std::string text;
    std::size_t number = 0;
    while (std::getline(in, text)) {
        ++number;
        if (!text.empty() && text.back() == '\r')
            text.pop_back();
        if (text.find_first_not_of(" \t") == std::string::npos)
            continue;
        lines.push_back({number, text});
    }
    return lines;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& token, std::size_t line) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = first + token.size();
    if (first != last && *first == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw ParseError(line, "cannot parse number '" + token + "'");
    if (!std::isfinite(value))
        throw ParseError(line, "non-finite value '" + token + "'");
    return value;
}

std::vector<std::string> split_whitespace(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> tokens;
    std::string token;
    while (in >> token)
        tokens.push_back(token);
    return tokens;
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(text);
    while (std::getline(in, field, ','))
        fields.push_back(trim(field));
    if (!text.empty() && text.back() == ',')
        fields.emplace_back();
    return fields;
}

Index parse_dimension(const std::string& token, std::size_t line, const char* what) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() || value < 1)
        throw ParseError(line, std::string("header ") + what + " must be a positive integer, got '" + token + "'");
    return static_cast<Index>(value);
}

LabelDistributionMatrix checked_distributions(Matrix D, const std::filesystem::path& path) {
    LabelDistributionMatrix out(std::move(D));
    if (!out.renormalized_columns().empty()) {
        std::fprintf(stderr, "warning: %s: renormalized %zu label distribution(s) within %g of the simplex\n",
                     path.string().c_str(), out.renormalized_columns().size(), kRenormalizeBand);
    }
    return out;
}

// Rows are instances in the file; D is stored labels x instances.
Dataset load_matrix_text(const std::filesystem::path& path) {
    const auto lines = read_nonblank_lines(path);
    if (lines.empty())
        throw ParseError(1, "missing header 'n d m'");
    const auto header = split_whitespace(lines[0].text);
    if (header.size() != 3)
        throw ParseError(lines[0].number, "header must be 'n d m'");
    const Index n = parse_dimension(header[0], lines[0].number, "n");
    const Index d = parse_dimension(header[1], lines[0].number, "d");
    const Index m = parse_dimension(header[2], lines[0].number, "m");

    const std::size_t expected = 1 + 2 * static_cast<std::size_t>(n);
    if (lines.size() < expected) {
        const std::size_t next = lines.back().number + 1;
        throw ParseError(next, "file ended after " + std::to_string(lines.size() - 1) + " of " +
                                   std::to_string(2 * n) + " data rows");
    }
    if (lines.size() > expected)
        throw ParseError(lines[expected].number, "unexpected data after " + std::to_string(2 * n) + " rows");

    auto read_row = [&](const Line& line, Index width, const char* what) {
        const auto tokens = split_whitespace(line.text);
        if (static_cast<Index>(tokens.size()) != width)
            throw ParseError(line.number, "expected " + std::to_string(width) + " " + what + " values, got " +
                                              std::to_string(tokens.size()));
        Vector row(width);
        for (Index j = 0; j < width; ++j)
            row(j) = parse_double(tokens[static_cast<std::size_t>(j)], line.number);
        return row;
    };

    Matrix X(n, d);
    Matrix D(m, n);
    for (Index i = 0; i < n; ++i)
        X.row(i) = read_row(lines[1 + static_cast<std::size_t>(i)], d, "feature").transpose();
    for (Index i = 0; i < n; ++i)
        D.col(i) = read_row(lines[1 + static_cast<std::size_t>(n + i)], m, "label");
    return Dataset(path.stem().string(), FeatureMatrix(std::move(X)), checked_distributions(std::move(D), path));
}

Dataset load_csv(const std::filesystem::path& path) {
    const auto lines = read_nonblank_lines(path);
    if (lines.empty())
        throw ParseError(1, "missing header row");
    const auto header = split_csv(lines[0].text);
    std::size_t d = 0;
    while (d < header.size() && !header[d].empty() && (header[d][0] == 'f' || header[d][0] == 'F'))
        ++d;
    if (d == 0)
        throw ParseError(lines[0].number, "header has no feature columns (names starting with 'f')");
    if (d == header.size())
        throw ParseError(lines[0].number, "header has no label columns after the features");
    const std::size_t m = header.size() - d;
    const Index n = static_cast<Index>(lines.size() - 1);
    if (n < 1)
        throw ParseError(lines[0].number + 1, "no data rows");

    Matrix X(n, static_cast<Index>(d));
    Matrix D(static_cast<Index>(m), n);
    for (Index i = 0; i < n; ++i) {
        const Line& line = lines[1 + static_cast<std::size_t>(i)];
        const auto fields = split_csv(line.text);
        if (fields.size() != header.size())
            throw ParseError(line.number, "expected " + std::to_string(header.size()) + " fields, got " +
                                              std::to_string(fields.size()));
        for (std::size_t j = 0; j < d; ++j)
            X(i, static_cast<Index>(j)) = parse_double(fields[j], line.number);
        for (std::size_t j = 0; j < m; ++j)
            D(static_cast<Index>(j), i) = parse_double(fields[d + j], line.number);
    }
    std::vector<std::string> names(header.begin() + static_cast<std::ptrdiff_t>(d), header.end());
    return Dataset(path.stem().string(), FeatureMatrix(std::move(X)), checked_distributions(std::move(D), path),
                   std::move(names));
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path, DataFormat format) {
    const auto resolved = resolve_data_path(path);
    return format == DataFormat::Csv ? load_csv(resolved) : load_matrix_text(resolved);
}

Dataset load_dataset(const std::filesystem::path& path) {
    return load_dataset(path, format_from_path(path));
}

std::string format_exact(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    (void)ec;
    return std::string(buf, ptr);
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path, DataFormat format) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path.string());
    const Matrix& X = dataset.X.data();
    const Matrix& D = dataset.D.data();
    if (format == DataFormat::MatrixText) {
        out << dataset.n() << ' ' << dataset.d() << ' ' << dataset.m() << '\n';
        for (Index i = 0; i < X.rows(); ++i) {
            for (Index j = 0; j < X.cols(); ++j)
                out << (j ? " " : "") << format_exact(X(i, j));
            out << '\n';
        }
        for (Index i = 0; i < D.cols(); ++i) {
            for (Index j = 0; j < D.rows(); ++j)
                out << (j ? " " : "") << format_exact(D(j, i));
            out << '\n';
        }
    } else {
        for (Index j = 0; j < X.cols(); ++j)
            out << (j ? "," : "") << 'f' << j + 1;
        for (Index j = 0; j < D.rows(); ++j) {
            out << ',';
            if (dataset.label_names.empty())
                out << 'y' << j + 1;
            else
                out << dataset.label_names[static_cast<std::size_t>(j)];
        }
        out << '\n';
        for (Index i = 0; i < X.rows(); ++i) {
            for (Index j = 0; j < X.cols(); ++j)
                out << (j ? "," : "") << format_exact(X(i, j));
            for (Index j = 0; j < D.rows(); ++j)
                out << ',' << format_exact(D(j, i));
            out << '\n';
        }
    }
    if (!out)
        throw Error("write failed for " + path.string());
}

Dataset synth_lowrank(Index n, Index d, Index m, Index r, double noise, std::uint64_t seed,
                      double logit_scale) {
    if (n < 1 || d < 1 || m < 1)
        throw InvalidArgument("synth_lowrank: n, d and m must be >= 1");
    if (r < 1 || r > std::min(m, n))
        throw InvalidArgument("synth_lowrank: rank r must satisfy 1 <= r <= min(m, n)");
    if (!(noise >= 0.0) || !std::isfinite(noise))
        throw InvalidArgument("synth_lowrank: noise must be >= 0");
    if (!(logit_scale > 0.0))
        throw InvalidArgument("synth_lowrank: logit scale must be > 0");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> loading(0.5, 1.5);

    Matrix A = Matrix::Zero(m, r);
    for (Index j = 0; j < m; ++j)
        A(j, j % r) = loading(rng);
    Matrix B(r, d);
    const double b_scale = logit_scale / std::sqrt(static_cast<double>(d));
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < d; ++j)
            B(i, j) = b_scale * normal(rng);
    Matrix X(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j)
            X(i, j) = normal(rng);

    Matrix logits = (A * B) * X.transpose();
    if (noise > 0.0) {
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < m; ++j)
                logits(j, i) += noise * normal(rng);
    }
    Matrix D(m, n);
    for (Index i = 0; i < n; ++i) {
        const Vector shifted = (logits.col(i).array() - logits.col(i).maxCoeff()).exp().matrix();
        D.col(i) = shifted / shifted.sum();
    }
    std::string name = "synth-n" + std::to_string(n) + "-d" + std::to_string(d) + "-m" + std::to_string(m) +
                       "-r" + std::to_string(r) + "-seed" + std::to_string(seed);
    return Dataset(std::move(name), FeatureMatrix(std::move(X)), LabelDistributionMatrix(std::move(D)));
}

std::vector<Index> FoldPlan::train_indices(int fold) const {
    std::vector<Index> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] != fold)
            out.push_back(static_cast<Index>(i));
    return out;
}

std::vector<Index> FoldPlan::test_indices(int fold) const {
    std::vector<Index> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == fold)
            out.push_back(static_cast<Index>(i));
    return out;
}

std::vector<Index> FoldPlan::fold_sizes() const {
    std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
    for (int a : assignments)
        ++sizes[static_cast<std::size_t>(a)];
    return sizes;
}

FoldPlan kfold(Index n, int k, std::uint64_t seed) {
    if (k < 2)
        throw InvalidArgument("kfold: k must be >= 2");
    if (n < k)
        throw InvalidArgument("kfold: need n >= k (n = " + std::to_string(n) + ", k = " + std::to_string(k) + ")");
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(static_cast<std::size_t>(n), 0);
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        plan.assignments[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos % static_cast<std::size_t>(k));
    return plan;
}

Standardizer fit_standardizer(const Matrix& X) {
    const Index d = X.cols();
    const double count = static_cast<double>(X.rows());
    Standardizer s{Vector(d), Vector(d)};
    for (Index j = 0; j < d; ++j) {
        const auto col = X.col(j);
        const double mean = col.mean();
        s.mean(j) = mean;
        if (col.minCoeff() == col.maxCoeff()) {
            s.scale(j) = 0.0;
            continue;
        }
        const double var = (col.array() - mean).square().sum() / count;
        s.scale(j) = var > 0.0 ? 1.0 / std::sqrt(var) : 0.0;
    }
    return s;
}

StandardizedSplit standardize(const Matrix& train, const Matrix& test) {
    if (train.cols() != test.cols())
        throw DimensionMismatch("standardize: train and test feature counts differ");
    StandardizedSplit out;
    out.standardizer = fit_standardizer(train);
    out.train = out.standardizer.apply(train);
    out.test = out.standardizer.apply(test);
    return out;
}

}  // namespace lrldl
