#include "lrldl/model_io.hpp"

#include "lrldl/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace lrldl {

namespace {

constexpr const char* kMagic = "lrldl-model";

void write_vector(std::ostream& out, const char* key, const Vector& v) {
    out << key;
    for (Index j = 0; j < v.size(); ++j)
        out << ' ' << format_exact(v(j));
    out << '\n';
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_{in} {}

    std::istringstream next(const std::string& key) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.find_first_not_of(" \t") != std::string::npos)
                break;
        }
        if (!in_ && line.empty())
            throw ParseError(line_ + 1, "model file ended, expected '" + key + "'");
        std::istringstream fields(line);
        std::string found;
        fields >> found;
        if (found != key)
            throw ParseError(line_, "expected '" + key + "', found '" + found + "'");
        return fields;
    }

    std::string word(std::istringstream& fields, const char* what) {
        std::string token;
        if (!(fields >> token))
            throw ParseError(line_, std::string("missing ") + what);
        return token;
    }

    double real(std::istringstream& fields, const char* what) {
        const std::string token = word(fields, what);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(value))
            throw ParseError(line_, std::string("bad value for ") + what + ": '" + token + "'");
        return value;
    }

    long long integer(std::istringstream& fields, const char* what) {
        const std::string token = word(fields, what);
        long long value = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc{} || ptr != token.data() + token.size())
            throw ParseError(line_, std::string("bad integer for ") + what + ": '" + token + "'");
        return value;
    }

    Vector vector(const std::string& key, Index size) {
        auto fields = next(key);
        Vector v(size);
        for (Index j = 0; j < size; ++j)
            v(j) = real(fields, key.c_str());
        return v;
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

}  // namespace

void write_model(const TlrldlModel& model, std::ostream& out) {
    const Hyperparams& hp = model.hyperparams;
    out << kMagic << ' ' << kModelFormatVersion << '\n';
    out << "variant " << to_string(model.variant) << '\n';
    out << "bias " << (model.bias ? 1 : 0) << '\n';
    out << "alpha " << format_exact(hp.alpha) << '\n';
    out << "lambda " << format_exact(hp.lambda) << '\n';
    out << "degradation " << to_string(hp.degradation) << '\n';
    out << "mu0 " << format_exact(hp.mu0) << '\n';
    out << "mu_max " << format_exact(hp.mu_max) << '\n';
    out << "mu_growth " << format_exact(hp.mu_growth) << '\n';
    out << "max_iters " << hp.max_iters << '\n';
    out << "tol " << format_exact(hp.tol) << '\n';
    out << "standardize " << (hp.standardize ? 1 : 0) << '\n';
    out << "features " << model.standardizer.dim() << '\n';
    write_vector(out, "mean", model.standardizer.mean);
    write_vector(out, "scale", model.standardizer.scale);
    out << "weights " << model.W.rows() << ' ' << model.W.cols() << '\n';
    for (Index i = 0; i < model.W.rows(); ++i)
        write_vector(out, "row", model.W.row(i).transpose());
    out << "end\n";
}

TlrldlModel read_model(std::istream& in) {
    Reader reader(in);
    TlrldlModel model;
    Hyperparams& hp = model.hyperparams;

    auto header = reader.next(kMagic);
    const long long version = reader.integer(header, "format version");
    if (version != kModelFormatVersion)
        throw ParseError(reader.line(), "unsupported model format version " + std::to_string(version));

    auto fields = reader.next("variant");
    try {
        model.variant = parse_variant(reader.word(fields, "variant"));
    } catch (const InvalidArgument& e) {
        throw ParseError(reader.line(), e.what());
    }
    fields = reader.next("bias");
    model.bias = reader.integer(fields, "bias") != 0;
    fields = reader.next("alpha");
    hp.alpha = reader.real(fields, "alpha");
    fields = reader.next("lambda");
    hp.lambda = reader.real(fields, "lambda");
    fields = reader.next("degradation");
    try {
        hp.degradation = parse_degradation(reader.word(fields, "degradation"));
    } catch (const InvalidArgument& e) {
        throw ParseError(reader.line(), e.what());
    }
    fields = reader.next("mu0");
    hp.mu0 = reader.real(fields, "mu0");
    fields = reader.next("mu_max");
    hp.mu_max = reader.real(fields, "mu_max");
    fields = reader.next("mu_growth");
    hp.mu_growth = reader.real(fields, "mu_growth");
    fields = reader.next("max_iters");
    hp.max_iters = static_cast<int>(reader.integer(fields, "max_iters"));
    fields = reader.next("tol");
    hp.tol = reader.real(fields, "tol");
    fields = reader.next("standardize");
    hp.standardize = reader.integer(fields, "standardize") != 0;
    hp.bias = model.bias;

    fields = reader.next("features");
    const long long d = reader.integer(fields, "feature count");
    if (d < 1)
        throw ParseError(reader.line(), "feature count must be >= 1");
    model.standardizer.mean = reader.vector("mean", static_cast<Index>(d));
    model.standardizer.scale = reader.vector("scale", static_cast<Index>(d));

    fields = reader.next("weights");
    const long long rows = reader.integer(fields, "weight rows");
    const long long cols = reader.integer(fields, "weight columns");
    if (rows < 1 || cols != d + (model.bias ? 1 : 0))
        throw ParseError(reader.line(), "weight shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                                            " does not match " + std::to_string(d) + " features" +
                                            (model.bias ? " plus bias" : ""));
    model.W.resize(rows, cols);
    for (Index i = 0; i < rows; ++i)
        model.W.row(i) = reader.vector("row", static_cast<Index>(cols)).transpose();
    reader.next("end");
    return model;
}

void save_model(const TlrldlModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path.string());
    write_model(model, out);
    if (!out)
        throw Error("write failed for " + path.string());
}

TlrldlModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    return read_model(in);
}

}  // namespace lrldl
