#include "lrldl/report.hpp"

#include <cstdio>
#include <sstream>

namespace lrldl {

OutputFormat parse_output_format(const std::string& text) {
    if (text == "csv")
        return OutputFormat::Csv;
    if (text == "md" || text == "markdown")
        return OutputFormat::Markdown;
    throw InvalidArgument("unknown output format '" + text + "' (expected csv or md)");
}

std::string format_score(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

namespace {

void check_keys(const std::vector<ResultRow>& rows) {
    for (const auto& row : rows) {
        if (row.keys.size() != rows.front().keys.size())
            throw InvalidArgument("result rows have inconsistent key columns");
        for (std::size_t k = 0; k < row.keys.size(); ++k)
            if (row.keys[k].first != rows.front().keys[k].first)
                throw InvalidArgument("result rows have inconsistent key columns");
    }
}

}  // namespace

std::string render_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    if (rows.empty())
        return {};
    check_keys(rows);
    for (const auto& [name, value] : rows.front().keys)
        out << name << ',';
    out << "metric,mean,std\n";
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < kAllMetrics.size(); ++k) {
            for (const auto& [name, value] : row.keys)
                out << value << ',';
            out << metric_name(kAllMetrics[k]) << ',' << format_score(row.metrics[k].mean) << ','
                << format_score(row.metrics[k].std) << '\n';
        }
    }
    return out.str();
}

std::string render_markdown(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    if (rows.empty())
        return {};
    check_keys(rows);
    bool notes = false;
    for (const auto& row : rows)
        notes = notes || !row.note.empty();

    out << '|';
    for (const auto& [name, value] : rows.front().keys)
        out << ' ' << name << " |";
    for (Metric metric : kAllMetrics)
        out << ' ' << metric_name(metric) << (lower_is_better(metric) ? " (lower)" : " (higher)") << " |";
    if (notes)
        out << " note |";
    out << "\n|";
    const std::size_t columns = rows.front().keys.size() + kAllMetrics.size() + (notes ? 1 : 0);
    for (std::size_t c = 0; c < columns; ++c)
        out << "---|";
    out << '\n';
    for (const auto& row : rows) {
        out << '|';
        for (const auto& [name, value] : row.keys)
            out << ' ' << value << " |";
        for (const auto& summary : row.metrics)
            out << ' ' << format_score(summary.mean) << " ± " << format_score(summary.std) << " |";
        if (notes)
            out << ' ' << row.note << " |";
        out << '\n';
    }
    return out.str();
}

std::string render(const std::vector<ResultRow>& rows, OutputFormat format) {
    return format == OutputFormat::Csv ? render_csv(rows) : render_markdown(rows);
}

}  // namespace lrldl
