#pragma once

#include "lrldl/metrics.hpp"

#include <string>
#include <utility>
#include <vector>

namespace lrldl {

enum class OutputFormat { Csv, Markdown };

OutputFormat parse_output_format(const std::string& text);

/// One table row: identifying columns (e.g. dataset, variant) plus the six
/// metric summaries in kAllMetrics order.
struct ResultRow {
    std::vector<std::pair<std::string, std::string>> keys;
    std::array<MetricSummary, 6> metrics{};
    /// Free-form note rendered in the Markdown table only (e.g. convergence).
    std::string note;
};

/// Fixed 6-significant-digit rendering shared by both emitters.
std::string format_score(double value);

/// Long format: key columns, then metric, mean, std; one line per row and metric.
std::string render_csv(const std::vector<ResultRow>& rows);

/// Wide format: key columns, then one "mean ± std" column per metric.
std::string render_markdown(const std::vector<ResultRow>& rows);

std::string render(const std::vector<ResultRow>& rows, OutputFormat format);

}  // namespace lrldl
