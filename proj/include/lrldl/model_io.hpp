#pragma once

#include "lrldl/types.hpp"

#include <filesystem>
#include <iosfwd>

namespace lrldl {

/// Current model container version written by save_model.
inline constexpr int kModelFormatVersion = 1;

/// Text container: W, standardizer, bias flag, variant tag and hyperparameters,
/// all reals at 17 significant digits. O is training-only and not stored.
void write_model(const TlrldlModel& model, std::ostream& out);
TlrldlModel read_model(std::istream& in);

void save_model(const TlrldlModel& model, const std::filesystem::path& path);
TlrldlModel load_model(const std::filesystem::path& path);

}  // namespace lrldl
