#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "greedy/trace.hpp"

namespace greedy::tools {

/// Shortest round-trip-safe decimal form with 17 significant digits.
std::string format_double(double x);
/// Fixed notation with `digits` decimals, for log lines.
std::string format_fixed(double x, int digits = 3);

enum class TraceLayout {
    /// n,error,lebesgue_upper,selected_index,seconds
    interpolation,
    /// n,residual_norm,selected_index,seconds
    residual,
};

std::string trace_header(TraceLayout layout);
std::string trace_to_csv(const GreedyTrace& trace, TraceLayout layout);

/// A parsed CSV: header names plus rows whose empty cells are nullopt.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::optional<double>>> rows;

    /// Throws IoError if the column does not exist.
    std::size_t column_index(const std::string& name) const;
    /// Values of a column; empty cells throw IoError.
    std::vector<double> column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

/// Writes to `<path>.tmp` and renames over `path`. Creates missing parent directories.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

} // namespace greedy::tools
