#include "greedy_tools/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "greedy_tools/config.hpp"

namespace greedy::tools {

std::string format_double(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string format_fixed(double x, int digits)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, digits);
    return std::string(buf, res.ptr);
}

std::string trace_header(TraceLayout layout)
{
    return layout == TraceLayout::interpolation ? "n,error,lebesgue_upper,selected_index,seconds"
                                                : "n,residual_norm,selected_index,seconds";
}

std::string trace_to_csv(const GreedyTrace& trace, TraceLayout layout)
{
    std::string out = trace_header(layout) + '\n';
    for (const TraceRecord& r : trace.records) {
        out += std::to_string(r.n);
        out += ',';
        out += format_double(r.error);
        out += ',';
        if (layout == TraceLayout::interpolation) {
            if (r.lebesgue_upper) out += format_double(*r.lebesgue_upper);
            out += ',';
        }
        out += std::to_string(r.selected_index);
        out += ',';
        out += format_double(r.seconds);
        out += '\n';
    }
    return out;
}

std::size_t CsvTable::column_index(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw IoError("CSV has no column '" + name + "'");
}

std::vector<double> CsvTable::column(const std::string& name) const
{
    const std::size_t j = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i][j]) throw IoError("CSV column '" + name + "' is empty in data row " + std::to_string(i + 1));
        out.push_back(*rows[i][j]);
    }
    return out;
}

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

} // namespace

CsvTable parse_csv(const std::string& text)
{
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells = split(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw IoError("CSV line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) + " cells");
        std::vector<std::optional<double>> row;
        for (const std::string& c : cells) {
            if (c.empty()) {
                row.emplace_back();
                continue;
            }
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
            if (ec != std::errc{} || ptr != c.data() + c.size())
                throw IoError("CSV line " + std::to_string(lineno) + ": not a number '" + c + "'");
            row.emplace_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) throw IoError("CSV is empty");
    return t;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CsvTable read_csv(const std::filesystem::path& path)
{
    return parse_csv(read_file(path));
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content)
{
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
    }
}

} // namespace greedy::tools
