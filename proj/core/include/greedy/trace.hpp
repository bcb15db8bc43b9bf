#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <vector>

namespace greedy {

/// One iteration of a greedy loop.
struct TraceRecord {
    std::size_t n = 0;
    std::size_t selected_index = 0;
    /// EIM: max over K of ||f - Pi_{n-1} f||. RBM: max over K of dist(f, X_{n-1}).
    /// OGA/CGA: ||r_n||.
    double error = 0.0;
    std::optional<double> lebesgue_upper;
    /// EIM only, when a held-out dictionary is supplied.
    std::optional<double> validation_error;
    double seconds = 0.0;
};

struct GreedyTrace {
    std::vector<TraceRecord> records;

    std::size_t size() const noexcept { return records.size(); }
    bool empty() const noexcept { return records.empty(); }
    std::vector<double> ns() const;
    std::vector<double> errors() const;
};

/// Wall-clock lap timer for the `seconds` column.
class LapTimer {
public:
    LapTimer() : last_(std::chrono::steady_clock::now()) {}
    double lap()
    {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_;
};

} // namespace greedy
