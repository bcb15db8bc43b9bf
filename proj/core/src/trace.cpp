#include "greedy/trace.hpp"

namespace greedy {

std::vector<double> GreedyTrace::ns() const
{
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(static_cast<double>(r.n));
    return out;
}

std::vector<double> GreedyTrace::errors() const
{
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.error);
    return out;
}

} // namespace greedy
