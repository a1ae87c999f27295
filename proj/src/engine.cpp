#include "collapse/engine.hpp"

namespace collapse {

void LoopConfig::validate() const {
    workflow.validate();
    if (n_per_iteration < 2) throw Error(ErrorCode::InvalidArgument, "n_per_iteration must be >= 2");
    if (num_iterations < 1) throw Error(ErrorCode::InvalidArgument, "num_iterations must be >= 1");
    if (workflow.subsample_size && *workflow.subsample_size > n_per_iteration)
        throw Error(ErrorCode::PoolExhausted, "subsample size exceeds n_per_iteration");
}

// Floyd's algorithm: O(count) draws regardless of population size.
std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t count,
                                                    RngStream& rng) {
    if (count > population)
        throw Error(ErrorCode::PoolExhausted, "cannot draw " + std::to_string(count) + " of " +
                                                  std::to_string(population));
    std::unordered_set<std::size_t> chosen;
    chosen.reserve(count * 2);
    std::vector<std::size_t> out;
    out.reserve(count);
    for (std::size_t j = population - count; j < population; ++j) {
        const auto r = static_cast<std::size_t>(rng.uniform_index(j + 1));
        const std::size_t pick = chosen.insert(r).second ? r : j;
        if (pick == j) chosen.insert(j);
        out.push_back(pick);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace collapse
