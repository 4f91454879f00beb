#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "aggr/core/contract_state.hpp"
#include "aggr/core/partition.hpp"

namespace aggr {

/// Contract states aligned with the times of a partition; all states share one component set.
class StatePath {
public:
    StatePath(Partition partition, std::vector<ContractState> states);

    const Partition& partition() const noexcept { return partition_; }
    const std::vector<ContractState>& states() const noexcept { return states_; }
    const ContractState& operator[](std::size_t i) const noexcept { return states_[i]; }
    std::size_t size() const noexcept { return states_.size(); }
    ComponentSet components() const noexcept {
        return states_.empty() ? ComponentSet{} : states_.front().components();
    }

private:
    Partition partition_;
    std::vector<ContractState> states_;
};

/// Runs validate_state on every state of the path.
void validate_path(const StatePath& path, double rel_tol = 1e-12);

/// StatePath CSV: header `time,<components...>`, one row per monitoring time.
/// Several paths go in one file with a leading `path` column.
void write_path_csv(std::ostream& os, const StatePath& path);
void write_paths_csv(std::ostream& os, const std::vector<StatePath>& paths);
std::vector<StatePath> read_paths_csv(std::istream& is);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
/// Strict full-string parse; throws ParseError.
double parse_double(std::string_view text, std::size_t line = 0);

} // namespace aggr
