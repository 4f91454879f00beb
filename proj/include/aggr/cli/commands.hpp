#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "aggr/cli/config.hpp"
#include "aggr/core/partition.hpp"
#include "aggr/core/seed.hpp"
#include "aggr/models/model_spec.hpp"

namespace aggr::cli {

enum ExitCode : int {
    kSuccess = 0,
    kValidationFailure = 1,
    kCheckFailure = 2,
    kNumericError = 3,
};

struct RunContext {
    std::filesystem::path out_dir = ".";
    std::size_t threads = 1;
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;
};

/// [model] kind = gbm | merton | heston with that model's parameters, F0 and T.
ModelSpec model_from_config(const Config& cfg);
/// [model] mode = closed_form | nested_mc, m_inner.
StateMode state_mode_from_config(const Config& cfg);
/// regular(N), random(N) or times(t0, t1, ..., T); random partitions draw from stream 1000 + index.
Partition parse_partition(const std::string& text, double T, const SeedSpec& seed, std::size_t index = 0);

int cmd_ap_check(const Config& cfg, const RunContext& ctx);
int cmd_bias(const Config& cfg, const RunContext& ctx);
int cmd_efficiency(const Config& cfg, const RunContext& ctx);
int cmd_figures(const Config& cfg, const RunContext& ctx);
int cmd_replicate(const Config& cfg, const RunContext& ctx);
int cmd_premium(const Config& cfg, const RunContext& ctx);
int cmd_simulate(const Config& cfg, const RunContext& ctx);

/// Full command line: `<subcommand> [config] [--config path] [--out dir] [--threads n]`.
/// Maps library errors onto exit codes and reports them on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace aggr::cli
