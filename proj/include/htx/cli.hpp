#pragma once

// Batch experiment driver: a JSON config names one experiment (solve,
// expand, bound, magnus, mc-l2, compare) and the modules it composes; every
// run writes result CSVs plus a manifest that echoes the config and lists
// all outputs, with no timestamps, so identical configs give byte-identical
// artifacts.

#include <string>
#include <vector>

#include <json.hpp>

namespace htx {

struct RunResult {
  int status = 0;
  std::vector<std::string> outputs;  // files written, manifest last
  std::vector<std::string> warnings;
};

// Reads and parses a config file; parse failures throw with line/column.
nlohmann::json load_config(const std::string& path);

// Structural and invariant checks without running anything heavy; returns
// advisory warnings (e.g. alpha outside the window (1 - beta, 1/2)).
std::vector<std::string> validate_config(const nlohmann::json& cfg);

// Executes the configured experiment.  `out_override` (from --out or the
// HTX_OUT environment variable) replaces the config's out_dir when nonempty;
// `threads` caps worker counts for experiments that parallelize.
RunResult run_experiment(const nlohmann::json& cfg,
                         const std::string& out_override, int threads);

// 17-significant-digit float rendering shared by every CSV writer.
std::string csv_num(double v);

}  // namespace htx
