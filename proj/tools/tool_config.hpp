#pragma once

#include "proxtrace/classify/tree.hpp"
#include "proxtrace/ingest/features.hpp"

#include <iosfwd>
#include <string>

namespace proxtrace::tools {

/// Training/evaluation knobs shared by the dataset commands.
///
/// Key=value text, `#` comments. Recognized keys:
///   max_depth              tree depth cap (default 8)
///   min_leaf               minimum windows per leaf (default 5)
///   min_impurity_decrease  split gain floor (default 0)
///   train_fraction         stratified split fraction (default 0.8)
///   cutoff_m               close/far distance boundary (default 2.0)
///   cutoff_dbm             naive RSS threshold baseline (default -80)
///   tolerance_pp           accuracy tolerance in percentage points (default 3.0)
///   window                 per-sample | time:<seconds> | count:<n>
struct ToolConfig {
    classify::TreeParams tree;
    double train_fraction = 0.8;
    double cutoff_m = 2.0;
    double cutoff_dbm = -80.0;
    double tolerance_pp = 3.0;
    ingest::WindowSpec window = ingest::WindowSpec::per_sample();
};

/// Throws errc::config_invalid on unknown keys or bad values.
ToolConfig parse_tool_config(std::istream& in);
ToolConfig load_tool_config(const std::string& path);

} // namespace proxtrace::tools
