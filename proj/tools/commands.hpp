#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace proxtrace::tools {

/// Global CLI state shared by every subcommand.
struct GlobalArgs {
    std::optional<std::string> config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out_dir = ".";
};

int cmd_ingest(const GlobalArgs& g, const std::string& dataset_path,
               const std::optional<std::string>& schema_path);

int cmd_train(const GlobalArgs& g, const std::string& dataset_path,
              const std::optional<std::string>& schema_path,
              const std::optional<std::string>& position);

int cmd_eval(const GlobalArgs& g, const std::string& dataset_path,
             const std::optional<std::string>& schema_path, const std::string& model_path,
             const std::optional<std::string>& position, bool on_all);

int cmd_table2(const GlobalArgs& g, const std::string& phone_path, const std::string& watch_path,
               const std::optional<std::string>& phone_schema,
               const std::optional<std::string>& watch_schema, bool sweep);

int cmd_simulate(const GlobalArgs& g, const std::string& scenario_path, const std::string& mode);

int cmd_protocol_check(const GlobalArgs& g);

} // namespace proxtrace::tools
