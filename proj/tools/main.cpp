#include "commands.hpp"

#include "proxtrace/error.hpp"
#include "proxtrace/report.hpp"

#include "CLI11.hpp"

#include <functional>
#include <iostream>
#include <optional>
#include <string>

namespace {

// Exit-code contract: 0 success, 2 schema, 3 data quality, 4 empty
// stratum, 5 config. Anything else is a generic failure (1).
int map_error(const proxtrace::error& e) {
    switch (e.code()) {
    case proxtrace::errc::missing_column:
        return 2;
    case proxtrace::errc::malformed_data:
        return 3;
    case proxtrace::errc::empty_stratum:
    case proxtrace::errc::empty_training_set:
    case proxtrace::errc::empty_test_set:
        return 4;
    case proxtrace::errc::config_invalid:
        return 5;
    default:
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    using proxtrace::tools::GlobalArgs;

    CLI::App app{"BLE-RSS proximity classification and exposure-notification workbench"};
    app.set_version_flag("--version", std::string("proxtrace ") + proxtrace::kToolVersion);
    app.require_subcommand(1);
    app.fallthrough();   // accept the global flags after the subcommand too

    GlobalArgs g;
    std::string config_path;
    long long seed = 0;
    auto* config_opt =
        app.add_option("--config", config_path, "key=value training/eval config file");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed (default 0)");
    app.add_option("--out", g.out_dir, "output directory (default .)");

    std::function<int()> action;

    // ingest
    auto* ingest = app.add_subcommand("ingest", "normalize a dataset into the canonical dump");
    std::string in_dataset;
    std::optional<std::string> in_schema;
    ingest->add_option("dataset", in_dataset, "dataset file or directory")->required();
    ingest->add_option("--schema", in_schema, "column-mapping schema (default: canonical)");
    ingest->callback([&] { action = [&] { return cmd_ingest(g, in_dataset, in_schema); }; });

    // train
    auto* train = app.add_subcommand("train", "train a close/far decision tree");
    std::string tr_dataset;
    std::optional<std::string> tr_schema, tr_position;
    train->add_option("dataset", tr_dataset, "dataset file or directory")->required();
    train->add_option("--schema", tr_schema, "column-mapping schema (default: canonical)");
    train->add_option("--position", tr_position, "restrict to one position combination");
    train->callback(
        [&] { action = [&] { return cmd_train(g, tr_dataset, tr_schema, tr_position); }; });

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a tree model against the threshold baseline");
    std::string ev_dataset, ev_model;
    std::optional<std::string> ev_schema, ev_position;
    bool ev_all = false;
    eval->add_option("dataset", ev_dataset, "dataset file or directory")->required();
    eval->add_option("--model", ev_model, "tree model file")->required();
    eval->add_option("--schema", ev_schema, "column-mapping schema (default: canonical)");
    eval->add_option("--position", ev_position, "restrict to one position combination");
    eval->add_flag("--all", ev_all, "evaluate on all windows, not the held-out split");
    eval->callback([&] {
        action = [&] { return cmd_eval(g, ev_dataset, ev_schema, ev_model, ev_position, ev_all); };
    });

    // table2
    auto* table2 = app.add_subcommand(
        "table2", "per-combination accuracy table with tolerance verdicts");
    std::string t2_phone, t2_watch;
    std::optional<std::string> t2_phone_schema, t2_watch_schema;
    bool t2_sweep = false;
    table2->add_option("--phone", t2_phone, "smartphone dataset file or directory")->required();
    table2->add_option("--watch", t2_watch, "smartwatch dataset file or directory")->required();
    table2->add_option("--phone-schema", t2_phone_schema, "schema for the smartphone data");
    table2->add_option("--watch-schema", t2_watch_schema, "schema for the smartwatch data");
    table2->add_flag("--sweep", t2_sweep, "grid-sweep hyperparameters for rows out of tolerance");
    table2->callback([&] {
        action = [&] {
            return cmd_table2(g, t2_phone, t2_watch, t2_phone_schema, t2_watch_schema, t2_sweep);
        };
    });

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run an agent scenario end to end");
    std::string sim_scenario, sim_mode;
    simulate->add_option("scenario", sim_scenario, "scenario file")->required();
    simulate->add_option("--mode", sim_mode,
                         "override the protocol path: centralized, decentralized or both");
    simulate->callback([&] { action = [&] { return cmd_simulate(g, sim_scenario, sim_mode); }; });

    // protocol-check
    auto* check = app.add_subcommand("protocol-check", "self-contained protocol state checks");
    check->callback([&] { action = [&] { return cmd_protocol_check(g); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 5;   // bad usage is a config problem under the exit-code contract
    }

    if (config_opt->count() > 0) {
        g.config_path = config_path;
    }
    if (seed_opt->count() > 0) {
        g.seed = static_cast<std::uint64_t>(seed);
        g.seed_given = true;
    }

    try {
        return action();
    } catch (const proxtrace::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return map_error(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
