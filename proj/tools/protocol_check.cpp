#include "commands.hpp"

#include "tool_io.hpp"

#include "proxtrace/error.hpp"
#include "proxtrace/protocol/payload.hpp"
#include "proxtrace/protocol/server.hpp"
#include "proxtrace/protocol/store.hpp"
#include "proxtrace/protocol/token.hpp"
#include "proxtrace/report.hpp"
#include "proxtrace/sim/run.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace proxtrace::tools {

namespace {

using namespace proxtrace::protocol;

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string note;
};

bool expect(bool cond, std::string& note, const std::string& what) {
    if (!cond && note.empty()) {
        note = what;
    }
    return cond;
}

CheckResult check_rotation() {
    CheckResult r{"token-rotation", false, ""};
    const auto seed = make_seed(7, 1, 0);
    bool ok = expect(slots_per_day(900) == 96, r.note, "expected 96 slots at 900 s");
    const auto tokens = day_tokens(seed, 900);
    std::set<Token> distinct(tokens.begin(), tokens.end());
    ok &= expect(distinct.size() == 96, r.note, "day tokens must be pairwise distinct");
    const auto first = rotate_id(seed, 0, 900);
    const auto last = rotate_id(seed, 95, 900);
    ok &= expect(first.valid_from == 0 && first.valid_to == 900, r.note,
                 "slot 0 window must be [0, 900)");
    ok &= expect(last.valid_to == kSecondsPerDay, r.note, "slot 95 must end the day");
    try {
        rotate_id(seed, 96, 900);
        ok = expect(false, r.note, "slot 96 must be rejected");
    } catch (const error& e) {
        ok &= expect(e.code() == errc::slot_out_of_range, r.note, "wrong error for slot 96");
    }
    r.pass = ok;
    return r;
}

CheckResult check_token_determinism() {
    CheckResult r{"token-determinism", false, ""};
    const auto seed = make_seed(11, 2, 5);
    bool ok = expect(derive_token(seed, 3) == derive_token(seed, 3), r.note,
                     "same (seed, slot) must repeat");
    ok &= expect(derive_token(seed, 3) != derive_token(seed, 4), r.note,
                 "different slots must differ");
    ok &= expect(make_seed(11, 2, 5) != make_seed(11, 2, 6), r.note,
                 "different days must give different seeds");
    r.pass = ok;
    return r;
}

LocalStore store_with_history() {
    LocalStore store(14, StoreParams{300, 1});
    store.add_own_seed(0, make_seed(21, 0, 0), 900);
    const auto other = make_seed(21, 1, 0);
    for (int t = 0; t < 1200; ++t) {
        store.record_encounter(derive_token(other, slot_of(t, 900)), -58.5, t,
                               ProximityLabel::close);
    }
    return store;
}

CheckResult check_payload_roundtrip() {
    CheckResult r{"payload-roundtrip", false, ""};
    const auto store = store_with_history();
    const auto key = default_seal_key();
    bool ok = true;
    for (const Mode mode : {Mode::decentralized, Mode::centralized}) {
        const auto payload = build_diagnosis_payload(store, mode, true);
        const auto bytes = encode_payload(payload, key);
        const auto back = decode_payload(bytes, key);
        ok &= expect(back.mode == payload.mode && back.seeds == payload.seeds &&
                         back.records == payload.records,
                     r.note, "decode must reproduce the payload");
    }
    // The sealed log must reject both tampering and a foreign key.
    auto sealed = encode_payload(build_diagnosis_payload(store, Mode::centralized, true), key);
    sealed[sealed.size() / 2] ^= 0x01;
    try {
        decode_payload(sealed, key);
        ok = expect(false, r.note, "tampered sealed log must be rejected");
    } catch (const error& e) {
        ok &= expect(e.code() == errc::bad_payload, r.note, "wrong error for tampering");
    }
    auto wrong_key = key;
    wrong_key[0] ^= 0xff;
    try {
        decode_payload(encode_payload(build_diagnosis_payload(store, Mode::centralized, true), key),
                       wrong_key);
        ok = expect(false, r.note, "foreign key must fail the integrity check");
    } catch (const error& e) {
        ok &= expect(e.code() == errc::bad_payload, r.note, "wrong error for foreign key");
    }
    r.pass = ok;
    return r;
}

CheckResult check_consent_gate() {
    CheckResult r{"consent-gate", false, ""};
    const auto store = store_with_history();
    try {
        build_diagnosis_payload(store, Mode::decentralized, false);
        r.note = "upload without consent must be refused";
    } catch (const error& e) {
        r.pass = e.code() == errc::consent_declined;
        if (!r.pass) r.note = "wrong error for declined consent";
    }
    return r;
}

CheckResult check_retention_purge() {
    CheckResult r{"retention-purge", false, ""};
    LocalStore store(14, StoreParams{300, 1});
    const auto old_seed = make_seed(31, 1, 0);
    const auto new_seed = make_seed(31, 2, 20);
    store.record_encounter(derive_token(old_seed, 0), -70.0, 100, ProximityLabel::close);
    const std::int64_t now = 20 * kSecondsPerDay;
    store.record_encounter(derive_token(new_seed, 0), -70.0, now - 3600, ProximityLabel::close);
    const std::size_t purged = store.purge_expired(now);
    bool ok = expect(purged == 1 && store.records().size() == 1, r.note,
                     "purge must drop exactly the stale record");
    const std::int64_t horizon = now - 14 * kSecondsPerDay;
    for (const auto& rec : store.records()) {
        ok &= expect(rec.last_seen >= horizon, r.note, "survivor older than retention");
    }
    ok &= expect(store.purge_expired(now) == 0, r.note, "purge must be idempotent");
    r.pass = ok;
    return r;
}

sim::ScenarioConfig small_world() {
    sim::ScenarioConfig cfg;
    cfg.duration_s = 1800;
    cfg.scan_interval_s = 1;
    cfg.cutoff_m = 2.0;
    cfg.rng_seed = 99;
    cfg.channel = {-60.0, 2.0, 0.0};
    cfg.agents = {
        {"alice", {{{0.0, 0.0, 0.0}}}},
        {"bob", {{{0.0, 1.0, 0.0}}}},
        {"carol", {{{0.0, 40.0, 0.0}}}},
    };
    cfg.diagnoses = {{"alice", 1800}};
    return cfg;
}

CheckResult check_mode_equivalence() {
    CheckResult r{"mode-equivalence", false, ""};
    auto cfg = small_world();
    const auto classifier = sim::make_classifier(cfg);
    cfg.mode = Mode::centralized;
    const auto cen = sim::run_scenario(cfg, *classifier);
    cfg.mode = Mode::decentralized;
    const auto dec = sim::run_scenario(cfg, *classifier);
    bool ok = expect(cen.alerted_pairs == dec.alerted_pairs, r.note,
                     "modes must alert identical pair-days");
    ok &= expect(cen.alerted_pairs == std::set<sim::PairKey>{{"alice", "bob", 0}}, r.note,
                 "expected exactly the alice-bob day-0 alert");
    r.pass = ok;
    return r;
}

CheckResult check_decentral_privacy() {
    CheckResult r{"decentral-privacy", false, ""};
    DecentralServer server(14);
    server.register_device("x", 0);
    server.register_device("y", 0);
    const auto store = store_with_history();
    const auto key = default_seal_key();
    const auto seeds_bytes =
        encode_payload(build_diagnosis_payload(store, Mode::decentralized, true), key);
    const auto deliveries = server.broadcast(seeds_bytes, 100);
    bool ok = expect(deliveries.size() == 2, r.note, "broadcast must reach every device");
    for (const auto& retained : server.retained_payloads()) {
        const auto decoded = decode_payload(retained.payload, key);
        ok &= expect(decoded.mode == Mode::decentralized && decoded.records.empty(), r.note,
                     "relay state may hold seeds only");
    }
    try {
        server.broadcast(encode_payload(build_diagnosis_payload(store, Mode::centralized, true), key),
                         200);
        ok = expect(false, r.note, "relay must refuse encounter-log payloads");
    } catch (const error& e) {
        ok &= expect(e.code() == errc::bad_payload, r.note, "wrong error for log payload");
    }
    r.pass = ok;
    return r;
}

CheckResult check_central_targeting() {
    CheckResult r{"central-targeting", false, ""};
    const auto key = default_seal_key();
    CentralServer server(key, 900, 900);
    for (const char* id : {"diag", "near", "stranger"}) {
        server.register_device(id);
    }
    const auto diag_seed = make_seed(41, 0, 0);
    const auto unrelated = make_seed(41, 9, 0);
    server.submit_seed("diag", 0, diag_seed);

    LocalStore near_store(14);
    for (int t = 0; t < 1100; ++t) {
        near_store.record_encounter(derive_token(diag_seed, slot_of(t, 900)), -60.0, t,
                                    ProximityLabel::close);
    }
    LocalStore stranger_store(14);
    for (int t = 0; t < 1100; ++t) {
        stranger_store.record_encounter(derive_token(unrelated, slot_of(t, 900)), -60.0, t,
                                        ProximityLabel::close);
    }
    LocalStore diag_store(14);
    diag_store.add_own_seed(0, diag_seed, 900);

    server.upload_log("near",
                      encode_payload(build_diagnosis_payload(near_store, Mode::centralized, true), key));
    server.upload_log(
        "stranger",
        encode_payload(build_diagnosis_payload(stranger_store, Mode::centralized, true), key));
    const auto diag_bytes =
        encode_payload(build_diagnosis_payload(diag_store, Mode::centralized, true), key);
    const auto results = server.match_diagnosis("diag", diag_bytes);

    bool ok = expect(results.size() == 1, r.note, "only token holders may be alerted");
    if (results.size() == 1) {
        ok &= expect(results[0].device == "near", r.note, "wrong device alerted");
        ok &= expect(!results[0].alerts.empty() && results[0].alerts[0].triggered, r.note,
                     "a 1099-second contact must trigger");
    }
    r.pass = ok;
    return r;
}

} // namespace

int cmd_protocol_check(const GlobalArgs& g) {
    auto manifest = start_manifest(g, "protocol-check");
    const std::vector<std::function<CheckResult()>> checks = {
        check_rotation,        check_token_determinism, check_payload_roundtrip,
        check_consent_gate,    check_retention_purge,   check_mode_equivalence,
        check_decentral_privacy, check_central_targeting,
    };
    std::ostringstream report;
    bool all_pass = true;
    for (const auto& run : checks) {
        CheckResult result;
        try {
            result = run();
        } catch (const std::exception& e) {
            result.pass = false;
            result.note = e.what();
        }
        all_pass &= result.pass;
        report << result.name << ": " << (result.pass ? "PASS" : "FAIL");
        if (!result.pass && !result.note.empty()) {
            report << " (" << result.note << ")";
        }
        report << '\n';
    }
    report << (all_pass ? "all checks passed\n" : "checks failed\n");
    write_file(fs::path(g.out_dir) / "protocol.report.txt", report.str());
    finish_manifest(manifest, g);
    std::cout << report.str();
    return all_pass ? 0 : 1;
}

} // namespace proxtrace::tools
