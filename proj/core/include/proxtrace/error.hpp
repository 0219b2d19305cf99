#pragma once

#include <stdexcept>
#include <string>

namespace proxtrace {

enum class errc {
    missing_column,
    malformed_data,
    mixed_strata,
    empty_stratum,
    empty_training_set,
    empty_test_set,
    empty_node,
    feature_index_out_of_range,
    slot_out_of_range,
    clock_regression,
    consent_declined,
    unknown_device,
    degenerate_distances,
    nonpositive_distance,
    config_invalid,
    bad_payload,
    io_error,
};

/// Library-wide exception. `code()` maps onto the CLI exit-code contract.
class error : public std::runtime_error {
public:
    error(errc code, std::string what) : std::runtime_error(std::move(what)), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

inline const char* errc_name(errc c) {
    switch (c) {
    case errc::missing_column: return "MissingColumn";
    case errc::malformed_data: return "MalformedData";
    case errc::mixed_strata: return "MixedStrata";
    case errc::empty_stratum: return "EmptyStratum";
    case errc::empty_training_set: return "EmptyTrainingSet";
    case errc::empty_test_set: return "EmptyTestSet";
    case errc::empty_node: return "EmptyNode";
    case errc::feature_index_out_of_range: return "FeatureIndexOutOfRange";
    case errc::slot_out_of_range: return "SlotOutOfRange";
    case errc::clock_regression: return "ClockRegression";
    case errc::consent_declined: return "ConsentDeclined";
    case errc::unknown_device: return "UnknownDevice";
    case errc::degenerate_distances: return "DegenerateDistances";
    case errc::nonpositive_distance: return "NonpositiveDistance";
    case errc::config_invalid: return "ConfigInvalid";
    case errc::bad_payload: return "BadPayload";
    case errc::io_error: return "IoError";
    }
    return "UnknownError";
}

[[noreturn]] inline void raise(errc code, const std::string& detail) {
    throw error(code, std::string(errc_name(code)) + ": " + detail);
}

} // namespace proxtrace
