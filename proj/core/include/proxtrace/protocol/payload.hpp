#pragma once

#include "proxtrace/protocol/store.hpp"
#include "proxtrace/protocol/token.hpp"

#include <cstdint>
#include <vector>

namespace proxtrace::protocol {

enum class Mode : std::uint8_t { centralized = 0x01, decentralized = 0x02 };

const char* to_string(Mode m);

/// Key of the keyed integrity tag on sealed centralized logs. A reversible
/// framing plus tag, not encryption; stands in for the real sealing scheme
/// deployed systems would use.
using SealKey = std::array<std::uint8_t, 32>;

SealKey default_seal_key();

struct SeedEntry {
    std::uint32_t day_index = 0;
    DailySeed seed{};

    bool operator==(const SeedEntry&) const = default;
};

/// What an infected user uploads. Decentralized mode carries daily seeds
/// only — by construction it cannot transport encounter records.
/// Centralized mode carries the device's encounter log, sealed on the wire.
struct DiagnosisPayload {
    Mode mode = Mode::decentralized;
    std::vector<SeedEntry> seeds;             // decentralized
    std::vector<EncounterRecord> records;     // centralized
};

/// Builds the upload for a diagnosed device. Throws errc::consent_declined
/// when consent is false — nothing leaves the store in that case.
DiagnosisPayload build_diagnosis_payload(const LocalStore& store, Mode mode, bool consent);

/// Wire format (integers big-endian):
///   u32 body_len
///   u8  mode (0x01 centralized, 0x02 decentralized)
///   u32 count
///   decentralized: count * { u32 day_index, u8 seed[32] }
///   centralized:   u32 sealed_len, sealed section
/// Sealed section = count record frames followed by a 16-byte SipHash tag
/// over the frames, keyed by the seal key halves.
///   record frame: u8 token[16], i64 first_seen, i64 last_seen,
///                 u32 close_duration_s, u32 sample_count,
///                 f64 rss_sum, f64 rss_sumsq, f64 rss_min, f64 rss_max
/// Encoding then decoding reproduces the payload exactly.
std::vector<std::uint8_t> encode_payload(const DiagnosisPayload& payload, const SealKey& key);

/// Throws errc::bad_payload on truncation, trailing bytes, unknown mode, or
/// an integrity-tag mismatch.
DiagnosisPayload decode_payload(const std::vector<std::uint8_t>& bytes, const SealKey& key);

} // namespace proxtrace::protocol
