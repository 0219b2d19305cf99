#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace proxtrace::protocol {

/// Secret from which one day's ephemeral tokens are derived. Uploading it
/// upon diagnosis lets other devices re-derive the day's tokens locally.
using DailySeed = std::array<std::uint8_t, 32>;

/// 16-byte rotating token broadcast instead of a stable identity.
using Token = std::array<std::uint8_t, 16>;

constexpr std::int64_t kSecondsPerDay = 86400;
constexpr int kDefaultRotationPeriodS = 900;   // 15 min, 96 slots per day

struct EphemeralId {
    Token token{};
    std::int64_t valid_from = 0;
    std::int64_t valid_to = 0;
};

int slots_per_day(int rotation_period_s);

/// Keyed-hash token for (seed, slot): two SipHash-2-4 lanes keyed by the
/// seed halves over the slot index. Same inputs always give the same
/// token; distinct slots collide only with negligible probability.
Token derive_token(const DailySeed& seed, std::uint32_t slot);

/// Token plus its validity window within day `day_index`. Throws
/// errc::slot_out_of_range when slot >= 86400 / rotation_period_s.
EphemeralId rotate_id(const DailySeed& seed, std::uint32_t slot, int rotation_period_s,
                      std::int64_t day_index = 0);

/// All tokens of one day, indexed by slot.
std::vector<Token> day_tokens(const DailySeed& seed, int rotation_period_s);

std::int64_t day_of(std::int64_t t);
std::uint32_t slot_of(std::int64_t t, int rotation_period_s);

/// Deterministic seed derivation for simulations and tests: a labelled
/// expansion of (root, actor, day).
DailySeed make_seed(std::uint64_t root, std::uint64_t actor, std::uint64_t day);

} // namespace proxtrace::protocol
