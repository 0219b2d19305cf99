#include "proxtrace/protocol/token.hpp"

#include "proxtrace/error.hpp"
#include "proxtrace/hash.hpp"

#include <cstring>

namespace proxtrace::protocol {

namespace {

void store_le64(std::uint8_t* out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out[i] = static_cast<std::uint8_t>(v & 0xff);
        v >>= 8;
    }
}

} // namespace

int slots_per_day(int rotation_period_s) {
    if (rotation_period_s <= 0 || rotation_period_s > kSecondsPerDay)
        raise(errc::config_invalid, "rotation period must be in 1..86400 s");
    return static_cast<int>(kSecondsPerDay / rotation_period_s);
}

Token derive_token(const DailySeed& seed, std::uint32_t slot) {
    std::array<std::uint8_t, 16> key_lo{};
    std::array<std::uint8_t, 16> key_hi{};
    std::memcpy(key_lo.data(), seed.data(), 16);
    std::memcpy(key_hi.data(), seed.data() + 16, 16);

    std::array<std::uint8_t, 8> msg{};
    store_le64(msg.data(), slot);

    Token token{};
    store_le64(token.data(), siphash24(key_lo, msg));
    store_le64(token.data() + 8, siphash24(key_hi, msg));
    return token;
}

EphemeralId rotate_id(const DailySeed& seed, std::uint32_t slot, int rotation_period_s,
                      std::int64_t day_index) {
    const int slots = slots_per_day(rotation_period_s);
    if (slot >= static_cast<std::uint32_t>(slots))
        raise(errc::slot_out_of_range,
              "slot " + std::to_string(slot) + " outside 0.." + std::to_string(slots - 1));
    EphemeralId id;
    id.token = derive_token(seed, slot);
    id.valid_from = day_index * kSecondsPerDay + static_cast<std::int64_t>(slot) * rotation_period_s;
    id.valid_to = id.valid_from + rotation_period_s;
    return id;
}

std::vector<Token> day_tokens(const DailySeed& seed, int rotation_period_s) {
    const int slots = slots_per_day(rotation_period_s);
    std::vector<Token> out;
    out.reserve(static_cast<std::size_t>(slots));
    for (int s = 0; s < slots; ++s) out.push_back(derive_token(seed, static_cast<std::uint32_t>(s)));
    return out;
}

std::int64_t day_of(std::int64_t t) {
    return t >= 0 ? t / kSecondsPerDay : (t - kSecondsPerDay + 1) / kSecondsPerDay;
}

std::uint32_t slot_of(std::int64_t t, int rotation_period_s) {
    const std::int64_t day_start = day_of(t) * kSecondsPerDay;
    return static_cast<std::uint32_t>((t - day_start) / rotation_period_s);
}

DailySeed make_seed(std::uint64_t root, std::uint64_t actor, std::uint64_t day) {
    DailySeed seed{};
    std::array<std::uint8_t, 16> key{};
    store_le64(key.data(), root);
    store_le64(key.data() + 8, actor);
    std::array<std::uint8_t, 16> msg{};
    store_le64(msg.data(), day);
    for (std::uint8_t lane = 0; lane < 4; ++lane) {
        msg[8] = lane;
        store_le64(seed.data() + lane * 8, siphash24(key, msg));
    }
    return seed;
}

} // namespace proxtrace::protocol
