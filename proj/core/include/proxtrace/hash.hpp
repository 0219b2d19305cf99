#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <span>
#include <string>

namespace proxtrace {

/// SipHash-2-4 with a 128-bit key, 64-bit output. Used as the keyed hash
/// behind ephemeral-token derivation and payload integrity tags. Not a
/// general-purpose cryptographic MAC in this artifact, but a proper PRF
/// with the right collision behaviour for the protocol tests.
std::uint64_t siphash24(const std::array<std::uint8_t, 16>& key,
                        std::span<const std::uint8_t> msg);

/// FNV-1a 64-bit, used for content digests in run manifests.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::string u64_hex(std::uint64_t v);

} // namespace proxtrace
