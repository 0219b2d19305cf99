#include "proxtrace/protocol/payload.hpp"

#include "proxtrace/error.hpp"
#include "proxtrace/hash.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <span>

namespace proxtrace::protocol {

namespace {

constexpr std::size_t kRecordFrameBytes = 16 + 8 + 8 + 4 + 4 + 8 * 4;
constexpr std::size_t kTagBytes = 16;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_i64(std::vector<std::uint8_t>& out, std::int64_t v) {
    put_u64(out, static_cast<std::uint64_t>(v));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

class Reader {
public:
    Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_++];
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_++];
        return v;
    }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }
    void bytes(std::uint8_t* out, std::size_t n) {
        need(n);
        std::memcpy(out, data_ + pos_, n);
        pos_ += n;
    }
    std::size_t remaining() const { return size_ - pos_; }

private:
    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;

    void need(std::size_t n) {
        if (size_ - pos_ < n) raise(errc::bad_payload, "payload truncated");
    }
};

std::array<std::uint8_t, kTagBytes> integrity_tag(const SealKey& key,
                                                  std::span<const std::uint8_t> body) {
    std::array<std::uint8_t, 16> key_lo{};
    std::array<std::uint8_t, 16> key_hi{};
    std::memcpy(key_lo.data(), key.data(), 16);
    std::memcpy(key_hi.data(), key.data() + 16, 16);
    std::array<std::uint8_t, kTagBytes> tag{};
    std::uint64_t lo = siphash24(key_lo, body);
    std::uint64_t hi = siphash24(key_hi, body);
    for (int i = 7; i >= 0; --i) {
        tag[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(lo & 0xff);
        tag[static_cast<std::size_t>(8 + i)] = static_cast<std::uint8_t>(hi & 0xff);
        lo >>= 8;
        hi >>= 8;
    }
    return tag;
}

void encode_record(std::vector<std::uint8_t>& out, const EncounterRecord& r) {
    out.insert(out.end(), r.observed_token.begin(), r.observed_token.end());
    put_i64(out, r.first_seen);
    put_i64(out, r.last_seen);
    put_u32(out, r.close_duration_s);
    put_u32(out, r.sample_count);
    put_f64(out, r.rss_sum);
    put_f64(out, r.rss_sumsq);
    put_f64(out, r.rss_min);
    put_f64(out, r.rss_max);
}

EncounterRecord decode_record(Reader& in) {
    EncounterRecord r;
    in.bytes(r.observed_token.data(), r.observed_token.size());
    r.first_seen = in.i64();
    r.last_seen = in.i64();
    r.close_duration_s = in.u32();
    r.sample_count = in.u32();
    r.rss_sum = in.f64();
    r.rss_sumsq = in.f64();
    r.rss_min = in.f64();
    r.rss_max = in.f64();
    return r;
}

} // namespace

const char* to_string(Mode m) {
    return m == Mode::centralized ? "centralized" : "decentralized";
}

SealKey default_seal_key() {
    SealKey key{};
    const char* label = "proxtrace.seal.v1";
    for (std::size_t i = 0; i < key.size(); ++i)
        key[i] = static_cast<std::uint8_t>(label[i % 17] + static_cast<int>(i));
    return key;
}

DiagnosisPayload build_diagnosis_payload(const LocalStore& store, Mode mode, bool consent) {
    if (!consent)
        raise(errc::consent_declined, "upload declined by the user; no data leaves the store");
    DiagnosisPayload p;
    p.mode = mode;
    if (mode == Mode::decentralized) {
        for (const auto& [day, seed] : store.own_seeds())
            p.seeds.push_back({static_cast<std::uint32_t>(day), seed});
    } else {
        p.records = store.records();
    }
    return p;
}

std::vector<std::uint8_t> encode_payload(const DiagnosisPayload& payload, const SealKey& key) {
    if (payload.mode == Mode::decentralized && !payload.records.empty())
        raise(errc::bad_payload, "decentralized payloads carry seeds only");

    std::vector<std::uint8_t> body;
    body.push_back(static_cast<std::uint8_t>(payload.mode));
    if (payload.mode == Mode::decentralized) {
        put_u32(body, static_cast<std::uint32_t>(payload.seeds.size()));
        for (const auto& entry : payload.seeds) {
            put_u32(body, entry.day_index);
            body.insert(body.end(), entry.seed.begin(), entry.seed.end());
        }
    } else {
        put_u32(body, static_cast<std::uint32_t>(payload.records.size()));
        std::vector<std::uint8_t> sealed;
        for (const auto& r : payload.records) encode_record(sealed, r);
        const auto tag = integrity_tag(key, sealed);
        sealed.insert(sealed.end(), tag.begin(), tag.end());
        put_u32(body, static_cast<std::uint32_t>(sealed.size()));
        body.insert(body.end(), sealed.begin(), sealed.end());
    }

    std::vector<std::uint8_t> out;
    put_u32(out, static_cast<std::uint32_t>(body.size()));
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

DiagnosisPayload decode_payload(const std::vector<std::uint8_t>& bytes, const SealKey& key) {
    Reader frame(bytes.data(), bytes.size());
    const std::uint32_t body_len = frame.u32();
    if (frame.remaining() != body_len)
        raise(errc::bad_payload, "length prefix does not match frame size");

    DiagnosisPayload p;
    const std::uint8_t mode = frame.u8();
    if (mode != static_cast<std::uint8_t>(Mode::centralized) &&
        mode != static_cast<std::uint8_t>(Mode::decentralized))
        raise(errc::bad_payload, "unknown payload mode " + std::to_string(mode));
    p.mode = static_cast<Mode>(mode);

    const std::uint32_t count = frame.u32();
    if (p.mode == Mode::decentralized) {
        for (std::uint32_t i = 0; i < count; ++i) {
            SeedEntry entry;
            entry.day_index = frame.u32();
            frame.bytes(entry.seed.data(), entry.seed.size());
            p.seeds.push_back(entry);
        }
        if (frame.remaining() != 0) raise(errc::bad_payload, "trailing bytes after seed records");
        return p;
    }

    const std::uint32_t sealed_len = frame.u32();
    if (frame.remaining() != sealed_len)
        raise(errc::bad_payload, "sealed section length mismatch");
    if (sealed_len != count * kRecordFrameBytes + kTagBytes)
        raise(errc::bad_payload, "sealed section size does not match record count");

    std::vector<std::uint8_t> sealed(sealed_len);
    frame.bytes(sealed.data(), sealed.size());

    const std::span<const std::uint8_t> records_view(sealed.data(), sealed.size() - kTagBytes);
    const auto expected = integrity_tag(key, records_view);
    if (!std::equal(expected.begin(), expected.end(), sealed.end() - kTagBytes))
        raise(errc::bad_payload, "integrity tag mismatch");

    Reader rec_reader(records_view.data(), records_view.size());
    for (std::uint32_t i = 0; i < count; ++i) p.records.push_back(decode_record(rec_reader));
    return p;
}

} // namespace proxtrace::protocol
