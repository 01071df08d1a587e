#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mobicache {

/// GF(2^8) arithmetic with reduction polynomial x^8 + x^4 + x^3 + x^2 + 1
/// (0x11D) and generator 2, backed by log/antilog tables.
class Gf256 {
public:
    Gf256();

    /// Shared instance with intact tables.
    static const Gf256& standard();

    /// Copy of the standard field with one antilog entry overwritten; used to
    /// check that the self-test notices broken arithmetic.
    static Gf256 with_corrupted_exp(std::size_t index, std::uint8_t value);

    static std::uint8_t add(std::uint8_t a, std::uint8_t b) { return a ^ b; }
    std::uint8_t mul(std::uint8_t a, std::uint8_t b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[log_[a] + log_[b]];
    }
    std::uint8_t inv(std::uint8_t a) const;  // throws on a == 0
    std::uint8_t div(std::uint8_t a, std::uint8_t b) const { return mul(a, inv(b)); }
    std::uint8_t pow(std::uint8_t a, std::size_t e) const;

private:
    std::array<std::uint8_t, 512> exp_{};
    std::array<std::uint16_t, 256> log_{};
};

struct CodedSubpacket {
    std::size_t content_id = 0;
    std::uint8_t encoding_point = 0;
    std::vector<std::uint8_t> payload;
};

/// Non-systematic Vandermonde (r, K) MDS code: the coded subpacket at point x
/// is sum_j x^(j-1) * F_j. Points are 1..r, so r <= 255.
class MdsCodec {
public:
    explicit MdsCodec(const Gf256& field = Gf256::standard()) : gf_(&field) {}

    /// Throws std::invalid_argument for K == 0, K > r, r > 255 or ragged payloads.
    std::vector<CodedSubpacket> encode(std::span<const std::vector<std::uint8_t>> subpackets, std::size_t r,
                                       std::size_t content_id = 0) const;

    /// Recovers the K original subpackets from exactly K coded ones with
    /// distinct points. Throws std::invalid_argument on a wrong count,
    /// duplicate points, mixed contents or ragged payloads.
    std::vector<std::vector<std::uint8_t>> decode(std::span<const CodedSubpacket> coded, std::size_t K) const;

private:
    const Gf256* gf_;
};

}  // namespace mobicache
