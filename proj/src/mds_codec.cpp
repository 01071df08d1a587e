#include "mobicache/mds_codec.hpp"

#include <stdexcept>
#include <string>

namespace mobicache {

Gf256::Gf256() {
    unsigned x = 1;
    for (std::size_t i = 0; i < 255; ++i) {
        exp_[i] = static_cast<std::uint8_t>(x);
        log_[x] = static_cast<std::uint16_t>(i);
        x <<= 1;
        if (x & 0x100) x ^= 0x11D;
    }
    // Doubled antilog table avoids a modulo in mul.
    for (std::size_t i = 255; i < exp_.size(); ++i) exp_[i] = exp_[i - 255];
}

const Gf256& Gf256::standard() {
    static const Gf256 field;
    return field;
}

Gf256 Gf256::with_corrupted_exp(std::size_t index, std::uint8_t value) {
    Gf256 f = standard();
    f.exp_.at(index) = value;
    return f;
}

std::uint8_t Gf256::inv(std::uint8_t a) const {
    if (a == 0) throw std::domain_error("GF(256): zero has no inverse");
    return exp_[255 - log_[a]];
}

std::uint8_t Gf256::pow(std::uint8_t a, std::size_t e) const {
    if (e == 0) return 1;
    if (a == 0) return 0;
    return exp_[(static_cast<std::size_t>(log_[a]) * e) % 255];
}

std::vector<CodedSubpacket> MdsCodec::encode(std::span<const std::vector<std::uint8_t>> subpackets, std::size_t r,
                                             std::size_t content_id) const {
    const std::size_t K = subpackets.size();
    if (K == 0) throw std::invalid_argument("encode: need at least one subpacket");
    if (K > r) throw std::invalid_argument("encode: K exceeds r");
    if (r > 255) throw std::invalid_argument("encode: r exceeds 255 distinct field points");
    const std::size_t len = subpackets[0].size();
    for (const auto& s : subpackets)
        if (s.size() != len) throw std::invalid_argument("encode: subpackets differ in length");

    std::vector<CodedSubpacket> out(r);
    for (std::size_t v = 0; v < r; ++v) {
        const auto x = static_cast<std::uint8_t>(v + 1);
        auto& c = out[v];
        c.content_id = content_id;
        c.encoding_point = x;
        c.payload.assign(len, 0);
        std::uint8_t coeff = 1;  // x^(j-1)
        for (std::size_t j = 0; j < K; ++j) {
            for (std::size_t b = 0; b < len; ++b) c.payload[b] ^= gf_->mul(coeff, subpackets[j][b]);
            coeff = gf_->mul(coeff, x);
        }
    }
    return out;
}

std::vector<std::vector<std::uint8_t>> MdsCodec::decode(std::span<const CodedSubpacket> coded, std::size_t K) const {
    if (K == 0 || coded.size() != K)
        throw std::invalid_argument("decode: expected exactly " + std::to_string(K) + " coded subpackets, got " +
                                    std::to_string(coded.size()));
    const std::size_t len = coded[0].payload.size();
    bool seen[256] = {};
    for (const auto& c : coded) {
        if (c.content_id != coded[0].content_id) throw std::invalid_argument("decode: mixed contents");
        if (c.payload.size() != len) throw std::invalid_argument("decode: payloads differ in length");
        if (seen[c.encoding_point]) throw std::invalid_argument("decode: duplicate encoding point (singular system)");
        seen[c.encoding_point] = true;
    }

    // Augmented system [V | payloads], row i = (1, x_i, x_i^2, ...).
    std::vector<std::vector<std::uint8_t>> A(K, std::vector<std::uint8_t>(K));
    std::vector<std::vector<std::uint8_t>> B(K);
    for (std::size_t i = 0; i < K; ++i) {
        std::uint8_t coeff = 1;
        for (std::size_t j = 0; j < K; ++j) {
            A[i][j] = coeff;
            coeff = gf_->mul(coeff, coded[i].encoding_point);
        }
        B[i] = coded[i].payload;
    }

    for (std::size_t col = 0; col < K; ++col) {
        std::size_t piv = col;
        while (piv < K && A[piv][col] == 0) ++piv;
        if (piv == K) throw std::invalid_argument("decode: singular system");
        std::swap(A[piv], A[col]);
        std::swap(B[piv], B[col]);
        const std::uint8_t s = gf_->inv(A[col][col]);
        for (auto& v : A[col]) v = gf_->mul(v, s);
        for (auto& v : B[col]) v = gf_->mul(v, s);
        for (std::size_t row = 0; row < K; ++row) {
            if (row == col || A[row][col] == 0) continue;
            const std::uint8_t f = A[row][col];
            for (std::size_t j = col; j < K; ++j) A[row][j] ^= gf_->mul(f, A[col][j]);
            for (std::size_t b = 0; b < len; ++b) B[row][b] ^= gf_->mul(f, B[col][b]);
        }
    }
    return B;
}

}  // namespace mobicache
