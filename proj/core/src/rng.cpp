#include "basslv/numeric/rng.hpp"

#include "basslv/numeric/normal.hpp"

namespace basslv {

namespace {
constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::uint32_t* c, std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t n0 = hi1 ^ c[1] ^ k0;
    const std::uint32_t n1 = lo1;
    const std::uint32_t n2 = hi0 ^ c[3] ^ k1;
    const std::uint32_t n3 = lo0;
    c[0] = n0;
    c[1] = n1;
    c[2] = n2;
    c[3] = n3;
}
}  // namespace

std::array<std::uint32_t, 4> Philox::block(std::uint64_t ctr) const {
    std::uint32_t c[4] = {static_cast<std::uint32_t>(ctr), static_cast<std::uint32_t>(ctr >> 32),
                          static_cast<std::uint32_t>(stream_),
                          static_cast<std::uint32_t>(stream_ >> 32)};
    std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);
    for (int r = 0; r < 10; ++r) {
        round_once(c, k0, k1);
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return {c[0], c[1], c[2], c[3]};
}

double Philox::uniform(std::uint64_t k) const {
    const auto b = block(k >> 1);
    const int half = static_cast<int>(k & 1u) * 2;
    const std::uint64_t bits =
        (static_cast<std::uint64_t>(b[half]) << 32) | b[half + 1];
    // 53-bit mantissa, strictly inside (0,1)
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double Philox::normal(std::uint64_t k) const { return norm_ppf(uniform(k)); }

const std::string& rng_version() {
    static const std::string v = "philox4x32-10/invcdf-v1";
    return v;
}

}  // namespace basslv
