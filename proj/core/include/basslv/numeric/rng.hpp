#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace basslv {

/// Counter-based generator (Philox 4x32-10). A stream is addressed by
/// (seed, stream); draws are addressed by a 64-bit counter within the
/// stream, so results do not depend on evaluation order or thread
/// scheduling. rng_version() is recorded in simulation outputs.
class Philox {
  public:
    Philox(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    /// Four 32-bit words for block index `ctr`.
    std::array<std::uint32_t, 4> block(std::uint64_t ctr) const;

    /// k-th uniform draw in (0,1), double precision (53 bits).
    double uniform(std::uint64_t k) const;

    /// k-th standard normal draw (inverse-CDF of uniform(k)).
    double normal(std::uint64_t k) const;

  private:
    std::uint64_t seed_, stream_;
};

const std::string& rng_version();

}  // namespace basslv
