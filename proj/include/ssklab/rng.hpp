#pragma once

#include <array>
#include <cstdint>

namespace ssklab {

std::uint64_t splitmix64(std::uint64_t x);

// Seed for stream `index` under `master`; used for per-trial streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Philox4x32-10 block function (Salmon et al. counter-based generator).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

// Sequential stream over Philox blocks keyed by a 64-bit seed. All variates
// are generated with hand-written transforms so streams are identical across
// standard libraries.
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() { return next_u64(); }

    std::uint64_t next_u64();
    double uniform();          // [0, 1)
    double uniform_open();     // (0, 1]
    double normal();           // standard Gaussian, Box-Muller
    double gamma(double shape);  // unit scale, Marsaglia-Tsang
    double chi(double dof);
    double rademacher();

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ssklab
