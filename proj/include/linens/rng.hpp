// Counter-seeded RNG with named streams. Identical (seed, stream) pairs
// reproduce identical draws, which the whole harness relies on for
// byte-identical reruns and serial/parallel equivalence.
#pragma once

#include <cstdint>
#include <cmath>
#include <stdexcept>

namespace linens {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix2(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
    std::uint64_t s = x;
    return splitmix64(s);
}

} // namespace detail

// Value type naming one reproducible random stream.
struct RngHandle {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    // Derived stream for replica/worker i; collision-resistant hash of ids.
    RngHandle child(std::uint64_t i) const {
        return RngHandle{seed, detail::mix2(stream + 1, i + 0x517CC1B727220A95ULL)};
    }
};

// xoshiro256++ seeded via splitmix64 over (seed, stream).
class Rng {
  public:
    explicit Rng(RngHandle h) {
        std::uint64_t s = detail::mix2(h.seed, h.stream);
        for (int i = 0; i < 4; ++i) state_[i] = detail::splitmix64(s);
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t next_u64() {
        auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on the open interval (0,1); never returns an exact endpoint.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Standard normal via Box-Muller; the companion draw is cached in-state.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

  private:
    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace linens
