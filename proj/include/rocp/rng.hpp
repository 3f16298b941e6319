#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rocp {

// splitmix64 step; used to derive independent stream seeds from a root
// seed and a task counter so that parallel and serial runs agree.
inline std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t counter) noexcept {
    return mix_seed(root ^ mix_seed(counter + 1));
}

// Deterministic generator: mt19937_64 is fully specified by the standard,
// and the uniform/normal mappings below avoid the implementation-defined
// std::*_distribution classes, so streams are identical across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform on (0, 1); never returns 0 or 1
    double uniform() {
        const std::uint64_t r = gen_();
        return (static_cast<double>(r >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller; pairs are cached
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t next_u64() { return gen_(); }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace rocp
