#ifndef VOXC_RNG_HPP
#define VOXC_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace voxc {

// Deterministic random source. std::mt19937_64 output is fixed by the
// standard, and all derived draws below avoid std::*_distribution (whose
// algorithms are implementation-defined), so streams are reproducible
// across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    // Uniform in [0, 1) with 53 bits of mantissa.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform in [0, n). Plain modulo; bias is irrelevant at these ranges.
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : gen_() % n; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

// Stateless mix for deriving independent sub-seeds (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace voxc

#endif  // VOXC_RNG_HPP
