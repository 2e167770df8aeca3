#ifndef MOPAC_RNG_HPP
#define MOPAC_RNG_HPP

#include <cstdint>
#include <random>

namespace mopac {

/// Seeded deterministic generator. The algorithm identifier is written into
/// the trace header; ties reproduce across implementations only when the
/// same generator and draw scheme are used.
class DeterministicRng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64";

    explicit DeterministicRng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform draw from [0, n). Rejection sampling, not
    /// std::uniform_int_distribution, so the draw sequence does not
    /// depend on the standard library in use.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace mopac

#endif  // MOPAC_RNG_HPP
