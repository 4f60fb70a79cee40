#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace hpml {

// Deterministic random source used everywhere randomness is needed.
// Engine: std::mt19937_64, whose output sequence is pinned by the C++
// standard, seeded directly (no seed_seq). All value mappings are done
// here by hand because the standard distributions are not portable:
//   next_double  = (next_u64() >> 11) * 2^-53, uniform in [0, 1)
//   below(bound) = rejection sampling on the top multiple of bound
// Identical seeds therefore reproduce identical streams on every
// conforming implementation.
class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    uint64_t below(uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
        uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

    size_t index(size_t n) { return static_cast<size_t>(below(n)); }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (size_t i = items.size(); i > 1; --i) {
            size_t j = index(i);
            std::swap(items[i - 1], items[j]);
        }
    }

    // First k entries of a Fisher-Yates pass: a uniform k-subset of 0..n-1.
    std::vector<size_t> sample_indices(size_t n, size_t k) {
        if (k > n) throw std::invalid_argument("Rng::sample_indices: k > n");
        std::vector<size_t> pool(n);
        for (size_t i = 0; i < n; ++i) pool[i] = i;
        for (size_t i = 0; i < k; ++i) {
            size_t j = i + index(n - i);
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        return pool;
    }

  private:
    std::mt19937_64 engine_;
};

// SplitMix64 step, used to derive independent sub-stream seeds from a
// root seed without correlating the streams.
inline uint64_t derive_seed(uint64_t root, uint64_t stream) {
    uint64_t z = root + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace hpml
