#ifndef CAUSALMED_RNG_HPP
#define CAUSALMED_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

namespace causalmed {

// Counter-based substreams: every (root seed, node, draw index) triple maps to
// an independent generator state. Results are reproducible for a given seed no
// matter how draws are split across threads, and adding a node to a model
// never shifts the stream of an existing one.

// splitmix64 finalizer; good avalanche, cheap.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a over the node name, so substreams are keyed by identity rather than
// by declaration position.
constexpr std::uint64_t hash_name(std::string_view name) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// One substream = one (node, draw) cell. Successive next() calls walk the
// cell's private counter; nothing is shared with any other cell.
class SampleStream {
public:
    SampleStream(std::uint64_t root_seed, std::uint64_t node_hash, std::uint64_t draw_index) noexcept
        : state_(mix64(mix64(root_seed ^ node_hash) ^ draw_index)) {}

    std::uint64_t next() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_ ^ counter_++);
    }

    // Uniform on [0, 1) with 53 random bits.
    double u01() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller. We only keep one of the pair; the hot
    // paths draw one gaussian per (node, draw) cell, so caching the spare
    // would complicate determinism for no gain.
    double gaussian() noexcept {
        double u1 = u01();
        double u2 = u01();
        while (u1 <= 0.0) u1 = u01();  // log(0) guard; astronomically rare
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    double gaussian(double mean, double stddev) noexcept {
        return mean + stddev * gaussian();
    }

    // Index into a discrete distribution by CDF inversion. `probs` must sum
    // to ~1; the final bucket absorbs any rounding remainder.
    template <typename Container>
    std::size_t categorical(const Container& probs) noexcept {
        double u = u01();
        double acc = 0.0;
        std::size_t last = 0;
        std::size_t i = 0;
        for (double p : probs) {
            acc += p;
            last = i;
            if (u < acc) return i;
            ++i;
        }
        return last;
    }

    // Uniform index in [0, n).
    std::size_t pick(std::size_t n) noexcept {
        return static_cast<std::size_t>(u01() * static_cast<double>(n));
    }

private:
    std::uint64_t state_;
    std::uint64_t counter_ = 0;
};

}  // namespace causalmed

#endif  // CAUSALMED_RNG_HPP
