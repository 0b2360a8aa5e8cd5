// Seeded random draws. Every stochastic routine takes a root seed and derives
// named substreams from it, so runs are reproducible and independent pieces
// (path, contamination, subsampling, ...) never share a stream.
//
// Normal draws go through the inverse cdf and Student-t draws through a ratio
// of normals, so output depends only on mt19937_64 (whose bit stream is fixed
// by the standard) and on our own code, not on libstdc++ distribution
// internals.
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dcs {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Derive a child seeded from (root, name, a, b). Same inputs -> same
    // stream, different name/indices -> effectively independent streams.
    static Rng substream(std::uint64_t root, std::string_view name,
                         std::uint64_t a = 0, std::uint64_t b = 0);

    std::uint64_t raw() { return gen_(); }

    // Uniform on the open interval (0,1).
    double uniform();

    // Uniform integer on [lo, hi] inclusive.
    int uniform_int(int lo, int hi);

    // Standard normal via inverse cdf.
    double normal();

    // Student t with integer df nu >= 1 (Z over sqrt(chi2_nu / nu)).
    double student_t(int nu);

    // Student t scaled to unit variance; requires nu >= 3.
    double student_t_unit(int nu);

  private:
    std::mt19937_64 gen_;
};

}  // namespace dcs
