#include "dcskeptic/rng.hpp"

#include <cmath>

#include "dcskeptic/stats.hpp"
#include "dcskeptic/types.hpp"

namespace dcs {

namespace {

// splitmix64 finalizer; good avalanche for seed mixing.
std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

Rng Rng::substream(std::uint64_t root, std::string_view name, std::uint64_t a,
                   std::uint64_t b) {
    std::uint64_t h = mix(root ^ fnv1a(name));
    h = mix(h ^ (a + 0x9e3779b97f4a7c15ULL));
    h = mix(h ^ (b + 0x7f4a7c159e3779b9ULL));
    return Rng(h);
}

double Rng::uniform() {
    // 53-bit mantissa draw, then shift off zero to keep the interval open.
    double u = (gen_() >> 11) * 0x1.0p-53;
    return (u + 0x1.0p-54);
}

int Rng::uniform_int(int lo, int hi) {
    if (hi < lo) throw InputError("uniform_int: hi < lo");
    std::uint64_t span = static_cast<std::uint64_t>(hi) - lo + 1;
    // Multiply-shift bounded draw (Lemire); bias is negligible for our spans
    // and the mapping is fixed by our own code.
    unsigned __int128 m = static_cast<unsigned __int128>(gen_()) * span;
    return lo + static_cast<int>(m >> 64);
}

double Rng::normal() { return norm_quantile(uniform()); }

double Rng::student_t(int nu) {
    if (nu < 1) throw InputError("student_t: nu must be >= 1");
    double z = normal();
    double chi2 = 0.0;
    for (int i = 0; i < nu; ++i) {
        double g = normal();
        chi2 += g * g;
    }
    return z / std::sqrt(chi2 / nu);
}

double Rng::student_t_unit(int nu) {
    if (nu < 3) throw InputError("student_t_unit: nu must be >= 3");
    return student_t(nu) / std::sqrt(static_cast<double>(nu) / (nu - 2));
}

}  // namespace dcs
