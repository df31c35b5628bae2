#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace diffnet {

// Portable seeded normal generator.
//
// Bits come from std::mt19937_64, whose output sequence is fixed by the C++
// standard. Uniforms are (bits >> 11 + 1) * 2^-53, which lies in (0, 1], and
// normals come from the Box-Muller transform, used in pairs:
//   r = sqrt(-2 log u1), z0 = r cos(2 pi u2), z1 = r sin(2 pi u2).
// Any implementation following these three rules reproduces the same stream.
// Parallel replicates use seed = base_seed + replicate_index.
class NormalRng {
public:
    explicit NormalRng(std::uint64_t seed) : engine_(seed) {}

    double uniform();
    double normal();

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

}  // namespace diffnet
