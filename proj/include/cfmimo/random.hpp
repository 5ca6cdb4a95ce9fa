#pragma once

#include <cstdint>
#include <random>

#include "cfmimo/types.hpp"

namespace cfmimo {

using Rng = std::mt19937_64;

/// Independent sub-streams of one Monte-Carlo trial. Each component of a
/// trial draws from its own stream so that any of them can be frozen while
/// the others vary.
enum class Stream : std::uint32_t {
  Topology = 1,
  Shadowing = 2,
  Fading = 3,
  Noise = 4,
  Symbols = 5,
  Pilots = 6,
};

/// Deterministic engine for (seed, trial, stream).
Rng make_stream(std::uint64_t seed, std::uint64_t trial, Stream stream);

/// Circularly-symmetric complex Gaussian CN(0, 1).
Complex complex_normal(Rng& rng);

/// M x K matrix of i.i.d. CN(0, 1) entries, filled column-major.
MatrixXc complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

}  // namespace cfmimo
