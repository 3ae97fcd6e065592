#pragma once

#include <array>
#include <cstdint>

namespace sns {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).  Every
// draw is a pure function of (key, counter), so per-mode noise streams are
// reproducible independent of iteration order and thread count.
namespace rng {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Uniform in (0, 1], built from 64 bits of counter output.
double to_unit(std::uint32_t hi, std::uint32_t lo);

// Two independent standard normals from one Philox block (Box-Muller).
struct NormalPair {
  double z0;
  double z1;
};
NormalPair normal_pair(std::uint64_t seed, std::uint32_t stream_tag, std::uint32_t mode_id,
                       std::uint64_t counter, std::uint32_t slot);

// Stream tags; distinct tags give independent streams under one seed.
inline constexpr std::uint32_t kStreamOu = 1;        // OU field increments
inline constexpr std::uint32_t kStreamOuAux = 2;     // heat-convolution residual
inline constexpr std::uint32_t kStreamZeta = 3;      // perturbation increments
inline constexpr std::uint32_t kStreamInitial = 4;   // initial condition
inline constexpr std::uint32_t kStreamGeneric = 5;   // test fields, probes

}  // namespace rng

}  // namespace sns
