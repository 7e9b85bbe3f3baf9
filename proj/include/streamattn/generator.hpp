#pragma once

#include <string>

#include "streamattn/matrix.hpp"

namespace streamattn {

/// uniform: Q, K iid uniform[−B, B]; V Gaussian.
/// spiky: each output column c gets a direction u_c ∈ {±B}^d (Hadamard rows
/// when d is a power of two, random signs otherwise), a group of keys equal
/// to u_c that carry V's column-c mass, and k queries equal to u_c. All other
/// queries are drawn from uniform[−aB, aB] with a = kSpikyBackground, so
/// column c of the attention output is dominated by its k planted queries.
/// Both profiles rescale V to spectral norm exactly 1/√n.
enum class Profile { Uniform, Spiky };

inline constexpr double kSpikyBackground = 0.05;

Profile parse_profile(const std::string& name);
std::string to_string(Profile p);

struct Instance {
  DenseMatrix q;
  DenseMatrix k;
  DenseMatrix v;
};

Instance gen_instance(const ProblemParams& p, RngSeed seed, Profile profile);

/// Uniform[−scale, scale] entries; helper for weights and tests.
DenseMatrix random_matrix(std::size_t rows, std::size_t cols, double scale, Rng& rng);

}  // namespace streamattn
