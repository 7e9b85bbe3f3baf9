#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "streamattn/matrix.hpp"

namespace streamattn {

// MATF: "MATF0001", rows u32 LE, cols u32 LE, rows*cols float64 LE row-major.
inline constexpr char kMatfMagic[8] = {'M', 'A', 'T', 'F', '0', '0', '0', '1'};
inline constexpr std::size_t kMatfHeaderBytes = 16;

class MatfError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

DenseMatrix mat_load(const std::filesystem::path& path);
void mat_store(const DenseMatrix& m, const std::filesystem::path& path);

}  // namespace streamattn
