#include "streamattn/matf.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <vector>

namespace streamattn {

namespace {

template <typename T>
T from_le(const unsigned char* p) {
  T v;
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(&v, p, sizeof(T));
  } else {
    unsigned char tmp[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) tmp[i] = p[sizeof(T) - 1 - i];
    std::memcpy(&v, tmp, sizeof(T));
  }
  return v;
}

template <typename T>
void to_le(T v, unsigned char* p) {
  std::memcpy(p, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(p[i], p[sizeof(T) - 1 - i]);
  }
}

}  // namespace

DenseMatrix mat_load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MatfError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < kMatfHeaderBytes) {
    throw MatfError(path.string() + ": truncated header (" + std::to_string(bytes.size()) +
                    " bytes)");
  }
  if (std::memcmp(bytes.data(), kMatfMagic, sizeof(kMatfMagic)) != 0) {
    throw MatfError(path.string() + ": bad magic at byte offset 0");
  }
  const auto rows = from_le<std::uint32_t>(bytes.data() + 8);
  const auto cols = from_le<std::uint32_t>(bytes.data() + 12);
  const std::size_t count = static_cast<std::size_t>(rows) * cols;
  const std::size_t payload = bytes.size() - kMatfHeaderBytes;
  if (payload != count * sizeof(double)) {
    throw MatfError(path.string() + ": payload length mismatch (header " +
                    std::to_string(rows) + "x" + std::to_string(cols) + " needs " +
                    std::to_string(count * sizeof(double)) + " bytes, found " +
                    std::to_string(payload) + ")");
  }
  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t offset = kMatfHeaderBytes + i * sizeof(double);
    data[i] = from_le<double>(bytes.data() + offset);
    if (!std::isfinite(data[i])) {
      throw MatfError(path.string() + ": non-finite value at cell (" +
                      std::to_string(i / cols) + ", " + std::to_string(i % cols) +
                      "), byte offset " + std::to_string(offset));
    }
  }
  return DenseMatrix(rows, cols, std::move(data));
}

void mat_store(const DenseMatrix& m, const std::filesystem::path& path) {
  if (m.rows() > std::numeric_limits<std::uint32_t>::max() ||
      m.cols() > std::numeric_limits<std::uint32_t>::max()) {
    throw MatfError(path.string() + ": dimensions exceed u32");
  }
  std::vector<unsigned char> bytes(kMatfHeaderBytes + m.size() * sizeof(double));
  std::memcpy(bytes.data(), kMatfMagic, sizeof(kMatfMagic));
  to_le(static_cast<std::uint32_t>(m.rows()), bytes.data() + 8);
  to_le(static_cast<std::uint32_t>(m.cols()), bytes.data() + 12);
  auto data = m.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    to_le(data[i], bytes.data() + kMatfHeaderBytes + i * sizeof(double));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw MatfError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw MatfError("write failed for " + path.string());
}

}  // namespace streamattn
