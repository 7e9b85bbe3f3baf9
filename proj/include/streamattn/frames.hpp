#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "streamattn/engine.hpp"
#include "streamattn/matrix.hpp"

namespace streamattn {

// Row framing: tag u8, index u32 LE, then d float64 LE.
enum class FrameTag : std::uint8_t { V = 0, K = 1, Q = 2, X2 = 3, X1 = 4 };

class FrameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Frame {
  FrameTag tag = FrameTag::V;
  std::uint32_t index = 0;
  std::vector<double> payload;
};

inline constexpr std::size_t frame_bytes(std::size_t d) { return 5 + 8 * d; }

void write_frame(std::ostream& os, FrameTag tag, std::uint32_t index,
                 std::span<const double> payload);

/// Next frame, or nullopt at a clean end of stream. A partial frame throws.
std::optional<Frame> read_frame(std::istream& is, std::size_t d);

/// Dispatches one frame to the matching ingest call.
void feed_frame(StreamEngine& engine, const Frame& frame);

/// Reads frames until end of stream; returns the number consumed.
std::size_t feed_stream(StreamEngine& engine, std::istream& is);

/// V, then K, then Q rows.
void write_plain_stream(std::ostream& os, const DenseMatrix& q, const DenseMatrix& k,
                        const DenseMatrix& v);
/// X2, then X1 rows.
void write_cross_stream(std::ostream& os, const DenseMatrix& x1, const DenseMatrix& x2);

}  // namespace streamattn
