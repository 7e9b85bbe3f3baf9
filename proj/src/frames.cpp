#include "streamattn/frames.hpp"

#include <bit>
#include <cstring>
#include <string>

namespace streamattn {

namespace {

template <typename T>
void put_le(unsigned char* p, T v) {
  std::memcpy(p, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(p[i], p[sizeof(T) - 1 - i]);
  }
}

template <typename T>
T get_le(const unsigned char* p) {
  unsigned char tmp[sizeof(T)];
  std::memcpy(tmp, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(tmp[i], tmp[sizeof(T) - 1 - i]);
  }
  T v;
  std::memcpy(&v, tmp, sizeof(T));
  return v;
}

}  // namespace

void write_frame(std::ostream& os, FrameTag tag, std::uint32_t index,
                 std::span<const double> payload) {
  std::vector<unsigned char> buf(frame_bytes(payload.size()));
  buf[0] = static_cast<unsigned char>(tag);
  put_le(buf.data() + 1, index);
  for (std::size_t j = 0; j < payload.size(); ++j) put_le(buf.data() + 5 + 8 * j, payload[j]);
  os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!os) throw FrameError("frame write failed");
}

std::optional<Frame> read_frame(std::istream& is, std::size_t d) {
  std::vector<unsigned char> buf(frame_bytes(d));
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  const auto got = static_cast<std::size_t>(is.gcount());
  if (got == 0) return std::nullopt;
  if (got != buf.size()) {
    throw FrameError("truncated frame: " + std::to_string(got) + " of " +
                     std::to_string(buf.size()) + " bytes");
  }
  if (buf[0] > static_cast<unsigned char>(FrameTag::X1)) {
    throw FrameError("unknown frame tag " + std::to_string(buf[0]));
  }
  Frame f;
  f.tag = static_cast<FrameTag>(buf[0]);
  f.index = get_le<std::uint32_t>(buf.data() + 1);
  f.payload.resize(d);
  for (std::size_t j = 0; j < d; ++j) f.payload[j] = get_le<double>(buf.data() + 5 + 8 * j);
  return f;
}

void feed_frame(StreamEngine& engine, const Frame& frame) {
  switch (frame.tag) {
    case FrameTag::V: engine.ingest_v_row(frame.index, frame.payload); break;
    case FrameTag::K: engine.ingest_k_row(frame.index, frame.payload); break;
    case FrameTag::Q: engine.ingest_q_row(frame.index, frame.payload); break;
    case FrameTag::X2: engine.ingest_x2_row(frame.index, frame.payload); break;
    case FrameTag::X1: engine.ingest_x1_row(frame.index, frame.payload); break;
  }
}

std::size_t feed_stream(StreamEngine& engine, std::istream& is) {
  std::size_t count = 0;
  while (auto frame = read_frame(is, engine.dims().d)) {
    feed_frame(engine, *frame);
    ++count;
  }
  return count;
}

namespace {

void write_rows(std::ostream& os, FrameTag tag, const DenseMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    write_frame(os, tag, static_cast<std::uint32_t>(i), m.row(i));
}

}  // namespace

void write_plain_stream(std::ostream& os, const DenseMatrix& q, const DenseMatrix& k,
                        const DenseMatrix& v) {
  write_rows(os, FrameTag::V, v);
  write_rows(os, FrameTag::K, k);
  write_rows(os, FrameTag::Q, q);
}

void write_cross_stream(std::ostream& os, const DenseMatrix& x1, const DenseMatrix& x2) {
  write_rows(os, FrameTag::X2, x2);
  write_rows(os, FrameTag::X1, x1);
}

}  // namespace streamattn
