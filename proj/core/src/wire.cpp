#include "dvs/wire.hpp"

#include <bit>
#include <cstring>

#include "dvs/types.hpp"

namespace dvs::wire {

std::uint32_t read_be32(const std::uint8_t* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void write_be32(std::uint8_t* p, std::uint32_t v) {
  p[0] = std::uint8_t(v >> 24);
  p[1] = std::uint8_t(v >> 16);
  p[2] = std::uint8_t(v >> 8);
  p[3] = std::uint8_t(v);
}

namespace {

void write_le64(std::uint8_t* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = std::uint8_t(v >> (8 * i));
}

std::uint64_t read_le64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_frame(std::uint8_t tag,
                                       std::uint32_t machine_id,
                                       const Eigen::VectorXd& values) {
  const std::uint32_t p = std::uint32_t(values.size());
  const std::uint32_t payload_len = 1 + 4 + 4 + 8 * p;
  std::vector<std::uint8_t> buf(4 + payload_len);
  write_be32(buf.data(), payload_len);
  buf[4] = tag;
  write_be32(buf.data() + 5, machine_id);
  write_be32(buf.data() + 9, p);
  for (std::uint32_t j = 0; j < p; ++j) {
    write_le64(buf.data() + 13 + 8 * j, std::bit_cast<std::uint64_t>(values[j]));
  }
  return buf;
}

Frame decode_payload(const std::uint8_t* data, std::size_t len) {
  if (len < 9) {
    throw AggregationError("wire: short frame (" + std::to_string(len) +
                           " bytes)");
  }
  Frame f;
  f.tag = data[0];
  if (f.tag != kTagBroadcastBeta && f.tag != kTagGradientReply) {
    throw AggregationError("wire: unknown message tag " +
                           std::to_string(int(f.tag)));
  }
  f.machine_id = read_be32(data + 1);
  const std::uint32_t p = read_be32(data + 5);
  if (len != std::size_t(9) + std::size_t(8) * p) {
    throw AggregationError("wire: frame length " + std::to_string(len) +
                           " does not match p = " + std::to_string(p));
  }
  f.payload.resize(p);
  for (std::uint32_t j = 0; j < p; ++j) {
    f.payload[j] = std::bit_cast<double>(read_le64(data + 9 + 8 * j));
  }
  return f;
}

}  // namespace dvs::wire
