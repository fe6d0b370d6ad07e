#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace dvs::wire {

// Frame layout (bit-exact):
//   4-byte big-endian payload length
//   payload: 1-byte tag, 4-byte big-endian machine_id,
//            4-byte big-endian p, then p little-endian IEEE-754 doubles
inline constexpr std::uint8_t kTagBroadcastBeta = 0x01;
inline constexpr std::uint8_t kTagGradientReply = 0x02;

struct Frame {
  std::uint8_t tag = 0;
  std::uint32_t machine_id = 0;
  Eigen::VectorXd payload;
};

// Whole frame including the length prefix.
std::vector<std::uint8_t> encode_frame(std::uint8_t tag,
                                       std::uint32_t machine_id,
                                       const Eigen::VectorXd& values);

// Decodes the payload that followed a length prefix. Throws
// AggregationError on a malformed buffer.
Frame decode_payload(const std::uint8_t* data, std::size_t len);

std::uint32_t read_be32(const std::uint8_t* p);
void write_be32(std::uint8_t* p, std::uint32_t v);

}  // namespace dvs::wire
