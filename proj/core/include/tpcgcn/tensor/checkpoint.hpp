#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tpcgcn/tensor/parameter.hpp"

// Parameter checkpoint file:
//
//   "TPCK"            4 bytes magic
//   version           u16 (currently 1)
//   then, repeated until end of file:
//     name length     u16
//     name            UTF-8 bytes
//     rank            u8 (1 or 2)
//     dims            rank x u32
//     frozen          u8 (0 or 1)
//     values          prod(dims) x f32
//
// All integers and reals are little-endian. Values are narrowed to 32-bit on
// write and widened back to 64-bit on read.
namespace tpcgcn::tensor {

inline constexpr std::uint16_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_checkpoint(std::span<const Parameter* const> params);
std::vector<Parameter> decode_checkpoint(std::span<const std::uint8_t> bytes);

void write_checkpoint(const std::filesystem::path& path,
                      std::span<const Parameter* const> params);
std::vector<Parameter> read_checkpoint(const std::filesystem::path& path);

// Writes `bytes` to a sibling temporary file and renames it over `path`.
void write_file_atomically(const std::filesystem::path& path,
                           std::span<const std::uint8_t> bytes);
void write_file_atomically(const std::filesystem::path& path, const std::string& text);

}  // namespace tpcgcn::tensor
