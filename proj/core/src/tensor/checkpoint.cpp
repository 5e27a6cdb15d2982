#include "tpcgcn/tensor/checkpoint.hpp"

#include <fstream>
#include <limits>

#include "tpcgcn/bytes.hpp"
#include "tpcgcn/error.hpp"

namespace tpcgcn::tensor {

namespace {
constexpr std::string_view kMagic = "TPCK";
}

std::vector<std::uint8_t> encode_checkpoint(std::span<const Parameter* const> params) {
  bytes::Writer w;
  w.raw(kMagic);
  w.u16(kCheckpointVersion);
  for (const Parameter* p : params) {
    if (p->name.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw ValidationError("parameter name too long: " + p->name);
    }
    w.u16(static_cast<std::uint16_t>(p->name.size()));
    w.raw(p->name);
    if (p->rank == 1) {
      w.u8(1);
      w.u32(static_cast<std::uint32_t>(p->value.cols()));
    } else {
      w.u8(2);
      w.u32(static_cast<std::uint32_t>(p->value.rows()));
      w.u32(static_cast<std::uint32_t>(p->value.cols()));
    }
    w.u8(p->frozen ? 1 : 0);
    for (double v : p->value.data()) w.f32(static_cast<float>(v));
  }
  return w.take();
}

std::vector<Parameter> decode_checkpoint(std::span<const std::uint8_t> data) {
  bytes::Reader r(data, "checkpoint");
  if (r.raw(kMagic.size()) != kMagic) throw DataError("checkpoint: bad magic bytes");
  const auto version = r.u16();
  if (version != kCheckpointVersion) {
    throw DataError("checkpoint: unsupported version " + std::to_string(version));
  }
  std::vector<Parameter> out;
  while (!r.at_end()) {
    const auto name_len = r.u16();
    std::string name = r.raw(name_len);
    const auto rank = r.u8();
    Parameter p;
    if (rank == 1) {
      p = Parameter::vector(std::move(name), r.u32());
    } else if (rank == 2) {
      const auto rows = r.u32();
      const auto cols = r.u32();
      p = Parameter(std::move(name), rows, cols);
    } else {
      throw DataError("checkpoint: parameter " + name + " has unsupported rank " +
                      std::to_string(rank));
    }
    const auto frozen = r.u8();
    if (frozen > 1) throw DataError("checkpoint: bad frozen flag for " + p.name);
    p.frozen = frozen == 1;
    for (double& v : p.value.data()) v = static_cast<double>(r.f32());
    out.push_back(std::move(p));
  }
  return out;
}

void write_checkpoint(const std::filesystem::path& path,
                      std::span<const Parameter* const> params) {
  write_file_atomically(path, encode_checkpoint(params));
}

std::vector<Parameter> read_checkpoint(const std::filesystem::path& path) {
  const auto data = bytes::read_file(path);
  return decode_checkpoint(data);
}

void write_file_atomically(const std::filesystem::path& path,
                           std::span<const std::uint8_t> data) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

void write_file_atomically(const std::filesystem::path& path, const std::string& text) {
  write_file_atomically(
      path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace tpcgcn::tensor
