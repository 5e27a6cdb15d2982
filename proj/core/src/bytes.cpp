#include "tpcgcn/bytes.hpp"

#include <fstream>
#include <iterator>

#include "tpcgcn/error.hpp"

namespace tpcgcn::bytes {

void Reader::need(std::size_t n) const {
  if (data_.size() - pos_ < n) {
    throw DataError(context_ + ": truncated at byte " + std::to_string(pos_) +
                    " (needed " + std::to_string(n) + " more)");
  }
}

std::string Reader::raw(std::size_t n) {
  need(n);
  std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
  pos_ += n;
  return s;
}

std::uint64_t Reader::get_le(std::size_t n) {
  need(n);
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < n; ++i) v |= std::uint64_t{data_[pos_ + i]} << (8 * i);
  pos_ += n;
  return v;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace tpcgcn::bytes
