#include "multiop/idx.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include "multiop/errors.hpp"

namespace multiop {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;

std::uint32_t read_u32_be(const std::string& data, std::size_t at, const char* what) {
  if (at + 4 > data.size())
    throw FormatError("idx: truncated while reading " + std::string(what) +
                      " at byte offset " + std::to_string(at));
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v = (v << 8) | static_cast<std::uint8_t>(data[at + static_cast<std::size_t>(i)]);
  return v;
}

} // namespace

std::vector<Vector> load_idx(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("load_idx: cannot open " + path);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  const std::string data = std::move(buffer).str();

  std::uint32_t magic = read_u32_be(data, 0, "magic");
  if (magic != kImageMagic) {
    std::ostringstream msg;
    msg << "idx: expected image magic 0x" << std::hex << kImageMagic << ", got 0x"
        << magic << std::dec << " at byte offset 0";
    throw FormatError(msg.str());
  }
  std::uint32_t count = read_u32_be(data, 4, "image count");
  std::uint32_t rows = read_u32_be(data, 8, "row count");
  std::uint32_t cols = read_u32_be(data, 12, "column count");

  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  const std::size_t expected = 16 + static_cast<std::size_t>(count) * pixels;
  if (data.size() < expected)
    throw FormatError("idx: truncated pixel data, file ends at byte offset " +
                      std::to_string(data.size()) + " but needs " +
                      std::to_string(expected));
  if (data.size() > expected)
    throw FormatError("idx: trailing bytes at offset " + std::to_string(expected));

  std::vector<Vector> images;
  images.reserve(count);
  std::size_t at = 16;
  for (std::uint32_t i = 0; i < count; ++i) {
    Vector image(static_cast<Eigen::Index>(pixels));
    for (std::size_t p = 0; p < pixels; ++p)
      image(static_cast<Eigen::Index>(p)) =
          static_cast<double>(static_cast<std::uint8_t>(data[at + p])) / 255.0;
    images.push_back(std::move(image));
    at += pixels;
  }
  return images;
}

} // namespace multiop
