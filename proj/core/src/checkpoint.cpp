#include "multiop/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "multiop/errors.hpp"

namespace multiop {

namespace {

constexpr char kMagic[8] = {'M', 'O', 'P', 'S', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class Reader {
public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  std::size_t offset() const { return at_; }

  void expect(std::size_t count, const char* what) const {
    if (at_ + count > data_.size())
      throw FormatError("checkpoint: truncated while reading " + std::string(what) +
                        " at byte offset " + std::to_string(at_));
  }

  std::uint8_t u8() {
    expect(1, "byte");
    return static_cast<std::uint8_t>(data_[at_++]);
  }

  std::uint32_t u32(const char* what) {
    expect(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(data_[at_ + static_cast<std::size_t>(i)])) << (8 * i);
    at_ += 4;
    return v;
  }

  double f64(const char* what) {
    expect(8, what);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
      bits |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(data_[at_ + static_cast<std::size_t>(i)])) << (8 * i);
    at_ += 8;
    return std::bit_cast<double>(bits);
  }

  std::string bytes(std::size_t count, const char* what) {
    expect(count, what);
    std::string out = data_.substr(at_, count);
    at_ += count;
    return out;
  }

  bool exhausted() const { return at_ == data_.size(); }

private:
  std::string data_;
  std::size_t at_ = 0;
};

} // namespace

void save_checkpoint(const std::string& path, const Mlp& net, const TrainConfig& train) {
  detail::Json header;
  header["layer_sizes"] = net.layer_sizes();
  header["activation"] = "relu";
  header["residual"] = net.residual();
  header["train_config"] = detail::train_config_to_json(train);
  header["seed"] = train.seed;
  std::string header_text = header.dump();

  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(header_text.size()));
  out += header_text;
  for (int l = 0; l < net.layer_count(); ++l) {
    const Matrix& w = net.weight(l);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) put_f64(out, w(i, j));
    const Vector& b = net.bias(l);
    for (Eigen::Index i = 0; i < b.size(); ++i) put_f64(out, b(i));
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("save_checkpoint: cannot open " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("load_checkpoint: cannot open " + path);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  Reader reader(std::move(buffer).str());

  for (std::size_t i = 0; i < sizeof(kMagic); ++i) {
    if (reader.u8() != static_cast<std::uint8_t>(kMagic[i]))
      throw FormatError("checkpoint: bad magic at byte offset " + std::to_string(i));
  }
  std::uint32_t version = reader.u32("version");
  if (version != kVersion)
    throw FormatError("checkpoint: unsupported version " + std::to_string(version) +
                      " at byte offset 8");
  std::uint32_t header_len = reader.u32("header length");
  std::size_t header_at = reader.offset();
  std::string header_text = reader.bytes(header_len, "header");

  detail::Json header;
  try {
    header = detail::Json::parse(header_text);
  } catch (const detail::Json::parse_error& e) {
    throw FormatError("checkpoint: malformed header JSON at byte offset " +
                      std::to_string(header_at) + ": " + e.what());
  }

  TrainConfig train;
  std::vector<int> sizes;
  bool residual = false;
  try {
    sizes = header.at("layer_sizes").get<std::vector<int>>();
    residual = header.at("residual").get<bool>();
    std::string activation = header.at("activation").get<std::string>();
    if (activation != "relu")
      throw FormatError("checkpoint: unknown activation tag '" + activation + "'");
    train = detail::train_config_from_json(header.at("train_config"));
  } catch (const detail::Json::exception& e) {
    throw FormatError("checkpoint: header missing fields: " + std::string(e.what()));
  }

  Mlp net(sizes, residual);
  for (int l = 0; l < net.layer_count(); ++l) {
    Matrix& w = net.weight(l);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = reader.f64("weights");
    Vector& b = net.bias(l);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = reader.f64("biases");
  }
  if (!reader.exhausted())
    throw FormatError("checkpoint: trailing bytes at offset " +
                      std::to_string(reader.offset()));
  return {std::move(net), train};
}

} // namespace multiop
