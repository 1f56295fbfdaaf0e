#include "futurequant/dataset_io.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "futurequant/error.hpp"

namespace fq {
namespace {

template <typename U>
void put_le(std::ostream& out, U value) {
  unsigned char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

void put_u32(std::ostream& out, std::uint32_t v) { put_le(out, v); }
void put_u64(std::ostream& out, std::uint64_t v) { put_le(out, v); }
void put_i64(std::ostream& out, std::int64_t v) { put_le(out, static_cast<std::uint64_t>(v)); }
void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

template <typename U>
U get_le(std::istream& in) {
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(U))) {
    throw Error(ErrorCode::kFormatError, "dataset artifact truncated");
  }
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
  return v;
}

std::uint32_t get_u32(std::istream& in) { return get_le<std::uint32_t>(in); }
std::uint64_t get_u64(std::istream& in) { return get_le<std::uint64_t>(in); }
std::int64_t get_i64(std::istream& in) { return static_cast<std::int64_t>(get_u64(in)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 34;

}  // namespace

void write_dataset(std::ostream& out, const WindowedDataset& ds) {
  const std::size_t n = ds.inputs.samples();
  const std::size_t f = ds.inputs.features();
  out.write(kDatasetMagic.data(), kDatasetMagic.size());
  put_u32(out, kDatasetVersion);
  put_u64(out, n);
  put_u64(out, ds.inputs.steps());
  put_u64(out, f);
  for (double v : ds.inputs.data()) put_f64(out, v);

  put_u64(out, static_cast<std::uint64_t>(ds.targets.cols()));
  for (Eigen::Index r = 0; r < ds.targets.rows(); ++r) {
    for (Eigen::Index c = 0; c < ds.targets.cols(); ++c) put_f64(out, ds.targets(r, c));
  }
  for (std::size_t i = 0; i < n; ++i) put_u64(out, ds.target_index[i]);
  for (std::size_t i = 0; i < n; ++i) put_i64(out, ds.input_end_time[i]);
  for (std::size_t i = 0; i < n; ++i) put_i64(out, ds.target_time[i]);

  const bool norm = ds.normalized();
  out.put(norm ? 1 : 0);
  if (norm) {
    for (double v : ds.norm.x_min) put_f64(out, v);
    for (double v : ds.norm.x_max) put_f64(out, v);
    put_f64(out, ds.target_norm.x_min.at(0));
    put_f64(out, ds.target_norm.x_max.at(0));
  }
  for (const auto& name : ds.feature_names) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  if (!out) throw Error(ErrorCode::kIoError, "failed writing dataset artifact");
}

std::string serialize_dataset(const WindowedDataset& ds) {
  std::ostringstream ss(std::ios::binary);
  write_dataset(ss, ds);
  return std::move(ss).str();
}

WindowedDataset read_dataset(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kDatasetMagic) {
    throw Error(ErrorCode::kFormatError, "not a dataset artifact (bad magic)");
  }
  const auto version = get_u32(in);
  if (version != kDatasetVersion) {
    throw Error(ErrorCode::kFormatError, "unsupported dataset version " + std::to_string(version));
  }
  const auto n = get_u64(in);
  const auto t = get_u64(in);
  const auto f = get_u64(in);
  if (n * t * f > kMaxElements || f == 0 || t == 0) {
    throw Error(ErrorCode::kFormatError, "implausible dataset shape");
  }
  WindowedDataset ds;
  ds.inputs = Tensor3(n, t, f);
  for (double& v : ds.inputs.data()) v = get_f64(in);

  const auto w = get_u64(in);
  if (w == 0 || n * w > kMaxElements) throw Error(ErrorCode::kFormatError, "bad target width");
  ds.targets = Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(w));
  for (Eigen::Index r = 0; r < ds.targets.rows(); ++r) {
    for (Eigen::Index c = 0; c < ds.targets.cols(); ++c) ds.targets(r, c) = get_f64(in);
  }
  ds.target_index.resize(n);
  ds.input_end_time.resize(n);
  ds.target_time.resize(n);
  for (auto& v : ds.target_index) v = get_u64(in);
  for (auto& v : ds.input_end_time) v = get_i64(in);
  for (auto& v : ds.target_time) v = get_i64(in);

  const int norm = in.get();
  if (norm != 0 && norm != 1) throw Error(ErrorCode::kFormatError, "bad normalization flag");
  if (norm == 1) {
    ds.norm.x_min.resize(f);
    ds.norm.x_max.resize(f);
    for (auto& v : ds.norm.x_min) v = get_f64(in);
    for (auto& v : ds.norm.x_max) v = get_f64(in);
    ds.target_norm.x_min = {get_f64(in)};
    ds.target_norm.x_max = {get_f64(in)};
  }
  for (std::uint64_t i = 0; i < f; ++i) {
    const auto len = get_u32(in);
    if (len > 4096) throw Error(ErrorCode::kFormatError, "feature name too long");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw Error(ErrorCode::kFormatError, "dataset artifact truncated");
    ds.feature_names.push_back(std::move(name));
  }
  return ds;
}

}  // namespace fq
