#include "futurequant/checkpoint.hpp"

#include <map>
#include <set>
#include <sstream>

#include "futurequant/baselines.hpp"
#include "futurequant/error.hpp"
#include "futurequant/futurequant.hpp"
#include "futurequant/io.hpp"

namespace fq {
namespace {

constexpr std::string_view kHeader = "FQCKPT 1";

class SpecReader {
 public:
  explicit SpecReader(const SpecEntries& entries) {
    for (const auto& [k, v] : entries) {
      if (!values_.emplace(k, v).second) fail("duplicate key '" + k + "'");
    }
  }

  std::string text(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) fail("missing key '" + key + "'");
    used_.insert(key);
    return it->second;
  }
  std::size_t size(const std::string& key) {
    std::int64_t v = 0;
    if (!parse_int(text(key), v) || v < 0) fail("bad integer for '" + key + "'");
    return static_cast<std::size_t>(v);
  }
  double real(const std::string& key) {
    double v = 0.0;
    if (!parse_double(text(key), v)) fail("bad number for '" + key + "'");
    return v;
  }
  std::vector<std::size_t> sizes(const std::string& key) {
    std::vector<std::size_t> out;
    const std::string list = text(key);
    for (auto part : split(list, ',')) {
      std::int64_t v = 0;
      if (!parse_int(part, v) || v < 0) fail("bad integer list for '" + key + "'");
      out.push_back(static_cast<std::size_t>(v));
    }
    return out;
  }
  QuantileLevels levels(const std::string& key) {
    std::vector<double> out;
    const std::string list = text(key);
    for (auto part : split(list, ',')) {
      double v = 0.0;
      if (!parse_double(part, v)) fail("bad level list for '" + key + "'");
      out.push_back(v);
    }
    return QuantileLevels(std::move(out));
  }
  void finish() const {
    for (const auto& [k, v] : values_) {
      if (!used_.count(k)) fail("unknown key '" + k + "'");
    }
  }

 private:
  [[noreturn]] static void fail(const std::string& msg) { throw Error(ErrorCode::kFormatError, msg); }
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

}  // namespace

std::unique_ptr<QuantileModel> make_model(const SpecEntries& entries) {
  SpecReader r(entries);
  const std::string kind = r.text("kind");
  std::unique_ptr<QuantileModel> model;
  if (kind == "futurequant") {
    ModelSpec s;
    s.window_in = r.size("window_in");
    s.num_features = r.size("num_features");
    s.num_blocks = r.size("num_blocks");
    s.num_heads = r.size("num_heads");
    s.key_dim = r.size("key_dim");
    s.conv_channels = r.size("conv_channels");
    s.conv_kernel = r.size("conv_kernel");
    s.dense_units = r.sizes("dense_units");
    s.dropout_rate = r.real("dropout_rate");
    s.levels = r.levels("levels");
    model = std::make_unique<FutureQuantModel>(std::move(s));
  } else if (kind == "quantile-linear" || kind == "quantile-intercept") {
    LinearSpec s;
    s.window_in = r.size("window_in");
    s.num_features = r.size("num_features");
    s.levels = r.levels("levels");
    s.intercept_only = kind == "quantile-intercept";
    model = std::make_unique<QuantileLinearModel>(std::move(s));
  } else if (kind == "quantile-mlp") {
    MlpSpec s;
    s.window_in = r.size("window_in");
    s.num_features = r.size("num_features");
    s.hidden_units = r.sizes("hidden_units");
    s.levels = r.levels("levels");
    model = std::make_unique<QuantileMlpModel>(std::move(s));
  } else {
    throw Error(ErrorCode::kFormatError, "unknown model kind '" + kind + "'");
  }
  r.finish();
  return model;
}

std::string write_checkpoint(const QuantileModel& model) {
  std::ostringstream out;
  out << kHeader << "\n[spec]\n";
  for (const auto& [k, v] : model.spec_entries()) out << k << " = " << v << '\n';
  out << "[params]\n";
  const auto& params = model.params();
  for (std::size_t i = 0; i < params.count(); ++i) {
    const auto& s = params.layout()[i];
    out << s.name << ' ' << s.rows << ' ' << s.cols << '\n';
    const auto m = params.matrix(i);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c) out << ' ';
        out << format_double(m(r, c));
      }
      out << '\n';
    }
  }
  out << "[end]\n";
  return out.str();
}

std::unique_ptr<QuantileModel> read_checkpoint(std::string_view text) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kFormatError, "checkpoint: " + msg); };
  std::vector<std::string_view> lines = split(text, '\n');
  std::size_t pos = 0;
  auto next = [&]() -> std::string_view {
    if (pos >= lines.size()) fail("unexpected end of file");
    return trim(lines[pos++]);
  };
  if (next() != kHeader) fail("bad header");
  if (next() != "[spec]") fail("missing [spec] section");

  SpecEntries entries;
  for (std::string_view line = next(); line != "[params]"; line = next()) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("bad spec line '" + std::string(line) + "'");
    entries.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
  }
  auto model = make_model(entries);
  auto& params = model->params();
  for (std::size_t i = 0; i < params.count(); ++i) {
    const auto& s = params.layout()[i];
    const auto head = split(next(), ' ');
    std::int64_t rows = 0, cols = 0;
    if (head.size() != 3 || head[0] != s.name || !parse_int(head[1], rows) ||
        !parse_int(head[2], cols) || static_cast<std::size_t>(rows) != s.rows ||
        static_cast<std::size_t>(cols) != s.cols) {
      fail("array header mismatch for '" + s.name + "'");
    }
    auto m = params.matrix(i);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const auto cells = split(next(), ' ');
      if (cells.size() != s.cols) fail("row width mismatch in '" + s.name + "'");
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (!parse_double(cells[static_cast<std::size_t>(c)], m(r, c))) {
          fail("bad number in '" + s.name + "'");
        }
      }
    }
  }
  if (next() != "[end]") fail("trailing data before [end]");
  return model;
}

}  // namespace fq
