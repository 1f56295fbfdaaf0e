#include "futurequant/market_data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "futurequant/error.hpp"
#include "futurequant/io.hpp"

namespace fq {
namespace {

constexpr std::size_t kNumTickFields = std::size(kTickFields);

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

double parse_price(std::string_view text, std::size_t line, std::string_view field) {
  double v = 0.0;
  if (!parse_double(text, v) || !std::isfinite(v)) {
    throw Error(ErrorCode::kMalformedRow,
                at_line(line) + "cannot parse " + std::string(field) + " '" + std::string(text) + "'");
  }
  return v;
}

std::int64_t parse_count(std::string_view text, std::size_t line, std::string_view field) {
  std::int64_t v = 0;
  if (!parse_int(text, v)) {
    // Some feeds write integral volumes as "120.0".
    double d = 0.0;
    if (!parse_double(text, d) || d != std::floor(d) || std::abs(d) > 9.0e15) {
      throw Error(ErrorCode::kMalformedRow, at_line(line) + "cannot parse " + std::string(field) +
                                                " '" + std::string(text) + "'");
    }
    v = static_cast<std::int64_t>(d);
  }
  if (v < 0) {
    throw Error(ErrorCode::kMalformedRow, at_line(line) + std::string(field) + " is negative");
  }
  return v;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool parse_two_digits(std::string_view s, int& out) {
  if (s.size() != 2 || !std::isdigit(static_cast<unsigned char>(s[0])) ||
      !std::isdigit(static_cast<unsigned char>(s[1]))) {
    return false;
  }
  out = (s[0] - '0') * 10 + (s[1] - '0');
  return true;
}

std::optional<std::int64_t> parse_clock(std::string_view s) {
  const auto parts = split(s, ':');
  if (parts.size() != 3) return std::nullopt;
  int h = 0, m = 0, sec = 0;
  if (!parse_two_digits(parts[0], h) || !parse_two_digits(parts[1], m) ||
      !parse_two_digits(parts[2], sec) || h > 23 || m > 59 || sec > 60) {
    return std::nullopt;
  }
  return h * 3600 + m * 60 + sec;
}

std::optional<std::int64_t> parse_date(std::string_view s) {
  int y = 0;
  unsigned mo = 0, d = 0;
  if (s.size() == 10 && s[4] == '-' && s[7] == '-') {
    std::int64_t yy = 0, mm = 0, dd = 0;
    if (!parse_int(s.substr(0, 4), yy) || !parse_int(s.substr(5, 2), mm) ||
        !parse_int(s.substr(8, 2), dd)) {
      return std::nullopt;
    }
    y = static_cast<int>(yy), mo = static_cast<unsigned>(mm), d = static_cast<unsigned>(dd);
  } else if (s.size() == 8) {
    std::int64_t v = 0;
    if (!parse_int(s, v)) return std::nullopt;
    y = static_cast<int>(v / 10000), mo = static_cast<unsigned>(v / 100 % 100),
    d = static_cast<unsigned>(v % 100);
  } else {
    return std::nullopt;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{mo},
                                        std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;
  return std::chrono::sys_days{ymd}.time_since_epoch().count() * std::int64_t{86400};
}

}  // namespace

std::int64_t parse_update_time(std::string_view text) {
  text = trim(text);
  const auto sep = text.find_first_of(" T");
  if (sep == std::string_view::npos) {
    if (auto clock = parse_clock(text)) return *clock;
  } else {
    auto date = parse_date(text.substr(0, sep));
    auto clock = parse_clock(trim(text.substr(sep + 1)));
    if (date && clock) return *date + *clock;
  }
  throw Error(ErrorCode::kMalformedRow, "unparsable UpdateTime '" + std::string(text) + "'");
}

std::string format_update_time(std::int64_t seconds) {
  const std::int64_t days = floor_div(seconds, 86400);
  const std::int64_t tod = seconds - days * 86400;
  char clock[16];
  std::snprintf(clock, sizeof clock, "%02d:%02d:%02d", static_cast<int>(tod / 3600),
                static_cast<int>(tod / 60 % 60), static_cast<int>(tod % 60));
  if (days == 0) return clock;
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
  char date[32];
  std::snprintf(date, sizeof date, "%04d-%02u-%02u ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return std::string(date) + clock;
}

ParseResult parse_ticks(std::istream& in, const ParseOptions& options) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;

  std::array<std::size_t, kNumTickFields> column{};
  std::size_t header_width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) {
    throw Error(ErrorCode::kMissingField, "no header row");
  }
  {
    auto names = split(line, options.delimiter);
    header_width = names.size();
    for (std::size_t f = 0; f < kNumTickFields; ++f) {
      auto it = std::find_if(names.begin(), names.end(),
                             [&](std::string_view n) { return trim(n) == kTickFields[f]; });
      if (it == names.end()) {
        throw Error(ErrorCode::kMissingField, "header lacks " + std::string(kTickFields[f]));
      }
      column[f] = static_cast<std::size_t>(it - names.begin());
    }
  }

  std::optional<Millis> last_ts;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++result.rows;
    const auto cells = split(line, options.delimiter);
    if (cells.size() != header_width) {
      throw Error(ErrorCode::kMalformedRow, at_line(line_no) + "expected " +
                                                std::to_string(header_width) + " fields, got " +
                                                std::to_string(cells.size()));
    }
    TickRecord t;
    try {
      t.update_time = parse_update_time(cells[column[0]]);
    } catch (const Error& e) {
      throw Error(ErrorCode::kMalformedRow, at_line(line_no) + e.what());
    }
    std::int64_t ms = 0;
    if (!parse_int(cells[column[1]], ms) || ms < 0 || ms > 999) {
      throw Error(ErrorCode::kMalformedRow, at_line(line_no) + "UpdateMillisec out of [0,999]");
    }
    t.update_millisec = static_cast<int>(ms);
    t.last_price = parse_price(cells[column[2]], line_no, kTickFields[2]);
    t.volume = parse_count(cells[column[3]], line_no, kTickFields[3]);
    t.bid_price1 = parse_price(cells[column[4]], line_no, kTickFields[4]);
    t.bid_volume1 = parse_count(cells[column[5]], line_no, kTickFields[5]);
    t.ask_price1 = parse_price(cells[column[6]], line_no, kTickFields[6]);
    t.ask_volume1 = parse_count(cells[column[7]], line_no, kTickFields[7]);

    if (t.last_price <= 0.0) {
      throw Error(ErrorCode::kMalformedRow, at_line(line_no) + "LastPrice must be positive");
    }
    if (t.bid_price1 < 0.0 || t.ask_price1 < 0.0) {
      throw Error(ErrorCode::kMalformedRow, at_line(line_no) + "negative quote");
    }

    const Millis ts = t.timestamp();
    if (last_ts && ts < *last_ts - options.timestamp_tolerance_ms) {
      throw Error(ErrorCode::kNonMonotoneTimestamp,
                  at_line(line_no) + "timestamp " + std::to_string(ts) + " precedes " +
                      std::to_string(*last_ts));
    }
    last_ts = last_ts ? std::max(*last_ts, ts) : ts;

    if (t.bid_price1 == 0.0 || t.ask_price1 == 0.0) {
      ++result.dropped_missing_quote;
      continue;
    }
    if (t.ask_price1 < t.bid_price1) {
      throw Error(ErrorCode::kMalformedRow, at_line(line_no) + "crossed book (ask < bid)");
    }
    result.ticks.push_back(t);
  }
  return result;
}

void write_ticks_csv(std::ostream& out, std::span<const TickRecord> ticks, char delimiter) {
  for (std::size_t f = 0; f < kNumTickFields; ++f) {
    if (f) out << delimiter;
    out << kTickFields[f];
  }
  out << '\n';
  for (const auto& t : ticks) {
    out << format_update_time(t.update_time) << delimiter << t.update_millisec << delimiter
        << format_double(t.last_price) << delimiter << t.volume << delimiter
        << format_double(t.bid_price1) << delimiter << t.bid_volume1 << delimiter
        << format_double(t.ask_price1) << delimiter << t.ask_volume1 << '\n';
  }
}

std::vector<Bar> resample(std::span<const TickRecord> ticks, std::chrono::milliseconds interval) {
  if (ticks.empty()) throw Error(ErrorCode::kEmptyInput, "resample needs at least one tick");
  const std::int64_t width = interval.count();
  if (width <= 0) throw Error(ErrorCode::kInvalidArgument, "bar interval must be positive");

  std::vector<Bar> bars;
  std::int64_t bucket = floor_div(ticks.front().timestamp(), width);
  auto open_bar = [&](std::int64_t b, double price) {
    Bar bar;
    bar.open_time = b * width;
    bar.open = bar.high = bar.low = bar.close = price;
    return bar;
  };
  bars.push_back(open_bar(bucket, ticks.front().last_price));
  bars.back().spread = ticks.front().ask_price1 - ticks.front().bid_price1;

  for (std::size_t i = 0; i < ticks.size(); ++i) {
    const auto& t = ticks[i];
    const std::int64_t b = floor_div(t.timestamp(), width);
    if (b < bucket) {
      throw Error(ErrorCode::kNonMonotoneTimestamp, "ticks must be time ordered");
    }
    if (b > bucket) {
      const Bar prev = bars.back();
      for (std::int64_t g = bucket + 1; g < b; ++g) {
        Bar fill = open_bar(g, prev.close);
        fill.spread = prev.spread;
        bars.push_back(fill);
      }
      bars.push_back(open_bar(b, t.last_price));
      bucket = b;
    }
    Bar& bar = bars.back();
    bar.high = std::max(bar.high, t.last_price);
    bar.low = std::min(bar.low, t.last_price);
    bar.close = t.last_price;
    bar.spread = t.ask_price1 - t.bid_price1;
    if (i > 0) {
      bar.volume_delta += std::max<std::int64_t>(0, t.volume - ticks[i - 1].volume);
    }
  }
  return bars;
}

void write_bars_csv(std::ostream& out, std::span<const Bar> bars) {
  out << "open_time,open,high,low,close,volume_delta,spread\n";
  for (const auto& b : bars) {
    out << b.open_time << ',' << format_double(b.open) << ',' << format_double(b.high) << ','
        << format_double(b.low) << ',' << format_double(b.close) << ',' << b.volume_delta << ','
        << format_double(b.spread) << '\n';
  }
}

std::vector<Bar> read_bars_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "open_time,open,high,low,close,volume_delta,spread") {
    throw Error(ErrorCode::kFormatError, "bar file header mismatch");
  }
  std::vector<Bar> bars;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    Bar b;
    if (cells.size() != 7 || !parse_int(cells[0], b.open_time) || !parse_double(cells[1], b.open) ||
        !parse_double(cells[2], b.high) || !parse_double(cells[3], b.low) ||
        !parse_double(cells[4], b.close) || !parse_int(cells[5], b.volume_delta) ||
        !parse_double(cells[6], b.spread)) {
      throw Error(ErrorCode::kMalformedRow, at_line(line_no) + "bad bar row");
    }
    bars.push_back(b);
  }
  return bars;
}

std::string_view to_string(Feature feature) noexcept {
  switch (feature) {
    case Feature::kClose: return "close";
    case Feature::kSpread: return "spread";
    case Feature::kVolumeDelta: return "volume_delta";
    case Feature::kRange: return "range";
  }
  return "?";
}

Feature parse_feature(std::string_view name) {
  name = trim(name);
  for (Feature f : {Feature::kClose, Feature::kSpread, Feature::kVolumeDelta, Feature::kRange}) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown feature '" + std::string(name) + "'");
}

double feature_value(const Bar& bar, Feature feature) noexcept {
  switch (feature) {
    case Feature::kClose: return bar.close;
    case Feature::kSpread: return bar.spread;
    case Feature::kVolumeDelta: return static_cast<double>(bar.volume_delta);
    case Feature::kRange: return bar.high - bar.low;
  }
  return 0.0;
}

void NormalizationParams::validate() const {
  if (x_min.size() != x_max.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "x_min/x_max length differ");
  }
  for (std::size_t f = 0; f < x_min.size(); ++f) {
    if (!(x_max[f] > x_min[f]) || !std::isfinite(x_min[f]) || !std::isfinite(x_max[f])) {
      throw Error(ErrorCode::kDegenerateFeature, "feature " + std::to_string(f) + " has zero range");
    }
  }
}

NormalizationParams fit_minmax(std::span<const std::vector<double>> columns) {
  NormalizationParams p;
  for (std::size_t f = 0; f < columns.size(); ++f) {
    const auto& col = columns[f];
    if (col.empty()) throw Error(ErrorCode::kEmptyInput, "feature " + std::to_string(f) + " is empty");
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    if (!(*hi > *lo)) {
      throw Error(ErrorCode::kDegenerateFeature, "feature " + std::to_string(f) + " is constant");
    }
    p.x_min.push_back(*lo);
    p.x_max.push_back(*hi);
  }
  return p;
}

Matrix apply_minmax(const Matrix& values, const NormalizationParams& params) {
  params.validate();
  if (static_cast<std::size_t>(values.cols()) != params.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "column count differs from fitted features");
  }
  Matrix out(values.rows(), values.cols());
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      out(r, c) = params.apply(values(r, c), static_cast<std::size_t>(c));
    }
  }
  return out;
}

Matrix invert_minmax(const Matrix& normalized, const NormalizationParams& params) {
  params.validate();
  if (static_cast<std::size_t>(normalized.cols()) != params.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "column count differs from fitted features");
  }
  Matrix out(normalized.rows(), normalized.cols());
  for (Eigen::Index r = 0; r < normalized.rows(); ++r) {
    for (Eigen::Index c = 0; c < normalized.cols(); ++c) {
      out(r, c) = params.invert(normalized(r, c), static_cast<std::size_t>(c));
    }
  }
  return out;
}

WindowedDataset WindowedDataset::slice(std::size_t begin, std::size_t end) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = begin; i < end; ++i) idx.push_back(i);
  WindowedDataset out;
  out.inputs = inputs.gather(idx);
  out.targets = targets.middleRows(static_cast<Eigen::Index>(begin),
                                   static_cast<Eigen::Index>(end - begin));
  out.feature_names = feature_names;
  out.norm = norm;
  out.target_norm = target_norm;
  out.input_end_time.assign(input_end_time.begin() + static_cast<std::ptrdiff_t>(begin),
                            input_end_time.begin() + static_cast<std::ptrdiff_t>(end));
  out.target_time.assign(target_time.begin() + static_cast<std::ptrdiff_t>(begin),
                         target_time.begin() + static_cast<std::ptrdiff_t>(end));
  out.target_index.assign(target_index.begin() + static_cast<std::ptrdiff_t>(begin),
                          target_index.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

WindowedDataset make_windows(std::span<const Bar> bars, std::span<const Feature> features,
                             const WindowShape& shape) {
  if (shape.window_in == 0 || shape.window_out == 0 || shape.stride == 0) {
    throw Error(ErrorCode::kInvalidArgument, "window sizes and stride must be >= 1");
  }
  if (features.empty()) throw Error(ErrorCode::kInvalidArgument, "no features selected");
  const std::size_t span_len = shape.window_in + shape.window_out;
  if (bars.size() < span_len) {
    throw Error(ErrorCode::kInsufficientData,
                std::to_string(bars.size()) + " bars cannot hold a window of " +
                    std::to_string(shape.window_in) + " + " + std::to_string(shape.window_out));
  }
  const std::size_t n = (bars.size() - span_len) / shape.stride + 1;
  const std::size_t nf = features.size();

  WindowedDataset ds;
  ds.inputs = Tensor3(n, shape.window_in, nf);
  ds.targets = Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(shape.window_out));
  for (Feature f : features) ds.feature_names.emplace_back(to_string(f));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t start = i * shape.stride;
    for (std::size_t t = 0; t < shape.window_in; ++t) {
      for (std::size_t f = 0; f < nf; ++f) {
        ds.inputs(i, t, f) = feature_value(bars[start + t], features[f]);
      }
    }
    const std::size_t first_target = start + shape.window_in;
    for (std::size_t k = 0; k < shape.window_out; ++k) {
      ds.targets(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          bars[first_target + k].close;
    }
    ds.input_end_time.push_back(bars[first_target - 1].open_time);
    ds.target_time.push_back(bars[first_target].open_time);
    ds.target_index.push_back(first_target);
  }
  return ds;
}

WindowedDataset normalized(const WindowedDataset& raw, const NormalizationParams& norm,
                           const NormalizationParams& target_norm) {
  norm.validate();
  target_norm.validate();
  if (norm.size() != raw.inputs.features() || target_norm.size() != 1) {
    throw Error(ErrorCode::kDimensionMismatch, "normalization does not match dataset features");
  }
  if (raw.normalized()) throw Error(ErrorCode::kInvalidArgument, "dataset already normalized");
  WindowedDataset out = raw;
  for (std::size_t i = 0; i < out.inputs.samples(); ++i) {
    for (std::size_t t = 0; t < out.inputs.steps(); ++t) {
      for (std::size_t f = 0; f < out.inputs.features(); ++f) {
        out.inputs(i, t, f) = norm.apply(raw.inputs(i, t, f), f);
      }
    }
  }
  out.targets = raw.targets.unaryExpr([&](double y) { return target_norm.apply(y, 0); });
  out.norm = norm;
  out.target_norm = target_norm;
  return out;
}

DatasetSplits prepare_splits(std::span<const Bar> bars, std::span<const Feature> features,
                             const WindowShape& shape, std::span<const double> fractions) {
  if (fractions.size() != 3) {
    throw Error(ErrorCode::kInvalidArgument, "expected train/validation/test fractions");
  }
  double total = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "negative split fraction");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "split fractions must sum to 1");
  }
  const auto n_bars = static_cast<double>(bars.size());
  DatasetSplits s;
  s.train_bar_end = static_cast<std::size_t>(std::floor(n_bars * fractions[0]));
  s.validation_bar_end =
      static_cast<std::size_t>(std::floor(n_bars * (fractions[0] + fractions[1])));

  const WindowedDataset raw = make_windows(bars, features, shape);

  std::vector<std::vector<double>> columns(features.size());
  std::vector<std::vector<double>> closes(1);
  for (std::size_t b = 0; b < s.train_bar_end; ++b) {
    for (std::size_t f = 0; f < features.size(); ++f) {
      columns[f].push_back(feature_value(bars[b], features[f]));
    }
    closes[0].push_back(bars[b].close);
  }
  const NormalizationParams norm = fit_minmax(columns);
  const NormalizationParams target_norm = fit_minmax(closes);
  const WindowedDataset all = normalized(raw, norm, target_norm);

  std::size_t train_end = 0;
  std::size_t val_end = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    // Every target bar of a sample must stay inside its split.
    const std::size_t last_target = all.target_index[i] + shape.window_out - 1;
    if (last_target < s.train_bar_end) train_end = i + 1;
    if (last_target < s.validation_bar_end) val_end = i + 1;
  }
  std::size_t val_begin = train_end;
  while (val_begin < all.size() && all.target_index[val_begin] < s.train_bar_end) ++val_begin;
  std::size_t test_begin = std::max(val_end, val_begin);
  while (test_begin < all.size() && all.target_index[test_begin] < s.validation_bar_end) {
    ++test_begin;
  }
  s.train = all.slice(0, train_end);
  s.validation = all.slice(val_begin, std::max(val_begin, val_end));
  s.test = all.slice(test_begin, all.size());
  return s;
}

}  // namespace fq
