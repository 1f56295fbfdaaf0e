#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "futurequant/dataset_io.hpp"
#include "futurequant/market_data.hpp"
#include "test_util.hpp"

using namespace fq;

namespace {

const char* kHeader = "UpdateTime,UpdateMillisec,LastPrice,Volume,BidPrice1,BidVolume1,AskPrice1,AskVolume1\n";

ParseResult parse(const std::string& body) {
  std::istringstream in(kHeader + body);
  return parse_ticks(in);
}

TickRecord tick(std::int64_t sec, int ms, double price, std::int64_t volume) {
  return TickRecord{sec, ms, price, volume, price - 1, 1, price + 1, 1};
}

std::vector<Bar> ramp_bars(std::size_t n) {
  std::vector<Bar> bars;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = 100.0 + static_cast<double>(i);
    bars.push_back(Bar{static_cast<Millis>(i) * 1000, c, c + 0.5, c - 0.5, c, 1, 1.0});
  }
  return bars;
}

}  // namespace

TEST(ParseTicks, MapsFieldsDirectly) {
  const auto r = parse("09:30:00,500,5742.0,120,5741.0,3,5743.0,5\n");
  ASSERT_EQ(r.ticks.size(), 1u);
  const auto& t = r.ticks[0];
  EXPECT_EQ(t.last_price, 5742.0);
  EXPECT_EQ(t.bid_price1, 5741.0);
  EXPECT_EQ(t.ask_price1, 5743.0);
  EXPECT_EQ(t.volume, 120);
  EXPECT_EQ(t.update_millisec, 500);
  EXPECT_EQ(t.update_time, 9 * 3600 + 30 * 60);
}

TEST(ParseTicks, RejectsCrossedBook) {
  EXPECT_FQ_ERROR(parse("09:30:00,500,5742.0,120,5744.0,3,5743.0,5\n"), ErrorCode::kMalformedRow);
}

TEST(ParseTicks, EmptyBodyIsEmpty) {
  const auto r = parse("");
  EXPECT_TRUE(r.ticks.empty());
  EXPECT_EQ(r.rows, 0u);
}

TEST(ParseTicks, HeaderInAnyOrderWithExtraColumns) {
  std::istringstream in(
      "AskVolume1,AskPrice1,Extra,BidVolume1,BidPrice1,Volume,LastPrice,UpdateMillisec,UpdateTime\n"
      "5,5743.0,x,3,5741.0,120,5742.0,500,09:30:00\n");
  const auto r = parse_ticks(in);
  ASSERT_EQ(r.ticks.size(), 1u);
  EXPECT_EQ(r.ticks[0].ask_volume1, 5);
  EXPECT_EQ(r.ticks[0].last_price, 5742.0);
}

TEST(ParseTicks, Errors) {
  EXPECT_FQ_ERROR(parse("09:30:00,500,5742.0,120\n"), ErrorCode::kMalformedRow);
  EXPECT_FQ_ERROR(parse("09:30:00,500,abc,120,5741.0,3,5743.0,5\n"), ErrorCode::kMalformedRow);
  EXPECT_FQ_ERROR(parse("09:30:00,500,-1,120,0,3,0,5\n"), ErrorCode::kMalformedRow);
  EXPECT_FQ_ERROR(parse("09:30:01,0,1,1,0.5,1,1.5,1\n09:30:00,999,1,1,0.5,1,1.5,1\n"),
                  ErrorCode::kNonMonotoneTimestamp);
  std::istringstream missing("UpdateTime,UpdateMillisec,LastPrice\n");
  EXPECT_FQ_ERROR(parse_ticks(missing), ErrorCode::kMissingField);
}

TEST(ParseTicks, ErrorNamesLine) {
  try {
    parse("09:30:00,0,1,1,0.5,1,1.5,1\n09:30:01,0,1,1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ParseTicks, EqualTimestampsKeepOrderAndMissingQuotesAreCounted) {
  const auto r = parse(
      "09:30:00,0,10,1,9,1,11,1\n"
      "09:30:00,0,12,2,11,1,13,1\n"
      "09:30:00,500,12,2,0,1,13,1\n");
  ASSERT_EQ(r.ticks.size(), 2u);
  EXPECT_EQ(r.ticks[0].last_price, 10.0);
  EXPECT_EQ(r.ticks[1].last_price, 12.0);
  EXPECT_EQ(r.dropped_missing_quote, 1u);
  EXPECT_EQ(r.ticks.size() + r.dropped_missing_quote, r.rows);
}

TEST(ParseTicks, WriteThenParseRoundTrips) {
  std::vector<TickRecord> ticks{tick(1'700'000'000, 0, 10.25, 1), tick(1'700'000'000, 500, 10.5, 3)};
  std::stringstream s;
  write_ticks_csv(s, ticks);
  const auto r = parse_ticks(s);
  ASSERT_EQ(r.ticks.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(r.ticks[i].timestamp(), ticks[i].timestamp());
    EXPECT_EQ(r.ticks[i].last_price, ticks[i].last_price);
    EXPECT_EQ(r.ticks[i].volume, ticks[i].volume);
  }
}

TEST(UpdateTime, FormatsAndParses) {
  EXPECT_EQ(parse_update_time("00:00:10"), 10);
  const auto t = parse_update_time("2023-01-01 00:00:00");
  EXPECT_EQ(t, 1'672'531'200);
  EXPECT_EQ(parse_update_time("2023-01-01T00:00:00"), t);
  EXPECT_EQ(parse_update_time("20230101 00:00:00"), t);
  EXPECT_EQ(parse_update_time(format_update_time(t + 3723)), t + 3723);
  EXPECT_FQ_ERROR(parse_update_time("25:99"), ErrorCode::kMalformedRow);
}

TEST(Resample, AggregatesOneInterval) {
  std::vector<TickRecord> ticks{tick(0, 0, 5, 1), tick(0, 100, 7, 2), tick(0, 200, 6, 4)};
  const auto bars = resample(ticks, std::chrono::milliseconds(1000));
  ASSERT_EQ(bars.size(), 1u);
  EXPECT_EQ(bars[0].open, 5.0);
  EXPECT_EQ(bars[0].high, 7.0);
  EXPECT_EQ(bars[0].low, 5.0);
  EXPECT_EQ(bars[0].close, 6.0);
}

TEST(Resample, SingleTick) {
  std::vector<TickRecord> ticks{tick(3, 0, 9, 1)};
  const auto bars = resample(ticks, std::chrono::milliseconds(1000));
  ASSERT_EQ(bars.size(), 1u);
  EXPECT_EQ(bars[0].open, 9.0);
  EXPECT_EQ(bars[0].high, 9.0);
  EXPECT_EQ(bars[0].low, 9.0);
  EXPECT_EQ(bars[0].close, 9.0);
  EXPECT_EQ(bars[0].open_time, 3000);
}

TEST(Resample, ForwardFillsGaps) {
  std::vector<TickRecord> ticks{tick(0, 0, 5, 1), tick(2, 0, 8, 3)};
  const auto bars = resample(ticks, std::chrono::milliseconds(1000));
  ASSERT_EQ(bars.size(), 3u);
  EXPECT_EQ(bars[1].open, 5.0);
  EXPECT_EQ(bars[1].high, 5.0);
  EXPECT_EQ(bars[1].low, 5.0);
  EXPECT_EQ(bars[1].close, 5.0);
  EXPECT_EQ(bars[1].volume_delta, 0);
  EXPECT_EQ(bars[2].close, 8.0);
}

TEST(Resample, EmptyInput) {
  EXPECT_FQ_ERROR(resample({}, std::chrono::milliseconds(1000)), ErrorCode::kEmptyInput);
}

TEST(Resample, ConservesVolumeAndOrdersOhlc) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> price(90, 110);
  std::uniform_int_distribution<int> step(0, 900), vol(0, 5);
  std::vector<TickRecord> ticks;
  Millis ts = 0;
  std::int64_t volume = 100;
  for (int i = 0; i < 500; ++i) {
    ts += step(rng);
    volume += vol(rng);
    ticks.push_back(tick(ts / 1000, static_cast<int>(ts % 1000), price(rng), volume));
  }
  const auto bars = resample(ticks, std::chrono::milliseconds(2000));
  std::int64_t total = 0;
  for (const Bar& b : bars) {
    total += b.volume_delta;
    EXPECT_LE(b.low, std::min(b.open, b.close));
    EXPECT_GE(b.high, std::max(b.open, b.close));
  }
  EXPECT_EQ(total, ticks.back().volume - ticks.front().volume);
}

TEST(Bars, CsvRoundTrip) {
  const auto bars = ramp_bars(4);
  std::stringstream s;
  write_bars_csv(s, bars);
  const auto back = read_bars_csv(s);
  ASSERT_EQ(back.size(), bars.size());
  for (std::size_t i = 0; i < bars.size(); ++i) {
    EXPECT_EQ(back[i].open_time, bars[i].open_time);
    EXPECT_EQ(back[i].close, bars[i].close);
    EXPECT_EQ(back[i].high, bars[i].high);
  }
}

TEST(MinMax, FitsExtrema) {
  std::vector<std::vector<double>> cols{{0, 5, 10}, {-1, 3, 2}};
  const auto p = fit_minmax(cols);
  EXPECT_EQ(p.x_min[0], 0.0);
  EXPECT_EQ(p.x_max[0], 10.0);
  EXPECT_EQ(p.x_min[1], -1.0);
  EXPECT_EQ(p.x_max[1], 3.0);
  std::vector<std::vector<double>> flat{{3, 3, 3}};
  EXPECT_FQ_ERROR(fit_minmax(flat), ErrorCode::kDegenerateFeature);
}

TEST(MinMax, ApplyAndExtrapolate) {
  NormalizationParams p{{0.0}, {10.0}};
  Matrix x(4, 1);
  x << 0, 5, 10, 12;
  const Matrix z = apply_minmax(x, p);
  EXPECT_EQ(z(0, 0), 0.0);
  EXPECT_EQ(z(1, 0), 0.5);
  EXPECT_EQ(z(2, 0), 1.0);
  EXPECT_DOUBLE_EQ(z(3, 0), 1.2);
}

TEST(MinMax, RoundTripProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = u(rng), b = a + std::abs(u(rng)) + 1e-3;
    NormalizationParams p{{a}, {b}};
    Matrix x(20, 1);
    for (int i = 0; i < 20; ++i) x(i, 0) = u(rng);
    const Matrix back = invert_minmax(apply_minmax(x, p), p);
    for (int i = 0; i < 20; ++i) {
      EXPECT_LE(std::abs(back(i, 0) - x(i, 0)), 1e-12 * std::max(1.0, std::abs(x(i, 0))));
    }
  }
}

TEST(Windows, Counting) {
  const std::vector<Feature> f{Feature::kClose};
  EXPECT_EQ(make_windows(ramp_bars(7), f, {5, 1, 1}).size(), 2u);
  const auto six = make_windows(ramp_bars(6), f, {5, 1, 1});
  ASSERT_EQ(six.size(), 1u);
  EXPECT_EQ(six.targets(0, 0), ramp_bars(6)[5].close);
  EXPECT_EQ(six.target_index[0], 5u);
  EXPECT_FQ_ERROR(make_windows(ramp_bars(5), f, {5, 1, 1}), ErrorCode::kInsufficientData);
  EXPECT_EQ(make_windows(ramp_bars(20), f, {5, 1, 3}).size(), (20u - 5 - 1) / 3 + 1);
}

TEST(Windows, ShapeAndNoLeakage) {
  const std::vector<Feature> f{Feature::kClose, Feature::kSpread, Feature::kRange};
  const auto ds = make_windows(ramp_bars(30), f, {5, 2, 1});
  EXPECT_EQ(ds.inputs.steps(), 5u);
  EXPECT_EQ(ds.inputs.features(), 3u);
  EXPECT_EQ(ds.targets.cols(), 2);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_LT(ds.input_end_time[i], ds.target_time[i]);
    EXPECT_EQ(ds.inputs(i, 4, 0) + 1.0, ds.targets(static_cast<Eigen::Index>(i), 0));
  }
}

TEST(Splits, ChronologicalAndTrainFitted) {
  const auto bars = ramp_bars(100);
  const std::vector<Feature> f{Feature::kClose};
  const std::vector<double> frac{0.7, 0.15, 0.15};
  const auto s = prepare_splits(bars, f, {5, 1, 1}, frac);
  EXPECT_EQ(s.train_bar_end, 70u);
  EXPECT_EQ(s.validation_bar_end, 85u);
  EXPECT_EQ(s.train.norm.x_min[0], 100.0);
  EXPECT_EQ(s.train.norm.x_max[0], 169.0);
  EXPECT_EQ(s.train.size() + s.validation.size() + s.test.size(), 95u);
  for (std::size_t t : s.train.target_index) EXPECT_LT(t, 70u);
  for (std::size_t t : s.validation.target_index) {
    EXPECT_GE(t, 70u);
    EXPECT_LT(t, 85u);
  }
  for (std::size_t t : s.test.target_index) EXPECT_GE(t, 85u);
  // Test inputs extrapolate past the training range without error.
  EXPECT_GT(s.test.inputs(s.test.size() - 1, 4, 0), 1.0);
}

TEST(DatasetIo, RoundTripsBitExactly) {
  const auto bars = ramp_bars(60);
  const std::vector<Feature> f{Feature::kClose, Feature::kVolumeDelta};
  auto b2 = bars;
  for (std::size_t i = 0; i < b2.size(); ++i) b2[i].volume_delta = static_cast<std::int64_t>(i % 7);
  const std::vector<double> frac{0.7, 0.15, 0.15};
  const auto s = prepare_splits(b2, f, {5, 1, 1}, frac);
  const std::string bytes = serialize_dataset(s.test);
  EXPECT_EQ(bytes.substr(0, 8), "FQWINDOW");
  std::istringstream in(bytes);
  const auto back = read_dataset(in);
  EXPECT_EQ(serialize_dataset(back), bytes);
  EXPECT_EQ(back.feature_names, s.test.feature_names);
  EXPECT_EQ(back.target_index, s.test.target_index);
  EXPECT_EQ(back.target_norm.x_max, s.test.target_norm.x_max);

  std::string corrupt = bytes;
  corrupt[0] = 'X';
  std::istringstream bad(corrupt);
  EXPECT_FQ_ERROR(read_dataset(bad), ErrorCode::kFormatError);
}
