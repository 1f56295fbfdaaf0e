#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "futurequant/market_data.hpp"

namespace fq {

// Binary windowed-dataset artifact. All integers and doubles little-endian.
//
//   offset 0   8 bytes   magic "FQWINDOW"
//          8   u32       version (1)
//         12   u64 x 3   N, T, F
//         36   f64 x N*T*F  inputs, row-major (sample, step, feature)
//   then       u64       W (targets per sample)
//              f64 x N*W targets, row-major
//              u64 x N   target bar index
//              i64 x N   input window end time (ms)
//              i64 x N   target time (ms)
//              u8        1 when normalized, else 0
//              [f64 x F x_min, f64 x F x_max, f64 target_min, f64 target_max]  if normalized
//              F x (u32 length, bytes)  feature names
inline constexpr std::array<char, 8> kDatasetMagic = {'F', 'Q', 'W', 'I', 'N', 'D', 'O', 'W'};
inline constexpr std::uint32_t kDatasetVersion = 1;

void write_dataset(std::ostream& out, const WindowedDataset& ds);
WindowedDataset read_dataset(std::istream& in);

std::string serialize_dataset(const WindowedDataset& ds);

}  // namespace fq
