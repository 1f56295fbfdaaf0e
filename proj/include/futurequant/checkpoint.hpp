#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "futurequant/model.hpp"

namespace fq {

// Text checkpoint:
//
//   FQCKPT 1
//   [spec]
//   key = value            (one line per ModelSpec field, "kind" first)
//   [params]
//   name rows cols         (one header per array, in layout order)
//   v v v ...              (rows lines of cols shortest round-trip doubles)
//   [end]
std::string write_checkpoint(const QuantileModel& model);
std::unique_ptr<QuantileModel> read_checkpoint(std::string_view text);

// Builds an uninitialized (all-zero) model from spec entries.
std::unique_ptr<QuantileModel> make_model(const SpecEntries& entries);

}  // namespace fq
