#pragma once

#include <gtest/gtest.h>

#include "futurequant/error.hpp"

#define EXPECT_FQ_ERROR(statement, error_code)                                  \
  do {                                                                          \
    try {                                                                       \
      statement;                                                                \
      ADD_FAILURE() << "expected " << fq::to_string(error_code) << ", no throw"; \
    } catch (const fq::Error& e) {                                              \
      EXPECT_EQ(e.code(), error_code) << e.what();                              \
    }                                                                           \
  } while (0)
