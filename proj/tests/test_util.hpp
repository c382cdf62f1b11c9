#pragma once

#include "doctest.h"
#include "qsl/error.hpp"

#define CHECK_ERROR_CODE(expr, expected)                  \
  do {                                                    \
    bool thrown_ = false;                                 \
    try {                                                 \
      (void)(expr);                                       \
    } catch (const qsl::Error& e_) {                      \
      thrown_ = true;                                     \
      CHECK_MESSAGE(e_.code() == (expected), e_.what());  \
    }                                                     \
    CHECK_MESSAGE(thrown_, "no qsl::Error from " #expr); \
  } while (0)
