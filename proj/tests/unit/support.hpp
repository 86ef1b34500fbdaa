#pragma once

#include <doctest.h>

#include "ksmooth/common.hpp"

namespace ksmooth::test {

// Kind of the ksmooth::Error thrown by f; fails the test if nothing is thrown.
template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace ksmooth::test
