// Shared test utilities: random tensor construction and error-kind capture.

#pragma once

#include <string>
#include <vector>

#include "fable/error.hpp"
#include "fable/rng.hpp"
#include "fable/tensor.hpp"

namespace testutil {

inline fable::Tensor3 random_tensor(fable::Dims3 dims, fable::Rng& rng,
                                    double scale = 1.0) {
  std::vector<double> v(dims.count());
  for (double& x : v) x = scale * rng.gaussian();
  return fable::Tensor3(dims, std::move(v));
}

// Runs f, expecting it to throw fable::Error; returns the error kind, or ""
// if nothing was thrown.
template <typename F>
std::string thrown_kind(F&& f) {
  try {
    f();
  } catch (const fable::Error& e) {
    return e.kind();
  } catch (...) {
    return "(non-fable exception)";
  }
  return "";
}

}  // namespace testutil
