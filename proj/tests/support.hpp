#pragma once

#include <chrono>
#include <functional>
#include <vector>

#include "cyfam/tensor.hpp"

namespace support {

inline std::vector<double> coords(const cyfam::FiberGrid& g, std::size_t node) {
  std::vector<double> u(static_cast<std::size_t>(g.axes()));
  for (int a = 0; a < g.axes(); ++a) u[static_cast<std::size_t>(a)] = g.coord(node, a);
  return u;
}

inline cyfam::TensorField sample(const cyfam::GridPtr& g, const std::function<cyfam::cplx(const std::vector<double>&)>& f) {
  std::vector<cyfam::cplx> v(g->size());
  for (std::size_t p = 0; p < v.size(); ++p) v[p] = f(coords(*g, p));
  return cyfam::TensorField::scalar(g, std::move(v));
}

inline double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

}  // namespace support
