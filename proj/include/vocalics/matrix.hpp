#pragma once

#include <cstddef>
#include <vector>

namespace vocalics {

// Dense row-major matrix of doubles; just enough for feature tables.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  const double* row(std::size_t r) const { return &data[r * cols]; }
  double* row(std::size_t r) { return &data[r * cols]; }

  std::vector<double> row_vec(std::size_t r) const {
    return std::vector<double>(data.begin() + static_cast<long>(r * cols),
                               data.begin() + static_cast<long>((r + 1) * cols));
  }

  // rows of this matrix selected by index, in the given order
  Matrix select_rows(const std::vector<std::size_t>& idx) const {
    Matrix out(idx.size(), cols);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const double* src = row(idx[i]);
      double* dst = out.row(i);
      for (std::size_t c = 0; c < cols; ++c) dst[c] = src[c];
    }
    return out;
  }
};

}  // namespace vocalics
