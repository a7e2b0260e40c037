// Copyright 2026 The tamgraph Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tam/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Core>

namespace tam {

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + std::to_string(rows_) + "x" +
                     std::to_string(cols_));
  }
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("ragged initializer for Tensor");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor(r, c, std::move(data));
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t(n, n);
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

namespace {

std::string shape_str(const Tensor& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

}  // namespace

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using Map = Eigen::Map<RowMajor>;

ConstMap view(const Tensor& t) {
  return ConstMap(t.data().data(), static_cast<Eigen::Index>(t.rows()),
                  static_cast<Eigen::Index>(t.cols()));
}

Map view(Tensor& t) {
  return Map(t.data().data(), static_cast<Eigen::Index>(t.rows()),
             static_cast<Eigen::Index>(t.cols()));
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + shape_str(a) + " * " + shape_str(b));
  }
  Tensor out(a.rows(), b.cols());
  view(out).noalias() += view(a) * view(b);
  return out;
}

void add_matmul_tn(const Tensor& a, const Tensor& b, Tensor& out) {
  if (a.rows() != b.rows() || out.rows() != a.cols() || out.cols() != b.cols()) {
    throw ShapeError("matmul_tn: " + shape_str(a) + "^T * " + shape_str(b) + " into " +
                     shape_str(out));
  }
  view(out).noalias() += view(a).transpose() * view(b);
}

void add_matmul_nt(const Tensor& a, const Tensor& b, Tensor& out) {
  if (a.cols() != b.cols() || out.rows() != a.rows() || out.cols() != b.rows()) {
    throw ShapeError("matmul_nt: " + shape_str(a) + " * " + shape_str(b) + "^T into " +
                     shape_str(out));
  }
  view(out).noalias() += view(a) * view(b).transpose();
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  Tensor out(a.cols(), b.cols());
  add_matmul_tn(a, b, out);
  return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  Tensor out(a.rows(), b.rows());
  add_matmul_nt(a, b, out);
  return out;
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k) {
    if (static_cast<std::size_t>(indices[k]) == c) return values[k];
  }
  return 0.0;
}

Tensor SparseMatrix::to_dense() const {
  Tensor out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k) out(r, indices[k]) += values[k];
  }
  return out;
}

void SparseMatrix::validate() const {
  if (offsets.size() != rows + 1 || offsets.front() != 0 || offsets.back() != values.size() ||
      indices.size() != values.size()) {
    throw ShapeError("sparse matrix: inconsistent CSR arrays");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (offsets[r] > offsets[r + 1]) throw ShapeError("sparse matrix: offsets decrease");
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (indices[k] < 0 || static_cast<std::size_t>(indices[k]) >= cols) {
      throw ShapeError("sparse matrix: column index out of range");
    }
    if (!std::isfinite(values[k])) throw NumericError("sparse matrix: non-finite value");
  }
}

Tensor spmm(const SparseMatrix& a, const Tensor& x) {
  if (a.cols != x.rows()) {
    throw ShapeError("spmm: sparse " + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                     " * " + shape_str(x));
  }
  Tensor out(a.rows, x.cols());
  const std::size_t n = x.cols();
  for (std::size_t r = 0; r < a.rows; ++r) {
    double* orow = out.row(r).data();
    for (std::size_t k = a.offsets[r]; k < a.offsets[r + 1]; ++k) {
      const double w = a.values[k];
      const double* xrow = x.row(a.indices[k]).data();
      for (std::size_t j = 0; j < n; ++j) orow[j] += w * xrow[j];
    }
  }
  return out;
}

void add_spmm_t(const SparseMatrix& a, const Tensor& x, Tensor& out) {
  if (a.rows != x.rows() || out.rows() != a.cols || out.cols() != x.cols()) {
    throw ShapeError("spmm_t: sparse^T " + std::to_string(a.cols) + "x" +
                     std::to_string(a.rows) + " * " + shape_str(x) + " into " + shape_str(out));
  }
  const std::size_t n = x.cols();
  for (std::size_t r = 0; r < a.rows; ++r) {
    const double* xrow = x.row(r).data();
    for (std::size_t k = a.offsets[r]; k < a.offsets[r + 1]; ++k) {
      const double w = a.values[k];
      double* orow = out.row(a.indices[k]).data();
      for (std::size_t j = 0; j < n; ++j) orow[j] += w * xrow[j];
    }
  }
}

Tensor spmm_t(const SparseMatrix& a, const Tensor& x) {
  Tensor out(a.cols, x.cols());
  add_spmm_t(a, x, out);
  return out;
}

}  // namespace tam
