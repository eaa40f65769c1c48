// Copyright 2026 The ESAL Authors.
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

#include "esal/tensor.h"

#include <algorithm>
#include <utility>

#include "esal/errors.h"

namespace esal {

namespace {

int64_t Volume(const std::vector<int>& shape) {
  int64_t n = 1;
  for (int d : shape) {
    if (d < 0) throw ShapeError("negative extent in shape " + ShapeString(shape));
    n *= d;
  }
  return n;
}

}  // namespace

std::string ShapeString(const std::vector<int>& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

template <typename T>
Tensor<T>::Tensor(std::vector<int> shape, T fill)
    : shape_(std::move(shape)), data_(Volume(shape_), fill) {}

template <typename T>
Tensor<T>::Tensor(std::vector<int> shape, std::vector<T> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (Volume(shape_) != static_cast<int64_t>(data_.size())) {
    throw ShapeError("data size " + std::to_string(data_.size()) + " does not match shape " +
                     ShapeString(shape_));
  }
}

template <typename T>
Tensor<T> Tensor<T>::FromRows(std::initializer_list<std::initializer_list<T>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r ? static_cast<int>(rows.begin()->size()) : 0;
  std::vector<T> data;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != c) throw ShapeError("ragged rows in FromRows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor({r, c}, std::move(data));
}

template <typename T>
void Tensor<T>::Fill(T v) {
  std::fill(data_.begin(), data_.end(), v);
}

template <typename T>
void Tensor<T>::Reshape(std::vector<int> shape) {
  if (Volume(shape) != size()) {
    throw ShapeError("cannot reshape " + ShapeString(shape_) + " to " + ShapeString(shape));
  }
  shape_ = std::move(shape);
}

template class Tensor<float>;
template class Tensor<double>;

namespace kernels {

template <typename T>
void Gemm(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate) {
  if (!accumulate) std::fill(c, c + int64_t{m} * n, T(0));
  for (int i = 0; i < m; ++i) {
    T* crow = c + int64_t{i} * n;
    const T* arow = a + int64_t{i} * k;
    for (int p = 0; p < k; ++p) {
      const T av = arow[p];
      if (av == T(0)) continue;
      const T* brow = b + int64_t{p} * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <typename T>
void GemmTnAcc(const T* a, const T* b, T* c, int k, int m, int n) {
  for (int p = 0; p < k; ++p) {
    const T* arow = a + int64_t{p} * m;
    const T* brow = b + int64_t{p} * n;
    for (int i = 0; i < m; ++i) {
      const T av = arow[i];
      if (av == T(0)) continue;
      T* crow = c + int64_t{i} * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <typename T>
void GemmNtAcc(const T* a, const T* b, T* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    const T* arow = a + int64_t{i} * k;
    T* crow = c + int64_t{i} * n;
    for (int j = 0; j < n; ++j) {
      const T* brow = b + int64_t{j} * k;
      T acc = 0;
      for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
      crow[j] += acc;
    }
  }
}

template void Gemm<float>(const float*, const float*, float*, int, int, int, bool);
template void Gemm<double>(const double*, const double*, double*, int, int, int, bool);
template void GemmTnAcc<float>(const float*, const float*, float*, int, int, int);
template void GemmTnAcc<double>(const double*, const double*, double*, int, int, int);
template void GemmNtAcc<float>(const float*, const float*, float*, int, int, int);
template void GemmNtAcc<double>(const double*, const double*, double*, int, int, int);

}  // namespace kernels

}  // namespace esal
