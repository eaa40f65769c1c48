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

#ifndef ESAL_TENSOR_H_
#define ESAL_TENSOR_H_

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace esal {

std::string ShapeString(const std::vector<int>& shape);

// Dense row-major tensor. Scalar is float (training) or double (gradient
// checks and tests); both are explicitly instantiated.
template <typename T>
class Tensor {
 public:
  using Scalar = T;

  Tensor() = default;
  explicit Tensor(std::vector<int> shape, T fill = T(0));
  Tensor(std::vector<int> shape, std::vector<T> data);

  // Row-major 2-D literal: Tensor<double>::FromRows({{1, 2}, {3, 4}}).
  static Tensor FromRows(std::initializer_list<std::initializer_list<T>> rows);

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int64_t size() const { return static_cast<int64_t>(data_.size()); }
  // Rank-2 accessors.
  int rows() const { return shape_.at(0); }
  int cols() const { return shape_.at(1); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  std::span<T> row(int r) { return std::span<T>(data_).subspan(int64_t{r} * cols(), cols()); }
  std::span<const T> row(int r) const {
    return std::span<const T>(data_).subspan(int64_t{r} * cols(), cols());
  }

  T& operator[](int64_t i) { return data_[i]; }
  T operator[](int64_t i) const { return data_[i]; }
  T& at(int r, int c) { return data_[int64_t{r} * cols() + c]; }
  T at(int r, int c) const { return data_[int64_t{r} * cols() + c]; }

  void Fill(T v);
  // Reinterprets the shape; element count must match.
  void Reshape(std::vector<int> shape);

  template <typename U>
  Tensor<U> Cast() const {
    std::vector<U> out(data_.begin(), data_.end());
    return Tensor<U>(shape_, std::move(out));
  }

  bool operator==(const Tensor&) const = default;

 private:
  std::vector<int> shape_;
  std::vector<T> data_;
};

namespace kernels {

// C[m,n] (+)= A[m,k] * B[k,n]
template <typename T>
void Gemm(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate);
// C[m,n] += A[k,m]^T * B[k,n]
template <typename T>
void GemmTnAcc(const T* a, const T* b, T* c, int k, int m, int n);
// C[m,n] += A[m,k] * B[n,k]^T
template <typename T>
void GemmNtAcc(const T* a, const T* b, T* c, int m, int k, int n);

}  // namespace kernels

}  // namespace esal

#endif  // ESAL_TENSOR_H_
