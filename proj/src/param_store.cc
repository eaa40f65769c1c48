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

#include "esal/param_store.h"

#include <utility>

#include "esal/errors.h"

namespace esal {

template <typename T>
void ParamStore<T>::Add(const std::string& name, Tensor<T> value) {
  if (!params_.emplace(name, std::move(value)).second) {
    throw ContractError("duplicate parameter name '" + name + "'");
  }
}

template <typename T>
const Tensor<T>& ParamStore<T>::Get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ContractError("unknown parameter '" + name + "'");
  return it->second;
}

template <typename T>
Tensor<T>& ParamStore<T>::Mutable(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw ContractError("unknown parameter '" + name + "'");
  return it->second;
}

template <typename T>
std::vector<std::string> ParamStore<T>::Names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : params_) out.push_back(name);
  return out;
}

template <typename T>
int64_t ParamStore<T>::NumScalars() const {
  int64_t n = 0;
  for (const auto& [_, t] : params_) n += t.size();
  return n;
}

template <typename T>
ParamStore<T> ZerosLike(const ParamStore<T>& store) {
  ParamStore<T> out;
  for (const auto& [name, t] : store.params()) out.Add(name, Tensor<T>(t.shape()));
  return out;
}

template class ParamStore<float>;
template class ParamStore<double>;
template ParamStore<float> ZerosLike(const ParamStore<float>&);
template ParamStore<double> ZerosLike(const ParamStore<double>&);

}  // namespace esal
