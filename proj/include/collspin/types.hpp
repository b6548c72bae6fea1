// Copyright 2026 The collspin Authors
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

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace collspin {

using cd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using SpMat = Eigen::SparseMatrix<cd>;
using RowSpMat = Eigen::SparseMatrix<cd, Eigen::RowMajor>;

inline constexpr cd kI{0.0, 1.0};

// Error hierarchy. The CLI maps InvalidArgument and its children to exit code 2
// and NumericalError to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A local channel was requested in a representation that cannot hold it.
class UnsupportedRepresentation : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A requested size exceeds a representation cap.
class CapExceeded : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace collspin
