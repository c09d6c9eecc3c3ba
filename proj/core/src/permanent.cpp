// Copyright 2026 The ppbs Authors
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

#include <cstdint>
#include <vector>

#include "ppbs/fock.hpp"

namespace ppbs {

cplx permanent(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw DomainError("permanent of a non-square matrix");
  const int n = static_cast<int>(m.rows());
  if (n == 0) return 1.0;
  if (n > 30) throw DomainError("permanent: matrix too large");

  // Ryser: perm = (-1)^n sum_S (-1)^|S| prod_i sum_{j in S} m_ij, with the
  // row sums updated one column at a time along a Gray code.
  std::vector<cplx> row_sums(n, cplx(0.0));
  cplx total = 0.0;
  std::uint64_t gray = 0;
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < subsets; ++k) {
    const int bit = __builtin_ctzll(k);
    const std::uint64_t mask = std::uint64_t{1} << bit;
    const bool adding = (gray & mask) == 0;
    gray ^= mask;
    for (int i = 0; i < n; ++i) {
      row_sums[i] += adding ? m(i, bit) : -m(i, bit);
    }
    cplx prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= row_sums[i];
    const int size = __builtin_popcountll(gray);
    total += ((size & 1) ? -prod : prod);
  }
  return (n & 1) ? -total : total;
}

}  // namespace ppbs
