// Copyright 2026 The LDHD Toolkit Authors
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

#include "ldhd/pe_kernels.h"

namespace ldhd::pe {

BiasMatrix RpeSquareBiasNaive(const Eigen::MatrixXd& embeddings, const ProjPair& w,
                              const RelTable& r) {
  const int n = static_cast<int>(embeddings.cols());
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "empty sequence");
  r.CheckCovers(n);
  const Eigen::MatrixXd a = CausalAttention(embeddings, w);
  BiasMatrix b = BiasMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) {
      double s = 0.0;
      for (int l = 0; l <= j; ++l) {
        for (int k = 0; k <= i; ++k) s += a(j, l) * a(i, k) * r.at((j - l) - (i - k));
      }
      b(i, j) = s;
    }
  }
  return b;
}

}  // namespace ldhd::pe
