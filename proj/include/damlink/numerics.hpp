// SPDX-License-Identifier: Apache-2.0
//
// damlink: link-level simulator for delay-aligned single-carrier and
// cyclic-prefix OFDM transmission over sparse multipath MIMO channels.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// -------------------------------------------------------------------------

#pragma once

#include <Eigen/Dense>
#include <complex>

namespace damlink {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Relative pivot threshold shared by every rank decision in the library.
inline constexpr double kRankTolerance = 1e-12;

// Least-squares solution X of A X = B via a rank-revealing QR
// factorization. A must have full column rank relative to kRankTolerance;
// throws RankDeficientError otherwise.
CMat lsq_solve(const CMat& a, const CMat& b);

// Orthogonal-complement projector Q = I - H (H^H H)^{-1} H^H. The result
// is exactly Hermitian and idempotent to rounding. H with zero columns
// yields the identity; a rank-deficient H throws RankDeficientError.
CMat projection_orthogonal(const CMat& h);

// Unitary discrete Fourier transform of x (scale 1/sqrt(K) in both
// directions, so idft(dft(x)) == x and norms are preserved). Backed by
// FFTW with a process-wide plan cache; safe to call concurrently.
CVec unitary_dft(const CVec& x, bool inverse = false);

inline CVec dft(const CVec& x) { return unitary_dft(x, false); }
inline CVec idft(const CVec& x) { return unitary_dft(x, true); }

}  // namespace damlink
