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

#include "damlink/numerics.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "damlink/errors.hpp"

namespace damlink {

namespace {

// Process-wide FFTW plan cache. FFTW's planner is not thread-safe, and
// plans are reusable on any buffers with the alignment they were created
// with, so plans are built once per (size, direction) on fftw_malloc'd
// scratch and executed with the new-array interface.
class FftEngine {
  public:
    static FftEngine& instance() {
        static FftEngine engine;
        return engine;
    }

    void transform(const Complex* in, Complex* out, int n, bool inverse) {
        fftw_complex* buf_in = fftw_alloc_complex(static_cast<std::size_t>(n));
        fftw_complex* buf_out = fftw_alloc_complex(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            buf_in[i][0] = in[i].real();
            buf_in[i][1] = in[i].imag();
        }
        fftw_execute_dft(plan_for(n, inverse, buf_in, buf_out), buf_in, buf_out);
        for (int i = 0; i < n; ++i) {
            out[i] = Complex(buf_out[i][0], buf_out[i][1]);
        }
        fftw_free(buf_in);
        fftw_free(buf_out);
    }

  private:
    fftw_plan plan_for(int n, bool inverse, fftw_complex* in, fftw_complex* out) {
        const std::pair<int, int> key{n, inverse ? 1 : 0};
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find(key);
        if (it == plans_.end()) {
            fftw_plan plan = fftw_plan_dft_1d(n, in, out, inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                              FFTW_ESTIMATE);
            it = plans_.emplace(key, plan).first;
        }
        return it->second;
    }

    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

}  // namespace

CMat lsq_solve(const CMat& a, const CMat& b) {
    if (a.rows() != b.rows()) {
        throw DomainError("lsq_solve: row count mismatch");
    }
    if (a.cols() == 0) {
        throw DomainError("lsq_solve: empty coefficient matrix");
    }
    Eigen::ColPivHouseholderQR<CMat> qr(a);
    qr.setThreshold(kRankTolerance);
    if (qr.rank() < a.cols()) {
        throw RankDeficientError("lsq_solve: coefficient matrix is rank deficient");
    }
    return qr.solve(b);
}

CMat projection_orthogonal(const CMat& h) {
    const Eigen::Index m = h.rows();
    if (h.cols() == 0) {
        return CMat::Identity(m, m);
    }
    if (h.cols() > m) {
        throw RankDeficientError("projection_orthogonal: more columns than rows");
    }
    Eigen::ColPivHouseholderQR<CMat> qr(h);
    qr.setThreshold(kRankTolerance);
    if (qr.rank() < h.cols()) {
        throw RankDeficientError("projection_orthogonal: columns are linearly dependent");
    }
    // Orthonormal basis of the column span; the complement projector is
    // symmetrized so it is exactly Hermitian.
    const CMat basis = qr.householderQ() * CMat::Identity(m, h.cols());
    CMat proj = CMat::Identity(m, m) - basis * basis.adjoint();
    proj = 0.5 * (proj + proj.adjoint()).eval();
    return proj;
}

CVec unitary_dft(const CVec& x, bool inverse) {
    const int n = static_cast<int>(x.size());
    if (n == 0) {
        throw LengthError("unitary_dft: empty input");
    }
    CVec out(n);
    FftEngine::instance().transform(x.data(), out.data(), n, inverse);
    out *= 1.0 / std::sqrt(static_cast<double>(n));
    return out;
}

}  // namespace damlink
