#pragma once

// Dense complex linear algebra sized for the small pairing matrices that show
// up in this library: Pfaffians, numerical rank / kernel with an explicit
// ambiguity signal, and low-degree polynomial roots.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spinor/numeric.hpp"

namespace spinor {

class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("ComplexMatrix: negative size");
    }

    static ComplexMatrix identity(int n) {
        ComplexMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    cplx& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    const cplx& operator()(int i, int j) const {
        return a_[static_cast<std::size_t>(i) * cols_ + j];
    }

    ComplexMatrix transpose() const {
        ComplexMatrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product: size mismatch");
        ComplexMatrix c(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                const cplx aik = a(i, k);
                for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    std::vector<cplx> apply(const std::vector<cplx>& x) const {
        if (static_cast<int>(x.size()) != cols_)
            throw std::invalid_argument("matrix apply: size mismatch");
        std::vector<cplx> y(rows_);
        for (int i = 0; i < rows_; ++i) {
            cplx s = 0.0;
            for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    double max_abs() const {
        double m = 0.0;
        for (const cplx& z : a_) m = std::max(m, std::abs(z));
        return m;
    }

    bool finite() const {
        for (const cplx& z : a_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<cplx> a_;
};

inline constexpr double eps_skew = 1e-10;

inline double skew_defect(const ComplexMatrix& a) {
    double m = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) + a(j, i)));
    return m;
}

namespace detail {

inline void require_square_finite(const ComplexMatrix& a, const char* who) {
    if (a.rows() != a.cols())
        throw std::invalid_argument(std::string(who) + ": matrix must be square");
    if (!a.finite()) throw std::invalid_argument(std::string(who) + ": non-finite entries");
}

inline void require_skew(const ComplexMatrix& a, const char* who) {
    require_square_finite(a, who);
    const double scale = std::max(a.max_abs(), 1e-300);
    if (skew_defect(a) > eps_skew * scale)
        throw std::invalid_argument(std::string(who) + ": matrix is not skew-symmetric");
}

inline cplx pfaffian_rec(std::vector<cplx>& a, int n, int stride) {
    // a is an n x n skew block stored with the given row stride.
    if (n == 0) return 1.0;
    if (n == 2) return a[1];
    // Expansion along the first row; submatrix omits rows/cols 0 and j.
    cplx sum = 0.0;
    std::vector<cplx> sub((n - 2) * (n - 2));
    for (int j = 1; j < n; ++j) {
        const cplx a0j = a[j];
        if (a0j == cplx(0.0)) continue;
        int r = 0;
        for (int i = 1; i < n; ++i) {
            if (i == j) continue;
            int c = 0;
            for (int k = 1; k < n; ++k) {
                if (k == j) continue;
                sub[r * (n - 2) + c] = a[i * stride + k];
                ++c;
            }
            ++r;
        }
        const double sign = (j % 2 == 1) ? 1.0 : -1.0;
        sum += sign * a0j * pfaffian_rec(sub, n - 2, n - 2);
    }
    return sum;
}

}  // namespace detail

// Pfaffian by expansion along the first row.  Exact recursion, no pivoting;
// intended for the small skew pairing matrices of this library (n <= 12).
inline cplx pfaffian(const ComplexMatrix& a) {
    detail::require_skew(a, "pfaffian");
    const int n = a.rows();
    if (n % 2 == 1) return 0.0;
    if (n > 12) throw std::invalid_argument("pfaffian: dimension > 12 not supported");
    std::vector<cplx> buf(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) buf[static_cast<std::size_t>(i) * n + j] = a(i, j);
    return detail::pfaffian_rec(buf, n, n);
}

// Determinant by LU with partial pivoting.  Deliberately a different
// elimination route from pfaffian and rank_kernel so the pf(A)^2 = det(A)
// identity is a genuine cross-check.
inline cplx determinant(const ComplexMatrix& a) {
    detail::require_square_finite(a, "determinant");
    const int n = a.rows();
    ComplexMatrix lu = a;
    cplx det = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(lu(k, k));
        for (int i = k + 1; i < n; ++i)
            if (std::abs(lu(i, k)) > best) {
                best = std::abs(lu(i, k));
                piv = i;
            }
        if (best == 0.0) return 0.0;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
            det = -det;
        }
        det *= lu(k, k);
        for (int i = k + 1; i < n; ++i) {
            const cplx f = lu(i, k) / lu(k, k);
            for (int j = k; j < n; ++j) lu(i, j) -= f * lu(k, j);
        }
    }
    return det;
}

// Square linear solve via the same LU; throws on (numerically) singular input.
inline std::vector<cplx> solve(const ComplexMatrix& a, std::vector<cplx> b) {
    detail::require_square_finite(a, "solve");
    const int n = a.rows();
    if (static_cast<int>(b.size()) != n) throw std::invalid_argument("solve: size mismatch");
    ComplexMatrix lu = a;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(lu(k, k));
        for (int i = k + 1; i < n; ++i)
            if (std::abs(lu(i, k)) > best) {
                best = std::abs(lu(i, k));
                piv = i;
            }
        if (best < 1e-300) throw std::invalid_argument("solve: singular matrix");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (int i = k + 1; i < n; ++i) {
            const cplx f = lu(i, k) / lu(k, k);
            for (int j = k; j < n; ++j) lu(i, j) -= f * lu(k, j);
            b[i] -= f * b[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        cplx s = b[i];
        for (int j = i + 1; j < n; ++j) s -= lu(i, j) * b[j];
        b[i] = s / lu(i, i);
    }
    return b;
}

struct KernelBasis {
    int dim = 0;
    std::vector<std::vector<cplx>> vectors;
    double rank_threshold = 0.0;
};

struct RankKernel {
    int rank = 0;
    KernelBasis kernel;
};

// Numerical rank and kernel via fully pivoted elimination.  The sorted pivot
// magnitudes act as decision values: rank is the number above
// threshold_scale * max|A|.  When the pivots straddling that cut are within a
// factor of 10 of each other there is no clear gap and AmbiguousRankError is
// thrown with both candidate ranks.  Skew input always yields even rank; an
// odd raw count is resolved by the geometric mean of the straddling pivots.
inline RankKernel rank_kernel(const ComplexMatrix& a, double threshold_scale = 1e-8) {
    if (!a.finite()) throw std::invalid_argument("rank_kernel: non-finite entries");
    if (threshold_scale <= 0.0) throw std::invalid_argument("rank_kernel: threshold_scale <= 0");
    const int m = a.rows(), n = a.cols();
    const double scale = a.max_abs();
    const double thresh = threshold_scale * scale;
    const bool skew = (m == n) && scale > 0.0 && skew_defect(a) <= eps_skew * scale;

    ComplexMatrix u = a;
    std::vector<int> colperm(n);
    for (int j = 0; j < n; ++j) colperm[j] = j;
    std::vector<double> pivots;
    const int kmax = std::min(m, n);
    for (int k = 0; k < kmax; ++k) {
        int pr = k, pc = k;
        double best = 0.0;
        for (int i = k; i < m; ++i)
            for (int j = k; j < n; ++j)
                if (std::abs(u(i, j)) > best) {
                    best = std::abs(u(i, j));
                    pr = i;
                    pc = j;
                }
        if (best == 0.0) break;
        if (pr != k)
            for (int j = 0; j < n; ++j) std::swap(u(k, j), u(pr, j));
        if (pc != k) {
            for (int i = 0; i < m; ++i) std::swap(u(i, k), u(i, pc));
            std::swap(colperm[k], colperm[pc]);
        }
        pivots.push_back(best);
        for (int i = k + 1; i < m; ++i) {
            const cplx f = u(i, k) / u(k, k);
            for (int j = k; j < n; ++j) u(i, j) -= f * u(k, j);
        }
    }

    int rank = 0;
    while (rank < static_cast<int>(pivots.size()) && pivots[rank] > thresh) ++rank;

    if (rank > 0 && rank < static_cast<int>(pivots.size())) {
        const double above = pivots[rank - 1];
        const double below = pivots[rank];
        if (skew && rank % 2 == 1) {
            // Even-rank structure: decide which side the straddling pair
            // belongs to by whether its geometric mean clears the threshold.
            rank += (above * below > thresh * thresh) ? 1 : -1;
        } else if (above < 10.0 * below) {
            throw AmbiguousRankError(
                "rank_kernel: no clear gap in pivot magnitudes (" +
                    std::to_string(above) + " vs " + std::to_string(below) + ")",
                rank, rank + 1);
        }
    }

    // Back-substitute one kernel vector per free column of U.
    KernelBasis basis;
    basis.rank_threshold = thresh;
    for (int free = rank; free < n; ++free) {
        std::vector<cplx> x(n, 0.0);
        x[free] = 1.0;
        for (int i = rank - 1; i >= 0; --i) {
            cplx s = -u(i, free);
            for (int j = i + 1; j < rank; ++j) s -= u(i, j) * x[j];
            x[i] = s / u(i, i);
        }
        std::vector<cplx> v(n, 0.0);
        for (int j = 0; j < n; ++j) v[colperm[j]] = x[j];
        basis.vectors.push_back(std::move(v));
    }

    // Modified Gram-Schmidt under the Hermitian product.
    for (std::size_t i = 0; i < basis.vectors.size(); ++i) {
        auto& vi = basis.vectors[i];
        for (std::size_t j = 0; j < i; ++j) {
            const auto& vj = basis.vectors[j];
            cplx d = 0.0;
            for (int k = 0; k < n; ++k) d += std::conj(vj[k]) * vi[k];
            for (int k = 0; k < n; ++k) vi[k] -= d * vj[k];
        }
        double norm = 0.0;
        for (int k = 0; k < n; ++k) norm += std::norm(vi[k]);
        norm = std::sqrt(norm);
        if (norm < 1e-14)
            throw ConvergenceError("rank_kernel: degenerate kernel basis");
        for (int k = 0; k < n; ++k) vi[k] /= norm;
    }
    basis.dim = static_cast<int>(basis.vectors.size());

    for (const auto& v : basis.vectors) {
        const auto av = a.apply(v);
        double r = 0.0;
        for (const cplx& z : av) r = std::max(r, std::abs(z));
        if (scale > 0.0 && r > 100.0 * std::max(thresh, 1e-14 * scale))
            throw ConvergenceError("rank_kernel: kernel residual check failed");
    }
    return {rank, std::move(basis)};
}

struct QuarticRoots {
    std::array<cplx, 4> roots;  // {s, -s, t, -t} with s^2 the large quadratic root
    bool degenerate = false;    // true when the resolvent discriminant m^2 - 4 ~ 0
};

// The four roots of r^4 + m r^2 + 1 = 0 via the quadratic formula in r^2,
// arranged for stability: the larger-magnitude quadratic root is computed
// directly and its partner recovered from the unit product of roots.
inline QuarticRoots quartic_biquadratic_roots(cplx m) {
    if (!std::isfinite(m.real()) || !std::isfinite(m.imag()))
        throw std::invalid_argument("quartic_biquadratic_roots: non-finite m");
    const cplx disc = m * m - 4.0;
    const cplx d = std::sqrt(disc);
    // Pick the sign that adds constructively to m, avoiding cancellation.
    const cplx dm = (std::real(std::conj(m) * d) >= 0.0) ? d : -d;
    // |ybig| >= 1 by the sign choice; its partner is 1/ybig since the two
    // quadratic roots multiply to the constant term 1.
    const cplx ybig = -(m + dm) / 2.0;
    const cplx ysmall = 1.0 / ybig;
    QuarticRoots out;
    const cplx s = std::sqrt(ybig);
    const cplx t = std::sqrt(ysmall);
    out.roots = {s, -s, t, -t};
    out.degenerate = std::abs(disc) <= 1e-12 * (1.0 + std::norm(m));
    return out;
}

// All roots of a monic-normalizable polynomial sum_k c_k z^k (degree <= 8) by
// simultaneous Durand-Kerner iteration from fixed starting points, followed
// by a Newton polish.  Deterministic for fixed input.
inline std::vector<cplx> poly_roots(std::vector<cplx> c) {
    while (!c.empty() && std::abs(c.back()) == 0.0) c.pop_back();
    if (c.size() < 2) throw std::invalid_argument("poly_roots: degree must be >= 1");
    const int deg = static_cast<int>(c.size()) - 1;
    if (deg > 8) throw std::invalid_argument("poly_roots: degree > 8 not supported");
    for (auto& ck : c)
        if (!std::isfinite(ck.real()) || !std::isfinite(ck.imag()))
            throw std::invalid_argument("poly_roots: non-finite coefficient");
    const cplx lead = c.back();
    for (auto& ck : c) ck /= lead;

    auto eval = [&](cplx z) {
        cplx p = 0.0;
        for (int k = deg; k >= 0; --k) p = p * z + c[k];
        return p;
    };
    auto eval_d = [&](cplx z) {
        cplx p = 0.0;
        for (int k = deg; k >= 1; --k) p = p * z + double(k) * c[k];
        return p;
    };

    double radius = 0.0;
    for (int k = 0; k < deg; ++k) radius = std::max(radius, std::abs(c[k]));
    radius = 1.0 + radius;

    std::vector<cplx> z(deg);
    const cplx seed(0.4, 0.9);  // standard non-real starting direction
    cplx p = 1.0;
    for (int k = 0; k < deg; ++k) {
        p *= seed;
        z[k] = radius * p / std::abs(p) * (0.5 + 0.5 * (k + 1.0) / deg);
    }

    for (int it = 0; it < 600; ++it) {
        double step = 0.0;
        for (int k = 0; k < deg; ++k) {
            cplx denom = 1.0;
            for (int j = 0; j < deg; ++j)
                if (j != k) denom *= (z[k] - z[j]);
            const cplx dz = eval(z[k]) / denom;
            z[k] -= dz;
            step = std::max(step, std::abs(dz));
        }
        if (step < 1e-14 * radius) break;
        if (it == 599) throw ConvergenceError("poly_roots: iteration did not converge");
    }
    for (int k = 0; k < deg; ++k)
        for (int it = 0; it < 4; ++it) {
            const cplx d = eval_d(z[k]);
            if (std::abs(d) < 1e-300) break;
            z[k] -= eval(z[k]) / d;
        }
    std::sort(z.begin(), z.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return z;
}

}  // namespace spinor
