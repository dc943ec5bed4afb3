#pragma once

// Shared test utilities: deterministic random data and tolerant comparisons.

#include <complex>
#include <random>

#include "spinor/complex_linalg.hpp"
#include "spinor/numeric.hpp"

namespace testutil {

using spinor::cplx;
using spinor::ComplexMatrix;

// All randomized tests draw from generators seeded here so failures replay.
inline std::mt19937 rng(unsigned seed = 0x5eed) { return std::mt19937(seed); }

inline cplx random_unit_box(std::mt19937& gen) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    const double re = d(gen);
    const double im = d(gen);
    return {re, im};
}

inline ComplexMatrix random_matrix(std::mt19937& gen, int rows, int cols) {
    ComplexMatrix a(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a(i, j) = random_unit_box(gen);
    return a;
}

inline ComplexMatrix random_skew(std::mt19937& gen, int n) {
    ComplexMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            a(i, j) = random_unit_box(gen);
            a(j, i) = -a(i, j);
        }
    return a;
}

inline bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol; }

inline bool close_rel(cplx a, cplx b, double tol) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) <= tol * scale;
}

}  // namespace testutil
