#pragma once

// Shared numeric primitives: complex scalars, small fixed vectors and the
// exception types thrown by the iterative routines in this library.

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace spinor {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Value of some quantity together with an estimate of how well it converged.
// Routines that refine iteratively report the final disagreement between the
// last two refinement levels here.
struct Converged {
    cplx value;
    double error = 0.0;
};

class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an evaluation point coincides (to tolerance) with a pole of the
// function being evaluated.
class PoleError : public std::runtime_error {
public:
    explicit PoleError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by rank decisions when the singular structure of a matrix does not
// separate cleanly into "large" and "negligible" pivots.  Carries the two
// candidate ranks so callers can retry with different data or tolerances.
class AmbiguousRankError : public std::runtime_error {
public:
    AmbiguousRankError(const std::string& what, int lower, int upper)
        : std::runtime_error(what), rank_lower(lower), rank_upper(upper) {}
    int rank_lower;
    int rank_upper;
};

// Fixed 3-vector of complex entries, used for ambient coordinates and for the
// component triple of a vector-valued 1-form.
struct cvec3 {
    std::array<cplx, 3> v{};

    cplx& operator[](std::size_t i) { return v[i]; }
    const cplx& operator[](std::size_t i) const { return v[i]; }

    cvec3& operator+=(const cvec3& o) {
        for (std::size_t i = 0; i < 3; ++i) v[i] += o.v[i];
        return *this;
    }
    cvec3& operator-=(const cvec3& o) {
        for (std::size_t i = 0; i < 3; ++i) v[i] -= o.v[i];
        return *this;
    }
    cvec3& operator*=(cplx s) {
        for (std::size_t i = 0; i < 3; ++i) v[i] *= s;
        return *this;
    }

    friend cvec3 operator+(cvec3 a, const cvec3& b) { return a += b; }
    friend cvec3 operator-(cvec3 a, const cvec3& b) { return a -= b; }
    friend cvec3 operator*(cplx s, cvec3 a) { return a *= s; }
    friend cvec3 operator*(cvec3 a, cplx s) { return a *= s; }
};

inline std::array<double, 3> real_part(const cvec3& a) {
    return {a[0].real(), a[1].real(), a[2].real()};
}

inline double max_abs(const cvec3& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < 3; ++i) m = std::max(m, std::abs(a[i]));
    return m;
}

}  // namespace spinor
