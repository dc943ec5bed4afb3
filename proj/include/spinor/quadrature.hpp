#pragma once

// Adaptive contour integration.  Everything is built on a composite 16-point
// Gauss-Legendre rule whose panel count doubles until two successive levels
// agree, so the routines are deterministic and need no per-call tuning.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "spinor/numeric.hpp"

namespace spinor {

namespace detail {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], found by
// Newton iteration on P_n from the Chebyshev-like initial guesses.
struct GaussLegendre {
    std::vector<double> node;
    std::vector<double> weight;

    explicit GaussLegendre(int n) {
        node.resize(n);
        weight.resize(n);
        for (int i = 0; i < n; ++i) {
            double x = std::cos(pi * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                // Evaluate P_n and P_{n-1} by the three-term recurrence.
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / pp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            node[i] = x;
            weight[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        }
    }
};

inline const GaussLegendre& gl16() {
    static const GaussLegendre rule(16);
    return rule;
}

}  // namespace detail

// Parametrized path t in [0, 1] -> point(t), with derivative d(point)/dt.
struct Curve {
    std::function<cplx(double)> point;
    std::function<cplx(double)> velocity;
};

inline Curve segment(cplx a, cplx b) {
    return Curve{[a, b](double t) { return a + t * (b - a); },
                 [a, b](double) { return b - a; }};
}

// Counterclockwise circle of radius r about c.
inline Curve circle(cplx c, double r) {
    return Curve{[c, r](double t) {
                     return c + r * std::exp(cplx(0.0, 2.0 * pi * t));
                 },
                 [c, r](double t) {
                     return cplx(0.0, 2.0 * pi) * r *
                            std::exp(cplx(0.0, 2.0 * pi * t));
                 }};
}

namespace detail {

template <class F>
cplx gl_panels(const F& f, const Curve& c, int panels) {
    const auto& rule = gl16();
    cplx sum = 0.0;
    const double h = 1.0 / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        for (std::size_t i = 0; i < rule.node.size(); ++i) {
            const double t = mid + 0.5 * h * rule.node[i];
            sum += rule.weight[i] * f(c.point(t)) * c.velocity(t);
        }
    }
    return sum * (0.5 * h);
}

}  // namespace detail

// Integral of f(z) dz along the curve, panels doubled until two levels agree
// to rel_tol (relative to the magnitude of the result, with an absolute
// floor).  Throws ConvergenceError if max_panels is reached first.
template <class F>
Converged integrate(const F& f, const Curve& c, double rel_tol = 1e-10,
                    int max_panels = 4096) {
    cplx prev = detail::gl_panels(f, c, 1);
    for (int panels = 2; panels <= max_panels; panels *= 2) {
        cplx cur = detail::gl_panels(f, c, panels);
        double err = std::abs(cur - prev);
        double scale = std::max(1.0, std::abs(cur));
        if (err <= rel_tol * scale) return {cur, err};
        prev = cur;
    }
    throw ConvergenceError("integrate: panel doubling did not converge");
}

// Componentwise version for vector-valued integrands f(z) dz.
template <class F>
cvec3 integrate3(const F& f, const Curve& c, double rel_tol = 1e-10,
                 int max_panels = 4096) {
    cvec3 out;
    for (int k = 0; k < 3; ++k) {
        auto comp = [&](cplx z) { return f(z)[k]; };
        out[k] = integrate(comp, c, rel_tol, max_panels).value;
    }
    return out;
}

}  // namespace spinor
