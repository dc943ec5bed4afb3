#pragma once

// Weierstrass elliptic functions on an arbitrary oriented lattice.
//
// Evaluation strategy: reduce the argument into the fundamental cell, then
// sum theta q-series (truncated at relative 1e-16).  All lattice invariants
// (e_i, g_2, g_3, eta_i) come from theta constants at the origin, except that
// eta3 is evaluated from the zeta series at omega3 directly, so the Legendre
// relation stays available as an end-to-end consistency check.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spinor/numeric.hpp"

namespace spinor {

enum class LatticeKind { generic, rectangular, rhombic, square };

// Half-periods omega1, omega3 with Im(omega3/omega1) > 0.  The full lattice
// is spanned by 2*omega1 and 2*omega3; omega2 = omega1 + omega3 throughout.
struct Lattice {
    cplx omega1;
    cplx omega3;
    LatticeKind kind = LatticeKind::generic;

    Lattice(cplx w1, cplx w3) : omega1(w1), omega3(w3) {
        const cplx tau = w3 / w1;
        if (!(tau.imag() > 0.0))
            throw std::invalid_argument("Lattice: Im(omega3/omega1) must be positive");
        const double s = std::abs(w1) + std::abs(w3);
        const bool rect = std::abs(w1.imag()) < 1e-14 * s && std::abs(w3.real()) < 1e-14 * s;
        if (rect) {
            kind = (std::abs(std::abs(w3) - std::abs(w1)) < 1e-14 * s)
                       ? LatticeKind::square
                       : LatticeKind::rectangular;
        } else if (std::abs(std::abs(tau) - 1.0) < 1e-14) {
            kind = LatticeKind::rhombic;
        }
    }
};

namespace detail {

// One Jacobi theta evaluation bundle for fixed nome q = exp(i pi tau).
// Series in DLMF normalization with argument v = pi*u/(2*omega1).
struct ThetaEngine {
    cplx q, q2, q14;  // q, q^2, q^(1/4)

    explicit ThetaEngine(cplx tau)
        : q(std::exp(cplx(0.0, pi) * tau)),
          q2(q * q),
          q14(std::exp(cplx(0.0, pi / 4.0) * tau)) {}

    // theta1(v) = 2 q^(1/4) sum (-1)^n q^(n(n+1)) sin((2n+1)v)
    cplx t1(cplx v) const {
        return odd_series(v, [](cplx s, cplx) { return s; }, false);
    }
    // theta1'(v), derivative in v
    cplx t1p(cplx v) const {
        return odd_series(v, [](cplx, cplx c) { return c; }, true);
    }
    cplx t2(cplx v) const {
        return even_half_series(v);
    }
    cplx t3(cplx v) const { return one_series(v, false); }
    cplx t4(cplx v) const { return one_series(v, true); }

    // theta1'''(0); only the v-derivatives of sin survive at 0.
    cplx t1ppp0() const {
        cplx sum = 0.0, r = 1.0, qeven = q2;
        double sign = 1.0;
        for (int n = 0; n <= 400; ++n) {
            const double k = 2.0 * n + 1.0;
            const cplx term = sign * r * (k * k * k);
            sum += term;
            if (n > 2 && std::abs(term) < 1e-18 * std::abs(sum)) break;
            r *= qeven;       // q^(n(n+1)) -> q^((n+1)(n+2)) via q^(2(n+1))
            qeven *= q2;
            sign = -sign;
            if (n == 400) throw ConvergenceError("theta series did not converge");
        }
        return -2.0 * q14 * sum;
    }

private:
    template <class Pick>
    cplx odd_series(cplx v, Pick pick, bool derivative) const {
        cplx sum = 0.0, r = 1.0, qeven = q2;
        double sign = 1.0, peak = 0.0;
        int small_streak = 0;
        for (int n = 0; n <= 400; ++n) {
            const double k = 2.0 * n + 1.0;
            const cplx s = std::sin(k * v);
            const cplx c = std::cos(k * v);
            cplx term = sign * r * pick(s, c);
            if (derivative) term *= k;
            sum += term;
            peak = std::max(peak, std::abs(sum));
            if (std::abs(term) < 1e-16 * std::max(peak, 1e-300)) {
                if (++small_streak >= 2) break;
            } else {
                small_streak = 0;
            }
            r *= qeven;
            qeven *= q2;
            sign = -sign;
            if (n == 400) throw ConvergenceError("theta series did not converge");
        }
        return 2.0 * q14 * sum;
    }

    // theta2(v) = 2 q^(1/4) sum q^(n(n+1)) cos((2n+1)v)
    cplx even_half_series(cplx v) const {
        cplx sum = 0.0, r = 1.0, qeven = q2;
        double peak = 0.0;
        int small_streak = 0;
        for (int n = 0; n <= 400; ++n) {
            const double k = 2.0 * n + 1.0;
            const cplx term = r * std::cos(k * v);
            sum += term;
            peak = std::max(peak, std::abs(sum));
            if (std::abs(term) < 1e-16 * std::max(peak, 1e-300)) {
                if (++small_streak >= 2) break;
            } else {
                small_streak = 0;
            }
            r *= qeven;
            qeven *= q2;
            if (n == 400) throw ConvergenceError("theta series did not converge");
        }
        return 2.0 * q14 * sum;
    }

    // theta3(v) = 1 + 2 sum q^(n^2) cos(2nv); theta4 alternates signs.
    cplx one_series(cplx v, bool alternate) const {
        cplx sum = 1.0, r = q, qodd = q * q2;  // q^(n^2): 1, q, q^4, ...
        double sign = alternate ? -1.0 : 1.0;
        double peak = 1.0;
        int small_streak = 0;
        for (int n = 1; n <= 400; ++n) {
            const cplx term = 2.0 * sign * r * std::cos(2.0 * n * v);
            sum += term;
            peak = std::max(peak, std::abs(sum));
            if (std::abs(term) < 1e-16 * std::max(peak, 1e-300)) {
                if (++small_streak >= 2) break;
            } else {
                small_streak = 0;
            }
            r *= qodd;   // q^(n^2) -> q^((n+1)^2) via q^(2n+1)
            qodd *= q2;
            if (alternate) sign = -sign;
            if (n == 400) throw ConvergenceError("theta series did not converge");
        }
        return sum;
    }
};

}  // namespace detail

// Argument reduced into the fundamental cell: u = 2a*omega1 + 2b*omega3 with
// a, b in [-1/2, 1/2), plus the integer translation that was removed.
struct ReducedPoint {
    cplx u;
    double alpha, beta;
    long m, n;
};

class EllipticContext {
public:
    Lattice lattice;
    cplx tau, q;
    cplx e1, e2, e3;
    cplx g2, g3;
    cplx eta1, eta3;

    explicit EllipticContext(const Lattice& lat)
        : lattice(lat), tau(lat.omega3 / lat.omega1), theta_(tau) {
        q = theta_.q;
        if (!(std::abs(q) < 0.99))
            throw std::invalid_argument("EllipticContext: |q| >= 0.99, lattice too degenerate");

        t2z_ = theta_.t2(0.0);
        t3z_ = theta_.t3(0.0);
        t4z_ = theta_.t4(0.0);
        t1pz_ = theta_.t1p(0.0);

        const cplx w1 = lattice.omega1;
        const cplx f = pi * pi / (12.0 * w1 * w1);
        const cplx a = std::pow(t2z_, 4), b = std::pow(t4z_, 4);
        e1 = f * (a + 2.0 * b);
        e2 = f * (a - b);
        e3 = -f * (2.0 * a + b);
        g2 = -4.0 * (e1 * e2 + e1 * e3 + e2 * e3);
        g3 = 4.0 * e1 * e2 * e3;

        eta1 = -(pi * pi / (12.0 * w1)) * (theta_.t1ppp0() / t1pz_);
        // eta3 = zeta(omega3) straight from the series, not from Legendre.
        eta3 = zeta_raw(lattice.omega3);

        wp_prime_scale_ = -2.0 * std::pow(pi / (2.0 * w1), 3) *
                          std::pow(t1pz_, 3) / (t2z_ * t3z_ * t4z_);
    }

    cplx omega(int k) const {
        switch (k) {
            case 1: return lattice.omega1;
            case 2: return lattice.omega1 + lattice.omega3;
            case 3: return lattice.omega3;
        }
        throw std::invalid_argument("omega: index must be 1, 2 or 3");
    }
    cplx eta(int k) const {
        switch (k) {
            case 1: return eta1;
            case 2: return eta1 + eta3;
            case 3: return eta3;
        }
        throw std::invalid_argument("eta: index must be 1, 2 or 3");
    }
    cplx e(int k) const {
        switch (k) {
            case 1: return e1;
            case 2: return e2;
            case 3: return e3;
        }
        throw std::invalid_argument("e: index must be 1, 2 or 3");
    }

    ReducedPoint reduce(cplx u) const {
        const cplx w1 = lattice.omega1, w3 = lattice.omega3;
        // Solve u = 2a w1 + 2b w3 over the reals.
        const double det = 4.0 * (w1.real() * w3.imag() - w1.imag() * w3.real());
        const double a = (u.real() * 2.0 * w3.imag() - u.imag() * 2.0 * w3.real()) / det;
        const double b = (u.imag() * 2.0 * w1.real() - u.real() * 2.0 * w1.imag()) / det;
        const double mf = std::floor(a + 0.5), nf = std::floor(b + 0.5);
        ReducedPoint r;
        r.alpha = a - mf;
        r.beta = b - nf;
        r.m = static_cast<long>(mf);
        r.n = static_cast<long>(nf);
        r.u = 2.0 * r.alpha * w1 + 2.0 * r.beta * w3;
        return r;
    }

    // Shortest distance from u to the lattice point set {v + lattice}.
    double distance(cplx u, cplx v = 0.0) const {
        const ReducedPoint r = reduce(u - v);
        double best = std::abs(r.u);
        for (int dm = -1; dm <= 1; ++dm)
            for (int dn = -1; dn <= 1; ++dn)
                best = std::min(best, std::abs(r.u - 2.0 * double(dm) * lattice.omega1 -
                                               2.0 * double(dn) * lattice.omega3));
        return best;
    }

    cplx wp(cplx u) const {
        const ReducedPoint r = reduce_checked(u, "wp");
        const cplx v = to_theta_arg(r.u);
        const cplx ratio = theta_.t2(v) / theta_.t1(v);
        const cplx s = (pi / (2.0 * lattice.omega1)) * t3z_ * t4z_ * ratio;
        return e1 + s * s;
    }

    cplx wp_prime(cplx u) const {
        const ReducedPoint r = reduce_checked(u, "wp_prime");
        const cplx v = to_theta_arg(r.u);
        const cplx th1 = theta_.t1(v);
        return wp_prime_scale_ * theta_.t2(v) * theta_.t3(v) * theta_.t4(v) / (th1 * th1 * th1);
    }

    cplx zeta(cplx u) const {
        const ReducedPoint r = reduce_checked(u, "zeta");
        return zeta_raw(r.u) + 2.0 * double(r.m) * eta1 + 2.0 * double(r.n) * eta3;
    }

private:
    detail::ThetaEngine theta_;
    cplx t2z_, t3z_, t4z_, t1pz_;
    cplx wp_prime_scale_;

    cplx to_theta_arg(cplx u) const { return pi * u / (2.0 * lattice.omega1); }

    ReducedPoint reduce_checked(cplx u, const char* who) const {
        const ReducedPoint r = reduce(u);
        if (std::max(std::abs(r.alpha), std::abs(r.beta)) <= 1e-12)
            throw PoleError(std::string(who) + ": argument is a lattice point");
        return r;
    }

    // zeta on an already-reduced argument (no quasi-period bookkeeping).
    cplx zeta_raw(cplx u) const {
        const cplx v = to_theta_arg(u);
        return eta1 * u / lattice.omega1 +
               (pi / (2.0 * lattice.omega1)) * theta_.t1p(v) / theta_.t1(v);
    }
};

inline EllipticContext make_context(const Lattice& lat) { return EllipticContext(lat); }

inline cplx wp(const EllipticContext& c, cplx u) { return c.wp(u); }
inline cplx wp_prime(const EllipticContext& c, cplx u) { return c.wp_prime(u); }
inline cplx zeta(const EllipticContext& c, cplx u) { return c.zeta(u); }

// wp(u +- omega_i) computed from wp(u) alone.
inline cplx half_period_shift(const EllipticContext& c, cplx u, int i) {
    const int j = (i % 3) + 1, k = (j % 3) + 1;
    const cplx ei = c.e(i), ej = c.e(j), ek = c.e(k);
    const cplx p = c.wp(u);
    const cplx den = p - ei;
    const double scale = std::max({std::abs(p), std::abs(ei), 1.0});
    if (std::abs(den) < 1e-12 * scale)
        throw PoleError("half_period_shift: wp(u) equals e_i");
    return ei + (ei - ej) * (ei - ek) / den;
}

// f(u) = b + sum a_i wp(u - alpha_i): evaluation plus exact period integrals
// over the cycles u -> u + 2*omega_k.
struct PrincipalPartSum {
    const EllipticContext* ctx;
    std::vector<std::pair<cplx, cplx>> terms;  // (a_i, alpha_i)
    cplx b;

    cplx eval(cplx u) const {
        cplx s = b;
        for (const auto& [a, alpha] : terms) s += a * ctx->wp(u - alpha);
        return s;
    }

    cplx period(int k) const {
        cplx asum = 0.0;
        for (const auto& [a, alpha] : terms) asum += a;
        return 2.0 * b * ctx->omega(k) - 2.0 * ctx->eta(k) * asum;
    }
};

inline PrincipalPartSum principal_part_sum(const EllipticContext& ctx,
                                           std::vector<std::pair<cplx, cplx>> terms,
                                           cplx b) {
    for (std::size_t i = 0; i < terms.size(); ++i)
        for (std::size_t j = i + 1; j < terms.size(); ++j)
            if (ctx.distance(terms[i].second, terms[j].second) < 1e-10)
                throw std::invalid_argument("principal_part_sum: coincident poles");
    return PrincipalPartSum{&ctx, std::move(terms), b};
}

// Solve wp(u) = target by coarse seeding over the fundamental cell followed
// by Newton iteration.  Returns one solution; the full preimage is +-u mod
// lattice.
inline cplx invert_wp(const EllipticContext& c, cplx target, double tol = 1e-12) {
    const cplx w1 = c.lattice.omega1, w3 = c.lattice.omega3;
    cplx best = 0.0;
    double best_err = 1e300;
    const int N = 36;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const double a = -0.5 + (i + 0.5) / N;
            const double b = -0.5 + (j + 0.5) / N;
            const cplx u = 2.0 * a * w1 + 2.0 * b * w3;
            if (c.distance(u) < 0.05 * std::min(std::abs(w1), std::abs(w3))) continue;
            const double err = std::abs(c.wp(u) - target);
            if (err < best_err) {
                best_err = err;
                best = u;
            }
        }
    cplx u = best;
    const double scale = std::max(1.0, std::abs(target));
    for (int it = 0; it < 80; ++it) {
        const cplx f = c.wp(u) - target;
        if (std::abs(f) <= tol * scale) return c.reduce(u).u;
        const cplx d = c.wp_prime(u);
        if (std::abs(d) < 1e-300) break;
        cplx step = f / d;
        // Damp huge steps so the iteration cannot jump between cells wildly.
        const double cap = 0.5 * std::min(std::abs(w1), std::abs(w3));
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        u -= step;
    }
    throw ConvergenceError("invert_wp: Newton iteration did not converge");
}

// Square lattice rescaled so that e1 = 1 exactly (then e2 = 0, e3 = -1).
// wp(lambda u; lambda L) = lambda^-2 wp(u; L) fixes the scale factor.
inline EllipticContext square_normalized() {
    EllipticContext base{Lattice(1.0, cplx(0.0, 1.0))};
    const cplx lambda = std::sqrt(base.e1);
    return EllipticContext(Lattice(lambda, lambda * cplx(0.0, 1.0)));
}

}  // namespace spinor
