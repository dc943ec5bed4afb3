#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <memory>

#include "helpers.hpp"
#include "spinor/spin_core.hpp"

using namespace spinor;
using testutil::close;
using testutil::close_rel;

namespace {

const cplx I_(0.0, 1.0);

SpinorSection sphere_section(std::function<cplx(cplx)> f,
                             std::vector<DeclaredPole> poles = {}) {
    return SpinorSection{Domain::sphere(), SpinStructure::sphere_dz(), std::move(f),
                         std::move(poles)};
}

// Four-ended genus-zero pair with ends {a, conj(a), 0, inf} for |a| = 1,
// written in partial fractions.  At the hexagonal value a = exp(i pi/6) all
// four ends are embedded planar.
SpinorPair four_end_pair(cplx a) {
    const cplx ab = std::conj(a);
    const cplx root_i = std::exp(cplx(0.0, pi / 4.0));
    auto f1 = [a, ab, root_i](cplx z) {
        return root_i * (-I_ * a / (z - a) + I_ * ab / (z - ab) - 1.0 / z);
    };
    auto f2 = [a, ab, root_i](cplx z) {
        return root_i * (I_ / (z - a) - I_ / (z - ab) + 1.0);
    };
    SpinorSection s1 = sphere_section(f1, {{a, -1}, {ab, -1}, {0.0, -1}});
    SpinorSection s2 = sphere_section(f2, {{a, -1}, {ab, -1}});
    return SpinorPair(std::move(s1), std::move(s2));
}

}  // namespace

TEST_CASE("sigma lands on the null quadric") {
    auto v = sigma(1.0, 0.0);
    REQUIRE(close(v[0], 1.0, 1e-15));
    REQUIRE(close(v[1], I_, 1e-15));
    REQUIRE(close(v[2], 0.0, 1e-15));

    auto z = sigma(0.0, 0.0);
    REQUIRE(max_abs(z) == 0.0);

    auto gen = testutil::rng(201);
    for (int t = 0; t < 100; ++t) {
        const cplx z1 = 3.0 * testutil::random_unit_box(gen);
        const cplx z2 = 3.0 * testutil::random_unit_box(gen);
        auto w = sigma(z1, z2);
        cplx q = 0.0;
        double n = 0.0;
        for (int k = 0; k < 3; ++k) {
            q += w[k] * w[k];
            n += std::norm(w[k]);
        }
        REQUIRE(std::abs(q) <= 1e-14 * std::max(n, 1e-300));
    }
}

TEST_CASE("group action covers rotations two-to-one") {
    ComplexMatrix id2 = ComplexMatrix::identity(2);
    ComplexMatrix mid2(2, 2);
    mid2(0, 0) = -1.0;
    mid2(1, 1) = -1.0;
    for (const auto* A : {&id2, &mid2}) {
        auto T = group_action_T(*A);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                REQUIRE(close(T(i, j), i == j ? 1.0 : 0.0, 1e-15));
    }
}

TEST_CASE("group action intertwines sigma") {
    auto gen = testutil::rng(203);
    for (int t = 0; t < 50; ++t) {
        ComplexMatrix A = testutil::random_matrix(gen, 2, 2);
        if (std::abs(determinant(A)) < 0.05) continue;
        const cplx z1 = testutil::random_unit_box(gen), z2 = testutil::random_unit_box(gen);
        auto T = group_action_T(A);
        auto lhs = T.apply({sigma(z1, z2)[0], sigma(z1, z2)[1], sigma(z1, z2)[2]});
        auto rhs = sigma(A(0, 0) * z1 + A(0, 1) * z2, A(1, 0) * z1 + A(1, 1) * z2);
        double scale = 1e-300;
        for (int k = 0; k < 3; ++k) scale = std::max(scale, std::abs(rhs[k]));
        for (int k = 0; k < 3; ++k) REQUIRE(std::abs(lhs[k] - rhs[k]) <= 1e-12 * scale);
    }
}

TEST_CASE("group action is a homomorphism with cubed determinant") {
    auto gen = testutil::rng(207);
    for (int t = 0; t < 200; ++t) {
        ComplexMatrix A = testutil::random_matrix(gen, 2, 2);
        ComplexMatrix B = testutil::random_matrix(gen, 2, 2);
        if (std::abs(determinant(A)) < 0.05 || std::abs(determinant(B)) < 0.05) continue;
        auto TA = group_action_T(A), TB = group_action_T(B);
        auto TAB = group_action_T(A * B);
        auto prod = TA * TB;
        double scale = std::max(1e-300, prod.max_abs());
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                REQUIRE(std::abs(TAB(i, j) - prod(i, j)) <= 1e-12 * scale);
        const cplx detA = determinant(A);
        REQUIRE(close_rel(determinant(TA), detA * detA * detA, 1e-10));
    }
}

TEST_CASE("unitary input yields a real rotation matrix") {
    // A = lambda * SU(2) element.
    const double th = 0.7, ph = 1.3;
    ComplexMatrix A(2, 2);
    A(0, 0) = 1.7 * std::cos(th) * std::exp(I_ * ph);
    A(0, 1) = 1.7 * std::sin(th) * std::exp(I_ * 0.4);
    A(1, 0) = -1.7 * std::sin(th) * std::exp(-I_ * 0.4);
    A(1, 1) = 1.7 * std::cos(th) * std::exp(-I_ * ph);
    auto T = group_action_T(A);
    double imax = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) imax = std::max(imax, std::abs(T(i, j).imag()));
    REQUIRE(imax <= 1e-13 * T.max_abs());
    // T^t T = (scale)^2 I with scale = |det A|.
    auto G = T.transpose() * T;
    const double s2 = std::abs(determinant(A));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            REQUIRE(close(G(i, j), i == j ? cplx(s2 * s2) : cplx(0.0), 1e-10 * s2 * s2));
}

TEST_CASE("group action rejects singular input") {
    ComplexMatrix A(2, 2);
    A(0, 0) = 1.0;
    A(0, 1) = 2.0;
    A(1, 0) = 0.5;
    A(1, 1) = 1.0;
    REQUIRE_THROWS_AS(group_action_T(A), std::invalid_argument);
}

TEST_CASE("laurent extraction recovers poles and regular values") {
    const cplx p(0.4, -0.2);
    auto pole = laurent_extract([p](cplx z) { return 1.0 / (z - p); }, p, 0.3);
    REQUIRE(close(pole.a_minus1(), 1.0, 1e-12));
    REQUIRE(close(pole.a0(), 0.0, 1e-12));
    REQUIRE(pole.order() == -1);

    auto reg = laurent_extract([](cplx z) { return std::exp(z); }, p, 0.3);
    REQUIRE(close(reg.a_minus1(), 0.0, 1e-12));
    REQUIRE(close_rel(reg.a0(), std::exp(p), 1e-12));
    REQUIRE(reg.order() == 0);
}

TEST_CASE("laurent window reproduces a truncated series on its circle") {
    const cplx p(0.0, 0.0);
    auto f = [](cplx z) {
        return 0.7 / (z * z) + cplx(0.0, -2.0) / z + 1.5 + 0.3 * z + cplx(0.2, 0.1) * z * z;
    };
    auto ld = laurent_extract(f, p, 0.45);
    for (double th : {0.0, 1.0, 2.5, 4.0}) {
        const cplx z = 0.45 * std::exp(I_ * th);
        cplx rec = 0.0;
        for (int k = LaurentData::kmin; k <= LaurentData::kmax; ++k)
            rec += ld.coeff(k) * std::pow(z, k);
        REQUIRE(close_rel(rec, f(z), 1e-8));
    }
}

TEST_CASE("hexagonal four-end ratio function has residue -1 at the origin") {
    const double s3 = std::sqrt(3.0);
    auto f = [s3](cplx z) { return (s3 * z - 1.0) / (z * (z * z - s3 * z + 1.0)); };
    auto ld = laurent_extract(f, 0.0, 0.25);
    REQUIRE(close(ld.a_minus1(), -1.0, 1e-11));
    REQUIRE(close(ld.a0(), 0.0, 1e-11));
}

TEST_CASE("end check certifies the hexagonal four-end configuration") {
    const cplx a = std::exp(I_ * pi / 6.0);
    auto pair = four_end_pair(a);
    for (cplx p : {a, std::conj(a), cplx(0.0)}) {
        auto ec = end_check(pair, p, 0.3);
        INFO("end " << p.real() << "+" << p.imag() << "i");
        REQUIRE(ec.ord == -2);
        REQUIRE(ec.embedded_planar);
    }
    auto ec_inf = end_check(pair, infinity_point(), 0.3);
    REQUIRE(ec_inf.ord == -2);
    REQUIRE(ec_inf.embedded_planar);
}

TEST_CASE("end check rejects non-ends and residual ends") {
    auto holo = SpinorPair(sphere_section([](cplx) { return cplx(1.0); }),
                           sphere_section([](cplx z) { return z; }));
    auto ec = end_check(holo, 0.0, 0.3);
    REQUIRE(ec.ord == 0);
    REQUIRE_FALSE(ec.embedded_planar);

    auto bad = SpinorPair(sphere_section([](cplx z) { return 1.0 / z + 1.0; }, {{0.0, -1}}),
                          sphere_section([](cplx) { return cplx(1.0); }));
    auto ec2 = end_check(bad, 0.0, 0.3);
    REQUIRE(ec2.ord == -2);
    REQUIRE_FALSE(ec2.embedded_planar);
    // First component of omega carries res(s1^2) = 2 a_{-1} a_0 = 2.
    REQUIRE(close(ec2.residue[0], 2.0, 1e-10));
}

TEST_CASE("cross-term residues obey the ratio identity") {
    auto gen = testutil::rng(211);
    for (int t = 0; t < 10; ++t) {
        const cplx am = testutil::random_unit_box(gen), a0 = testutil::random_unit_box(gen);
        const cplx bm = testutil::random_unit_box(gen), b0 = testutil::random_unit_box(gen);
        if (std::abs(am) < 0.1 || std::abs(bm) < 0.1) continue;
        auto s1 = sphere_section([am, a0](cplx z) { return am / z + a0; }, {{0.0, -1}});
        auto s2 = sphere_section([bm, b0](cplx z) { return bm / z + b0; }, {{0.0, -1}});
        auto chk = residue_cross_identity(s1, s2, 0.0, 0.3);
        REQUIRE(chk.ok);
        REQUIRE(close_rel(chk.lhs, 2.0 * (am * b0 + a0 * bm), 1e-10));
    }

    // Identical sections: the identity is trivially tight.
    auto s = sphere_section([](cplx z) { return 0.8 / z + cplx(0.1, 0.6); }, {{0.0, -1}});
    REQUIRE(residue_cross_identity(s, s, 0.0, 0.3).ok);
}

TEST_CASE("cross-term residue vanishes when orders differ by two") {
    auto s1 = sphere_section([](cplx z) { return 1.0 / z + 0.5; }, {{0.0, -1}});
    auto s2 = sphere_section([](cplx z) { return z * (1.0 + 0.3 * z); }, {{0.0, 1}});
    auto chk = residue_cross_identity(s1, s2, 0.0, 0.3);
    REQUIRE(chk.ok);
    REQUIRE(std::abs(chk.lhs) <= 1e-9);

    auto s3 = sphere_section([](cplx z) { return cplx(1.0) + z; });
    REQUIRE_THROWS_AS(residue_cross_identity(s1, s3, 0.0, 0.3), std::invalid_argument);
}

TEST_CASE("periods vanish on pole-free cycles and detect imbalance") {
    auto holo = SpinorPair(sphere_section([](cplx z) { return z + 0.2; }),
                           sphere_section([](cplx z) { return 1.0 - z * z; }));
    auto per = periods(holo, circle(0.0, 1.0));
    REQUIRE(per.ok);
    REQUIRE(std::abs(per.p11) <= 1e-10);
    REQUIRE(std::abs(per.p22) <= 1e-10);
    REQUIRE(std::abs(per.p12) <= 1e-10);

    auto good = SpinorPair(sphere_section([](cplx z) { return 1.0 / z; }, {{0.0, -1}}),
                           sphere_section([](cplx z) { return 1.0 + z; }));
    auto pg = periods(good, circle(0.0, 1.0));
    REQUIRE(pg.ok);  // int s1 s2 = 2 pi i, purely imaginary.
    REQUIRE(close(pg.p12, 2.0 * pi * I_, 1e-9));

    auto bad = SpinorPair(
        sphere_section([](cplx z) { return cplx(1.0, 1.0) / z; }, {{0.0, -1}}),
        sphere_section([](cplx) { return cplx(1.0); }));
    auto pb = periods(bad, circle(0.0, 1.0));
    REQUIRE_FALSE(pb.ok);
    REQUIRE(close(pb.residual, 2.0 * pi, 1e-8));
}

TEST_CASE("developing map is path independent for residue-free ends") {
    const cplx a = std::exp(I_ * pi / 6.0);
    auto pair = four_end_pair(a);
    const cplx base(-1.4, -0.3), target(1.5, 0.9);
    auto direct = integrate_X(pair, base, target);
    auto detour = integrate_X(pair, base, target, {cplx(-0.3, -1.2), cplx(1.2, -0.9)});
    for (int k = 0; k < 3; ++k) REQUIRE(std::abs(direct[k] - detour[k]) <= 1e-8);

    auto nothing = integrate_X(pair, base, base);
    for (int k = 0; k < 3; ++k) REQUIRE(std::abs(nothing[k]) <= 1e-12);
}

TEST_CASE("null defect and Weierstrass data agree with the pair") {
    const cplx a = std::exp(I_ * pi / 6.0);
    auto pair = four_end_pair(a);
    auto gen = testutil::rng(223);
    for (int t = 0; t < 50; ++t) {
        const cplx z = 2.0 * testutil::random_unit_box(gen);
        bool nearpole = std::abs(z) < 0.15;
        for (cplx p : {a, std::conj(a)}) nearpole = nearpole || std::abs(z - p) < 0.15;
        if (nearpole) continue;
        REQUIRE(null_defect(pair, z) <= 1e-10);

        const cplx f1 = pair.s1.f(z), f2 = pair.s2.f(z);
        if (std::abs(f1) < 0.1) continue;
        const cplx eta = f1 * f1, g = f2 / f1;
        const cvec3 w = pair.omega(z);
        REQUIRE(close_rel(w[0], (1.0 - g * g) * eta, 1e-10));
        REQUIRE(close_rel(w[1], I_ * (1.0 + g * g) * eta, 1e-10));
        REQUIRE(close_rel(w[2], 2.0 * g * eta, 1e-10));
    }
}

TEST_CASE("residues of s1 s2 close up over all ends") {
    const cplx a = std::exp(I_ * pi / 6.0);
    auto pair = four_end_pair(a);
    auto f12 = [&](cplx z) { return pair.s1.f(z) * pair.s2.f(z); };
    cplx total = 0.0;
    for (cplx p : {a, std::conj(a), cplx(0.0)})
        total += laurent_extract(f12, p, 0.3).a_minus1();
    auto at_inf = laurent_extract([&](cplx w) { return -f12(1.0 / w) / (w * w); }, 0.0, 0.3);
    total += at_inf.a_minus1();
    REQUIRE(std::abs(total) <= 1e-9);
}

TEST_CASE("moebius pair passes the compatibility test") {
    const cplx root_i = std::exp(I_ * pi / 4.0);
    auto s1 = sphere_section([root_i](cplx w) { return root_i * (-(w + 1.0) / (w * w)); },
                             {{0.0, -2}});
    auto s2 = sphere_section([root_i](cplx w) { return root_i * (w - 1.0); }, {{1.0, 1}});
    SpinorPair pair(std::move(s1), std::move(s2));
    auto rep = nonorientable_compatibility(pair, sphere_antipodal());
    REQUIRE(rep.compatible);
    REQUIRE((rep.sign == 1 || rep.sign == -1));
    REQUIRE(rep.max_residual <= 1e-9);
}

TEST_CASE("incompatible pairs are rejected with a definite answer") {
    auto pair = SpinorPair(sphere_section([](cplx) { return cplx(1.0); }),
                           sphere_section([](cplx) { return cplx(1.0); }));
    auto rep = nonorientable_compatibility(pair, sphere_antipodal());
    REQUIRE_FALSE(rep.compatible);
    REQUIRE(rep.max_residual > 1e-3);
}

TEST_CASE("constant pair against the untwisted torus frame is incompatible") {
    auto ctx = std::make_shared<EllipticContext>(square_normalized());
    const cplx w1 = ctx->lattice.omega1;
    auto dom = Domain::torus(ctx);
    SpinorSection s{dom, SpinStructure::untwisted(2), [](cplx) { return cplx(1.0); }, {}};
    SpinorPair pair(s, s);
    auto rep = nonorientable_compatibility(pair, torus_conj_shift(w1));
    REQUIRE_FALSE(rep.compatible);
}
