#pragma once

// Spin structures on hyperelliptic curves as branch-point subsets, the mod-2
// quadratic form attached to a structure, and its Arf invariant computed two
// independent ways (full enumeration and the residue-mod-8 closed form).

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spinor/numeric.hpp"

namespace spinor {

// w^2 = product (z - a_i) over 2g+1 distinct finite branch values; one more
// branch point lies at infinity.
struct HyperellipticCurve {
    int genus;
    std::vector<cplx> branch_values;

    HyperellipticCurve(int g, std::vector<cplx> values)
        : genus(g), branch_values(std::move(values)) {
        if (genus < 1) throw std::invalid_argument("HyperellipticCurve: genus must be >= 1");
        if (static_cast<int>(branch_values.size()) != 2 * genus + 1)
            throw std::invalid_argument("HyperellipticCurve: need 2g+1 branch values");
        for (std::size_t i = 0; i < branch_values.size(); ++i)
            for (std::size_t j = i + 1; j < branch_values.size(); ++j)
                if (branch_values[i] == branch_values[j])
                    throw std::invalid_argument("HyperellipticCurve: repeated branch value");
    }

    int points() const { return 2 * genus + 1; }

    // Standard genus-1 curve with branch values (e1, e2, e3).
    static HyperellipticCurve torus(cplx e1, cplx e2, cplx e3) {
        return HyperellipticCurve(1, {e1, e2, e3});
    }
};

namespace detail {

inline int popcount_mask(std::uint32_t m) {
    int c = 0;
    while (m) {
        m &= m - 1;
        ++c;
    }
    return c;
}

}  // namespace detail

// Homology classes are modeled as even subsets of the finite branch values:
// the branch points enclosed by a representing Jordan curve.  The class is a
// bitmask over indices into curve.branch_values.
struct HomologyClass {
    std::uint32_t mask = 0;

    static HomologyClass from_indices(const std::vector<int>& idx, int npoints) {
        HomologyClass c;
        for (int i : idx) {
            if (i < 0 || i >= npoints)
                throw std::invalid_argument("HomologyClass: index out of range");
            if (c.mask & (1u << i))
                throw std::invalid_argument("HomologyClass: repeated index");
            c.mask |= 1u << i;
        }
        if (detail::popcount_mask(c.mask) % 2 != 0)
            throw std::invalid_argument("HomologyClass: subset must be even");
        return c;
    }

    int size() const { return detail::popcount_mask(mask); }

    HomologyClass operator+(HomologyClass other) const {
        return HomologyClass{mask ^ other.mask};
    }

    // Mod-2 intersection number; validated by the refinement identity tests.
    int intersection(HomologyClass other) const {
        return detail::popcount_mask(mask & other.mask) % 2;
    }
};

// A spin structure encoded by a subset B of the branch values (the divisor
// support of the distinguished differential).  B and its complement describe
// the same structure; the representative with #B <= g is canonical, and the
// constructor canonicalizes.
struct SpinStructureB {
    const HyperellipticCurve* curve;
    std::uint32_t B = 0;

    SpinStructureB(const HyperellipticCurve& c, std::uint32_t mask) : curve(&c), B(mask) {
        const std::uint32_t all = (1u << c.points()) - 1u;
        if (B & ~all) throw std::invalid_argument("SpinStructureB: mask out of range");
        if (detail::popcount_mask(B) > c.genus) B = all & ~B;
    }

    static SpinStructureB from_indices(const HyperellipticCurve& c,
                                       const std::vector<int>& idx) {
        std::uint32_t m = 0;
        for (int i : idx) {
            if (i < 0 || i >= c.points())
                throw std::invalid_argument("SpinStructureB: index out of range");
            if (m & (1u << i)) throw std::invalid_argument("SpinStructureB: repeated index");
            m |= 1u << i;
        }
        return SpinStructureB(c, m);
    }

    int b_count() const { return detail::popcount_mask(B); }
};

// q([gamma]) = #(B n C) + #C/2 (mod 2).
inline int q_value(const SpinStructureB& spin, HomologyClass cls) {
    if (cls.size() % 2 != 0) throw std::invalid_argument("q_value: class must be even");
    const int meet = detail::popcount_mask(spin.B & cls.mask);
    return (meet + cls.size() / 2) % 2;
}

// q(c1 + c2) = q(c1) + q(c2) + c1.c2 (mod 2).
inline bool quadratic_refinement_check(const SpinStructureB& spin, HomologyClass c1,
                                       HomologyClass c2) {
    const int lhs = q_value(spin, c1 + c2);
    const int rhs = (q_value(spin, c1) + q_value(spin, c2) + c1.intersection(c2)) % 2;
    return lhs == rhs;
}

namespace detail {

// Enumerate the 2^{2g} even subsets: any subset of the first 2g points,
// parity-completed by the last point.
template <typename F>
void for_each_even_class(int npoints, F&& f) {
    const int base = npoints - 1;
    for (std::uint32_t s = 0; s < (1u << base); ++s) {
        std::uint32_t m = s;
        if (popcount_mask(s) % 2 != 0) m |= 1u << base;
        f(HomologyClass{m});
    }
}

}  // namespace detail

// Arf invariant by the normalized exponential sum over all classes and by the
// closed form 2g - 2#B + 1 mod 8; disagreement is a hard failure.
inline int arf(const SpinStructureB& spin) {
    const int g = spin.curve->genus;
    if (g > 12) throw std::invalid_argument("arf: genus too large for enumeration");

    long long sum = 0;
    detail::for_each_even_class(spin.curve->points(), [&](HomologyClass c) {
        sum += (q_value(spin, c) == 0) ? 1 : -1;
    });
    long long denom = 1ll << g;
    if (sum % denom != 0)
        throw std::logic_error("arf: exponential sum is not a multiple of 2^g");
    const long long brute = sum / denom;

    int residue = (2 * g - 2 * spin.b_count() + 1) % 8;
    if (residue < 0) residue += 8;
    int closed;
    if (residue == 1 || residue == 7)
        closed = 1;
    else if (residue == 3 || residue == 5)
        closed = -1;
    else
        throw std::logic_error("arf: residue is even, which cannot happen");

    if (brute != closed)
        throw std::logic_error("arf: enumeration and closed form disagree");
    return closed;
}

struct HomotopyComparison {
    bool same_immersion_class;  // identical q on every class
    bool same_surface_class;    // equal Arf invariants
};

inline HomotopyComparison regular_homotopy_classify(const SpinStructureB& s1,
                                                    const SpinStructureB& s2) {
    if (s1.curve != s2.curve &&
        (s1.curve->genus != s2.curve->genus ||
         s1.curve->branch_values != s2.curve->branch_values))
        throw std::invalid_argument("regular_homotopy_classify: different curves");
    bool same_q = true;
    detail::for_each_even_class(s1.curve->points(), [&](HomologyClass c) {
        if (q_value(s1, c) != q_value(s2, c)) same_q = false;
    });
    return {same_q, arf(s1) == arf(s2)};
}

// Divisor of the structure's differential: 2(g - #B - 1) at infinity plus 2
// at each finite point of B; total degree 2g - 2.
struct SpinDivisor {
    int infinity_multiplicity;
    std::vector<std::pair<cplx, int>> finite;  // (branch value, multiplicity)

    int degree() const {
        int d = infinity_multiplicity;
        for (const auto& [p, m] : finite) d += m;
        return d;
    }
};

inline SpinDivisor spin_structure_divisor(const SpinStructureB& spin) {
    SpinDivisor div;
    div.infinity_multiplicity = 2 * (spin.curve->genus - spin.b_count() - 1);
    for (int i = 0; i < spin.curve->points(); ++i)
        if (spin.B & (1u << i)) div.finite.emplace_back(spin.curve->branch_values[i], 2);
    return div;
}

// All canonical structures on a curve, in mask order.
inline std::vector<SpinStructureB> all_spin_structures(const HyperellipticCurve& c) {
    std::vector<SpinStructureB> out;
    const std::uint32_t all = (1u << c.points()) - 1u;
    for (std::uint32_t m = 0; m <= all; ++m)
        if (detail::popcount_mask(m) <= c.genus) out.emplace_back(c, m);
    return out;
}

}  // namespace spinor
