#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "stokesrbf/kernels.hpp"

using namespace stokesrbf;

namespace {

const KernelSpec kImq01{RbfFamily::InverseMultiquadric, 0.1, 50};
const KernelSpec kGauss1{RbfFamily::Gaussian, 1.0, 50};

}  // namespace

TEST_CASE("scalar ladder closed-form anchors") {
    auto g = eval_scalar<double>(kGauss1, 0.0);
    CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(-1.0).epsilon(1e-15));

    KernelSpec imq1{RbfFamily::InverseMultiquadric, 1.0, 50};
    auto m = eval_scalar<double>(imq1, 3.0);
    CHECK(m[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("ladder derivative consistency at 50 digits") {
    ScopedDigits guard(50);
    const BigFloat u(2.0), h = BigFloat::from_string("1e-14");
    BigFloat lad[kMaxRadialDerivative + 1];
    radial_ladder(kImq01, u, 4, lad);
    // d2 vs central difference of d1 in the squared-radius variable
    BigFloat up[5], um[5];
    radial_ladder(kImq01, u + h, 1, up);
    radial_ladder(kImq01, u - h, 1, um);
    const BigFloat fd = (up[1] - um[1]) / (BigFloat(2.0) * h);
    CHECK(std::abs((fd - lad[2]).to_double()) < 1e-30);
}

TEST_CASE("ladder matches finite differences of the previous level (property)") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ur(0.05, 4.0);
    for (const KernelSpec& ks : {kImq01, kGauss1}) {
        for (int trial = 0; trial < 10; ++trial) {
            const double u = ur(rng);
            double lad[kMaxRadialDerivative + 1];
            radial_ladder(ks, u, 5, lad);
            for (int k = 1; k <= 5; ++k) {
                const double h = 1e-6 * std::max(1.0, u);
                double up[kMaxRadialDerivative + 1], um[kMaxRadialDerivative + 1];
                radial_ladder(ks, u + h, k - 1, up);
                radial_ladder(ks, u - h, k - 1, um);
                const double fd = (up[k - 1] - um[k - 1]) / (2.0 * h);
                CHECK(oracles::rel_err(fd, lad[k], 1e-14) < 1e-7);
            }
        }
    }
}

TEST_CASE("divergence-free block at the origin and against the FD oracle") {
    const DivFreeKernel k = DivFreeKernel::make(kGauss1);
    auto at0 = eval_divfree<double>(k, 0.0, 0.0);
    CHECK(at0[1] == 0.0);
    CHECK(at0[2] == 0.0);
    CHECK(at0[0] == doctest::Approx(at0[3]).epsilon(1e-15));

    auto e = eval_divfree<double>(k, 1.0, 0.0);
    {
        ScopedDigits guard(50);
        const BigFloat h = BigFloat::from_string("1e-12");
        int idx = 0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b, ++idx) {
                const BigFloat ofd =
                    oracles::divfree_entry_fd(k.psi, a, b, BigFloat(1.0), BigFloat(0.0), h);
                CHECK(std::abs(ofd.to_double() - e[idx]) < 1e-8);
            }
        auto ebig = eval_divfree<BigFloat>(k, BigFloat(1.0), BigFloat(0.0));
        idx = 0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b, ++idx) {
                const BigFloat ofd =
                    oracles::divfree_entry_fd(k.psi, a, b, BigFloat(1.0), BigFloat(0.0), h);
                CHECK(std::abs((ofd - ebig[idx]).to_double()) < 1e-20);
            }
    }
}

TEST_CASE("analytic divergence of kernel columns vanishes") {
    const DivFreeKernel k = DivFreeKernel::make(kImq01);
    const Point2 x{0.3, -0.7};
    for (int col = 0; col < 2; ++col) {
        const Functional dv = velocity_divergence(x);
        const Functional src = identity_functional({0.1, 0.2}, col);
        const double div = apply_functional_pair<double>(dv, src, k);
        CHECK(std::abs(div) < 1e-15);
        ScopedDigits guard(50);
        const BigFloat divb = apply_functional_pair<BigFloat>(dv, src, k);
        CHECK(std::abs(divb.to_double()) < 1e-45);
    }
}

TEST_CASE("functional pair: identity pair and normal-trace linearity") {
    const DivFreeKernel k = DivFreeKernel::make(kGauss1);
    const Point2 p{0.4, 0.1};
    const double self =
        apply_functional_pair<double>(identity_functional(p, 0), identity_functional(p, 0), k);
    auto at0 = eval_divfree<double>(k, 0.0, 0.0);
    CHECK(self == doctest::Approx(at0[0]).epsilon(1e-14));

    const Point2 q{-0.2, 0.3};
    const Functional g = interior_operator(q, 1, 1.0);
    const double row1 = apply_functional_pair<double>(identity_functional(p, 0), g, k);
    const double row2 = apply_functional_pair<double>(identity_functional(p, 1), g, k);
    const double nt = apply_functional_pair<double>(normal_trace(p, {1.0, 0.0}), g, k);
    CHECK(nt == doctest::Approx(row1).epsilon(1e-13));
    const Vec2 nu2{std::sqrt(0.5), std::sqrt(0.5)};
    const double nt2 = apply_functional_pair<double>(normal_trace(p, nu2), g, k);
    CHECK(nt2 == doctest::Approx(nu2.x * row1 + nu2.y * row2).epsilon(1e-12));
}

TEST_CASE("functional pairs match the nested finite-difference oracle") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ur(-0.8, 0.8);
    const DivFreeKernel k = DivFreeKernel::make(kImq01);
    const double mu = 1.0, dtb = 0.02 * 2.0 / 3.0;

    for (int trial = 0; trial < 6; ++trial) {
        const Point2 a{ur(rng), ur(rng)};
        Point2 b{ur(rng), ur(rng)};
        if (std::hypot(a.x - b.x, a.y - b.y) < 0.15) b.x += 0.4;
        const double r = std::max(std::hypot(b.x, b.y), 0.2);
        const Vec2 nu{b.x / r, b.y / r};
        const Vec2 tau{-nu.y, nu.x};

        const std::vector<Functional> fs = {
            modified_interior(a, 0, mu, dtb), modified_interior(a, 1, mu, dtb),
            interior_operator(a, 0, mu),      dirichlet_trace(a, 1),
            velocity_divergence(a),           pressure_gradient(a, 0)};
        const std::vector<Functional> gs = {
            modified_interior(b, 1, mu, dtb),        interior_operator(b, 0, mu),
            dirichlet_trace(b, 0),                   normal_trace(b, nu),
            tangential_stress(b, nu, tau, mu, true), pressure_value(b)};
        for (const auto& F : fs)
            for (const auto& G : gs) {
                const double got = apply_functional_pair<double>(F, G, k);
                const double want = oracles::pair_fd(F, G, k);
                CHECK(oracles::rel_err(got, want, 1e-10) < 1e-7);
            }
    }
}

TEST_CASE("tangential stress functional") {
    SUBCASE("axis-aligned frame reduces to mu (dy v1 + dx v2)") {
        const Point2 z{0.2, 0.5};
        const Functional f = tangential_stress(z, {1.0, 0.0}, {0.0, 1.0}, 2.0, false);
        double cy0 = 0.0, cx1 = 0.0;
        for (const auto& t : f.terms) {
            CHECK(t.comp != 2);
            if (t.comp == 0 && t.dx == 0 && t.dy == 1) cy0 += t.coeff;
            if (t.comp == 1 && t.dx == 1 && t.dy == 0) cx1 += t.coeff;
        }
        CHECK(cy0 == doctest::Approx(2.0));
        CHECK(cx1 == doctest::Approx(2.0));
    }
    SUBCASE("unit-circle frames validate") {
        for (double th : {0.1, 1.3, 2.9, 4.4}) {
            const Vec2 nu{std::cos(th), std::sin(th)};
            const Vec2 tau{-std::sin(th), std::cos(th)};
            CHECK_NOTHROW(tangential_stress({nu.x, nu.y}, nu, tau, 1.0, true));
        }
    }
    SUBCASE("bad frames throw") {
        CHECK_THROWS_AS(tangential_stress({1, 0}, {1.0, 0.1}, {0.0, 1.0}, 1.0, true), BadGeometry);
        CHECK_THROWS_AS(tangential_stress({1, 0}, {1.0, 0.0}, {0.1, 1.0}, 1.0, true), BadGeometry);
        CHECK_THROWS_AS(normal_trace({1, 0}, {2.0, 0.0}), BadGeometry);
    }
    SUBCASE("matches the symbolic trace of the rotational solution") {
        ScopedDigits guard(50);
        const BigFloat t(0.37);
        const BigFloat pi = BigFloat::pi();
        auto field = [&](const BigFloat& x, const BigFloat& y) {
            const BigFloat q = pi * (x * x + y * y) / BigFloat(2.0);
            const BigFloat amp = pi * sin(q) * sin(pi * t);
            return std::array<BigFloat, 3>{-amp * y, amp * x, sin(x - y + t)};
        };
        for (double th : {0.3, 2.0}) {
            const Point2 p{std::cos(th), std::sin(th)};
            const Functional f = tangential_stress(p, {p.x, p.y}, {-p.y, p.x}, 1.0, true);
            CHECK(std::abs(oracles::apply_to_field_fd(f, field).to_double()) < 1e-12);

            const double r = 0.77;
            const Point2 pin{r * std::cos(th), r * std::sin(th)};
            const Functional fi = tangential_stress(pin, {std::cos(th), std::sin(th)},
                                                    {-std::sin(th), std::cos(th)}, 1.0, true);
            const double got = oracles::apply_to_field_fd(fi, field).to_double();
            // (sigma nu)_tg = mu pi^2 sin(pi t) r^2 cos(pi r^2 / 2)
            const double want =
                M_PI * M_PI * std::sin(M_PI * 0.37) * std::cos(M_PI * r * r / 2.0) * r * r;
            CHECK(oracles::rel_err(got, want, 1e-12) < 1e-10);
        }
    }
}

TEST_CASE("Gram symmetry under argument swap") {
    ScopedDigits guard(50);
    const DivFreeKernel k = DivFreeKernel::make(kImq01);
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> ur(-0.9, 0.9);
    std::vector<Functional> fns;
    for (int i = 0; i < 6; ++i) {
        const Point2 p{ur(rng), ur(rng)};
        switch (i % 3) {
            case 0: fns.push_back(modified_interior(p, i % 2, 1.0, 0.01)); break;
            case 1: fns.push_back(identity_functional(p, i % 2)); break;
            default: {
                const double r = std::max(std::hypot(p.x, p.y), 0.1);
                fns.push_back(
                    tangential_stress(p, {p.x / r, p.y / r}, {-p.y / r, p.x / r}, 1.0, true));
            }
        }
    }
    for (std::size_t i = 0; i < fns.size(); ++i)
        for (std::size_t j = 0; j < fns.size(); ++j) {
            const BigFloat aij = apply_functional_pair<BigFloat>(fns[i], fns[j], k);
            const BigFloat aji = apply_functional_pair<BigFloat>(fns[j], fns[i], k);
            CHECK(std::abs((aij - aji).to_double()) <=
                  1e-45 * std::max(1.0, std::abs(aij.to_double())));
        }
}

TEST_CASE("divergence-free exactness for random combinations (property)") {
    const DivFreeKernel k = DivFreeKernel::make(kImq01);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ur(-1.0, 1.0);
    for (int rep = 0; rep < 3; ++rep) {
        std::vector<Functional> cols;
        std::vector<double> coef;
        for (int j = 0; j < 12; ++j) {
            const Point2 z{ur(rng), ur(rng)};
            cols.push_back(j % 2 ? modified_interior(z, j % 2, 1.0, 0.05)
                                 : identity_functional(z, (j / 2) % 2));
            coef.push_back(ur(rng));
        }
        for (int q = 0; q < 10; ++q) {
            const Point2 x{ur(rng), ur(rng)};
            double div = 0.0;
            for (std::size_t j = 0; j < cols.size(); ++j)
                div += coef[j] * apply_functional_pair<double>(velocity_divergence(x), cols[j], k);
            CHECK(std::abs(div) < 1e-13);
        }
    }
}

TEST_CASE("unsupported operator order throws") {
    const DivFreeKernel k = DivFreeKernel::make(kGauss1);
    const Functional high{{0.0, 0.0}, {{1.0, 3, 0, 0}}};
    CHECK_THROWS_AS(apply_functional_pair<double>(high, modified_interior({1, 0}, 0, 1.0, 0.1), k),
                    UnsupportedPair);
}
