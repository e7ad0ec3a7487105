#include <cmath>
#include <numbers>
#include <random>

#include "catforge/model.hpp"
#include "doctest.h"
#include "oracles/oracles.hpp"

using namespace catforge;

namespace {

SystemParams fig2_closed(double omega_m = 20.0) {
    SystemParams p;
    p.omega_m = omega_m;
    p.xi = 1.5271;
    p.n0 = 1;
    const double g = effective_coupling(p.g0, p.xi, p.n0);
    p.omega_0 = omega0_for_detuning(p.omega_m, p.n0, g);
    return p;
}

} // namespace

TEST_CASE("bessel functions") {
    CHECK(bessel_j(0, 0.0) == 1.0);
    CHECK(bessel_j(3, 0.0) == 0.0);
    CHECK(bessel_j(2, 2 * 1.5271) == doctest::Approx(0.48648).epsilon(1e-4));
    for (double z : {0.1, 0.5, 3.0542, 9.9694, 12.0}) {
        for (int n = 0; n <= 8; ++n) {
            CHECK(std::abs(bessel_j(n, z) - oracle::bessel_series(n, z)) < 1e-12);
        }
    }
}

TEST_CASE("property: bessel recurrence") {
    for (double z : {0.5, 3.05, 9.97}) {
        for (int n = 1; n <= 20; ++n) {
            const double lhs = bessel_j(n - 1, z) + bessel_j(n + 1, z);
            REQUIRE(std::abs(lhs - 2.0 * n / z * bessel_j(n, z)) < 1e-10);
        }
    }
}

TEST_CASE("J2 peaks at the working point") {
    double best = 0.0;
    double arg = 0.0;
    for (int k = 0; k <= 300000; ++k) {
        const double xi = 3.0 * k / 300000.0;
        const double v = bessel_j(2, 2.0 * xi);
        if (v > best) {
            best = v;
            arg = xi;
        }
    }
    CHECK(std::abs(arg - 1.5271) < 1e-3);
    // second extremum of |J2| used by the larger working point
    double worst = 0.0;
    double arg2 = 0.0;
    for (int k = 0; k <= 200000; ++k) {
        const double xi = 4.0 + 2.0 * k / 200000.0;
        const double v = std::abs(bessel_j(2, 2.0 * xi));
        if (v > worst) {
            worst = v;
            arg2 = xi;
        }
    }
    CHECK(std::abs(arg2 - 4.9847) < 1e-3);
}

TEST_CASE("parameter validation") {
    SystemParams p = fig2_closed();
    CHECK_NOTHROW(p.validate());
    p.gamma_c = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = fig2_closed();
    p.n0 = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = fig2_closed();
    p.omega_0 = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("derived modulation") {
    const SystemParams p = fig2_closed();
    const DerivedModulation d = derive(p);
    CHECK(d.g == doctest::Approx(0.2432).epsilon(1e-3));
    CHECK(d.delta == doctest::Approx(d.g).epsilon(1e-12));
    CHECK(d.beta_max == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(d.t0() == doctest::Approx(std::numbers::pi / d.delta));
    CHECK(rwa_diagnostic(p, d).valid);

    SystemParams res = p;
    res.omega_0 = p.omega_m / (2.0 * p.n0);
    const DerivedModulation r = derive(res);
    CHECK(r.unbounded);
    CHECK(std::isinf(r.beta_max));

    SystemParams big = p;
    big.xi = 4.9847;
    CHECK(derive(big).g == doctest::Approx(oracle::bessel_series(2, 9.9694) / 2.0).epsilon(1e-12));
}

TEST_CASE("rwa diagnostic flags slow modulation") {
    SystemParams p = fig2_closed();
    p.omega_m = 2.0;
    p.omega_0 = 0.9;
    CHECK_FALSE(rwa_diagnostic(p, derive(p)).valid);
}

TEST_CASE("coherent amplitude trajectory") {
    const SystemParams p = fig2_closed();
    const DerivedModulation d = derive(p);
    CHECK(std::abs(beta_of_t(d, p.omega_m, 0.0)) == 0.0);
    CHECK(std::abs(beta_of_t(d, p.omega_m, std::numbers::pi / d.delta)) == doctest::Approx(2.0).epsilon(1e-12));
    const complex bd = beta_of_t(d, p.omega_m, 12.6664);
    CHECK(std::abs(bd.real() - (-0.8878)) < 1e-3);
    CHECK(std::abs(bd.imag() - (-1.7911)) < 1e-3);

    SUBCASE("property: modulus") {
        for (int k = 0; k < 50; ++k) {
            const double t = 0.37 * k;
            CHECK(std::abs(beta_of_t(d, p.omega_m, t)) ==
                  doctest::Approx(2.0 * d.g / std::abs(d.delta) * std::abs(std::sin(0.5 * d.delta * t))).epsilon(1e-12));
        }
    }
    SUBCASE("resonant limit") {
        SystemParams res = p;
        res.omega_0 = p.omega_m / 2.0;
        const DerivedModulation r = derive(res);
        const double t = 3.3;
        const complex expect = complex(0.0, -r.g * t) * std::exp(complex(0.0, -p.omega_m * t));
        CHECK(std::abs(beta_of_t(r, p.omega_m, t) - expect) < 1e-12);
        // continuity from a tiny detuning
        DerivedModulation near = r;
        near.delta = 1e-7;
        CHECK(std::abs(beta_of_t(near, p.omega_m, t) - expect) < 1e-6);
    }
}

TEST_CASE("modulation phase and global phase") {
    const SystemParams p = fig2_closed();
    const DerivedModulation d = derive(p);
    CHECK(mu_of_t(p, 0.0) == 0.0);
    CHECK(mu_of_t(p, 0.5 * std::numbers::pi / p.omega_0) == doctest::Approx(2.0 * p.xi));
    CHECK(theta_of_t(p, d, 0.0) == 0.0);
    SystemParams pc = p;
    pc.omega_c = 3.0;
    const DerivedModulation dc = derive(pc);
    const double t0 = std::numbers::pi / dc.delta;
    CHECK(theta_of_t(pc, dc, t0) == doctest::Approx(-(pc.omega_c - dc.g) * std::numbers::pi / dc.g).epsilon(1e-12));
}

TEST_CASE("property: equal weights at tan(mu/2) = +-1") {
    for (int k = -3; k <= 3; ++k) {
        const double mu = (k + 0.5) * std::numbers::pi;
        CHECK(std::abs(std::abs(std::cos(0.5 * mu)) - std::abs(std::sin(0.5 * mu))) < 1e-15);
    }
    const double mu = 0.3;
    CHECK(std::abs(std::abs(std::cos(0.5 * mu)) - std::abs(std::sin(0.5 * mu))) > 0.1);
}

TEST_CASE("target cat states") {
    const SystemParams p = fig2_closed();
    const DerivedModulation d = derive(p);
    const auto [l0, r0] = target_states(p, d, 0.0);
    const ComplexVector vac = ComplexVector::Unit(21, 0);
    CHECK((l0.fock_coefficients(FockCutoff(20)) - vac).norm() < 1e-14);
    CHECK((r0.fock_coefficients(FockCutoff(20)) - vac).norm() < 1e-14);

    SUBCASE("equal-weight state at the detection time") {
        const double td = 12.6664;
        const auto [l, r] = target_states(p, d, td);
        const complex beta = beta_of_t(d, p.omega_m, td);
        CHECK(std::abs(std::tan(0.5 * mu_of_t(p, td))) == doctest::Approx(1.0).epsilon(1e-3));
        const FockCutoff cut(50);
        const ComplexVector yurke =
            (oracle::coherent_expm(beta, 51) - complex(0.0, 1.0) * oracle::coherent_expm(-beta, 51)) / std::sqrt(2.0);
        const ComplexVector phi = l.fock_coefficients(cut);
        // equal up to a global phase, and up to the cat-norm correction e^{-2|beta|^2}
        CHECK(std::norm(phi.dot(yurke)) > 1.0 - 1e-3);
    }
    SUBCASE("property: normalization at random times") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> tt(0.0, 30.0);
        for (int k = 0; k < 20; ++k) {
            const auto [l, r] = target_states(p, d, tt(rng));
            const FockCutoff cut(60);
            CHECK(l.fock_coefficients(cut).squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(r.fock_coefficients(cut).squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(l.norm_squared() > 0.0);
            CHECK(l.density_matrix(cut).trace().real() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("success probability estimate") {
    SystemParams p = fig2_closed();
    CHECK(success_probability_estimate(p) == 1.0);
    p.gamma_c = 0.2;
    CHECK(success_probability_estimate(p) == doctest::Approx(0.0810).epsilon(1e-2));
    p.gamma_c = 0.1;
    CHECK(success_probability_estimate(p) == doctest::Approx(0.285).epsilon(1e-2));
}
