#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "morsejt/special.hpp"

using namespace morsejt;
using Catch::Approx;

TEST_CASE("digamma matches known values", "[special]") {
    const double euler = 0.57721566490153286;
    CHECK(digamma(1.0) == Approx(-euler).epsilon(1e-13));
    // psi(5) = -gamma + 1 + 1/2 + 1/3 + 1/4
    CHECK(digamma(5.0) == Approx(-euler + 1.0 + 0.5 + 1.0 / 3.0 + 0.25).epsilon(1e-13));
    CHECK(digamma(0.5) == Approx(-euler - 2.0 * std::log(2.0)).epsilon(1e-13));
    CHECK_THROWS_AS(digamma(0.0), NonPositiveArgument);
}

TEST_CASE("laguerre recurrence against explicit low orders", "[special]") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ya(0.0, 20.0), aa(-0.9, 8.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double y = ya(rng), a = aa(rng);
        CHECK(laguerre(0, a, y) == 1.0);
        CHECK(laguerre(1, a, y) == Approx(1.0 + a - y).margin(1e-13));
        const double l2 = 0.5 * ((a + 1.0) * (a + 2.0)) - (a + 2.0) * y + 0.5 * y * y;
        CHECK(laguerre(2, a, y) == Approx(l2).epsilon(1e-12).margin(1e-12));
    }
}

TEST_CASE("confluent F terminating polynomial", "[special]") {
    CHECK(confluent_f(0, 3.7, 11.0) == 1.0);
    // F(-1, b, y) = 1 - y/b
    CHECK(confluent_f(1, 4.0, 4.0) == Approx(0.0).margin(1e-14));
    CHECK(confluent_f(1, 2.5, 1.0) == Approx(1.0 - 1.0 / 2.5).epsilon(1e-13));
    // F(-2, 2, y) = 1 - y + y^2/6
    for (double y : {0.3, 2.0, 7.5})
        CHECK(confluent_f(2, 2.0, y) == Approx(1.0 - y + y * y / 6.0).epsilon(1e-12));
}

// generating identity: e^{k u}(u - k)^n = sum_p coeff(n,p,k) u^p, coefficients
// checked against the literal double series
static double direct_series_coeff(int n, int p, double kappa) {
    double tot = 0.0;
    for (int b = 0; b <= n; ++b) {
        const int a = p - n + b;
        if (a < 0) continue;
        const double binom =
            std::exp(log_gamma(n + 1.0) - log_gamma(b + 1.0) - log_gamma(n - b + 1.0));
        tot += std::pow(kappa, a) / std::exp(log_gamma(a + 1.0)) * binom * std::pow(-kappa, b);
    }
    return tot;
}

TEST_CASE("laguerre expansion coefficients equal the generating series", "[special]") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ka(0.01, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        const double kappa = ka(rng);
        for (int n = 0; n <= 4; ++n)
            for (int p = 0; p <= 9; ++p)
                CHECK(laguerre_expansion_coefficient(n, p, kappa)
                      == Approx(direct_series_coeff(n, p, kappa)).margin(1e-12));
    }
    // kappa = 0 collapses to the Kronecker delta
    CHECK(laguerre_expansion_coefficient(2, 2, 0.0) == 1.0);
    CHECK(laguerre_expansion_coefficient(2, 1, 0.0) == 0.0);
    CHECK(laguerre_expansion_coefficient(2, 5, 0.0) == 0.0);
}

TEST_CASE("hermite functions are orthonormal on a dense grid", "[special]") {
    const int nmax = 6;
    const double h = 1e-3;
    std::vector<double> acc((nmax + 1) * (nmax + 1), 0.0);
    for (double xi = -12.0; xi <= 12.0; xi += h) {
        const auto v = hermite_functions(nmax, xi, std::pow(M_PI, -0.25));
        for (int i = 0; i <= nmax; ++i)
            for (int j = 0; j <= nmax; ++j) acc[i * (nmax + 1) + j] += v[i] * v[j] * h;
    }
    for (int i = 0; i <= nmax; ++i)
        for (int j = 0; j <= nmax; ++j)
            CHECK(acc[i * (nmax + 1) + j] == Approx(i == j ? 1.0 : 0.0).margin(1e-8));
}
