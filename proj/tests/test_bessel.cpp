#include <catch2/catch_amalgamated.hpp>

#include "helmrec/bessel.hpp"
#include "oracles.hpp"

using helmrec::bessel_j;
using helmrec::bessel_j_all;
using helmrec::bessel_j_prime;

TEST_CASE("bessel_j basic values") {
    CHECK(bessel_j(0, 0.0) == 1.0);
    CHECK(bessel_j(1, 0.0) == 0.0);
    CHECK(bessel_j(17, 0.0) == 0.0);
}

TEST_CASE("first zero of J0") {
    // located by bisection on the independent series
    const double z = oracles::bisect(
        [](double x) { return oracles::bessel_series(0, x); }, 2.0, 3.0);
    CHECK(std::abs(z - 2.404825557695773) < 1e-12);
    CHECK(std::abs(bessel_j(0, 2.404825557695773)) < 1e-10);
}

TEST_CASE("bessel_j matches series reference") {
    for (int n : {0, 1, 2, 3, 5, 8, 13, 16, 32, 64}) {
        for (double x : {0.05, 0.3, 0.9, 1.0, 2.7, 4.0, 6.3, 7.9, 8.1, 9.5, 11.0, 14.5}) {
            const double ref = oracles::bessel_series(n, x);
            CHECK(std::abs(bessel_j(n, x) - ref) < 1e-12);
        }
    }
}

TEST_CASE("bessel_j_all consistent with scalar path") {
    for (double x : {0.2, 3.1, 12.0, 47.0, 99.5}) {
        const auto all = bessel_j_all(20, x);
        for (int n : {0, 4, 11, 20})
            CHECK(all[static_cast<std::size_t>(n)] == Catch::Approx(bessel_j(n, x)).margin(1e-13));
    }
}

TEST_CASE("recurrence residual stays small") {
    for (int n = 1; n <= 16; ++n) {
        for (double x = 0.1; x <= 30.0; x += 1.7) {
            const double jm = bessel_j(n - 1, x);
            const double jp = bessel_j(n + 1, x);
            const double jn = bessel_j(n, x);
            const double res = std::abs(jm + jp - (2.0 * n / x) * jn);
            CHECK(res <= 1e-10 * (1.0 + std::abs(jn)));
        }
    }
}

TEST_CASE("derivative identities") {
    CHECK(bessel_j_prime(0, 0.0) == 0.0);
    // first critical point of J1
    CHECK(std::abs(bessel_j_prime(1, 1.8412)) < 1e-4);
    // central finite difference at (2, 3.7)
    const double h = 1e-6;
    const double fd = (bessel_j(2, 3.7 + h) - bessel_j(2, 3.7 - h)) / (2.0 * h);
    CHECK(std::abs(bessel_j_prime(2, 3.7) - fd) < 1e-6);
    // n >= 1 formula against the series reference
    for (int n : {1, 2, 7, 16}) {
        for (double x : {0.4, 1.0, 5.5, 12.0}) {
            CHECK(std::abs(bessel_j_prime(n, x) - oracles::bessel_series_prime(n, x)) < 1e-12);
        }
    }
}

TEST_CASE("cross-product form stays negative and finite") {
    for (int n = 0; n <= 8; ++n) {
        for (double x = 0.5; x <= 12.0; x += 0.37) {
            const double w = bessel_j(n + 1, x) * bessel_j_prime(n, x) -
                             bessel_j(n, x) * bessel_j_prime(n + 1, x);
            REQUIRE(std::isfinite(w));
            CHECK(w < 0.0);
        }
    }
}

TEST_CASE("domain validation") {
    CHECK_THROWS_AS(bessel_j(65, 1.0), helmrec::ConfigError);
    CHECK_THROWS_AS(bessel_j(-1, 1.0), helmrec::ConfigError);
    CHECK_THROWS_AS(bessel_j(0, -0.5), helmrec::ConfigError);
    CHECK_THROWS_AS(bessel_j(0, 100.5), helmrec::ConfigError);
    CHECK_THROWS_AS(bessel_j_prime(65, 1.0), helmrec::ConfigError);
    CHECK_NOTHROW(bessel_j(64, 100.0));
}
