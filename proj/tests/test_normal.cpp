#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fairmix/normal.hpp"

using fairmix::norm_cdf;
using fairmix::norm_pdf;
using fairmix::norm_quantile;

TEST_CASE("quantile hits reference values") {
    // reference values from high-precision evaluation of the inverse CDF
    CHECK(norm_quantile(0.5) == 0.0);
    CHECK(std::abs(norm_quantile(0.05) - (-1.6448536269514722)) < 1e-13);
    CHECK(std::abs(norm_quantile(0.95) - 1.6448536269514722) < 1e-13);
    CHECK(std::abs(norm_quantile(0.975) - 1.9599639845400545) < 1e-13);
    CHECK(std::abs(norm_quantile(0.025) - (-1.9599639845400545)) < 1e-13);
    CHECK(std::abs(norm_quantile(0.999) - 3.0902323061678132) < 1e-12);
    // deep tail, the regime where naive erf inversion loses digits
    CHECK(std::abs(norm_quantile(1e-10) - (-6.3613409024040557)) < 1e-9);
}

TEST_CASE("cdf hits reference values and symmetry") {
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(norm_cdf(1.0) - 0.84134474606854293) < 1e-15);
    CHECK(std::abs(norm_cdf(-1.0) - 0.15865525393145707) < 1e-15);
    CHECK(std::abs(norm_cdf(2.0) - 0.97724986805182079) < 1e-15);
    for (double x : {0.1, 0.7, 1.3, 2.9, 4.5}) {
        CHECK(norm_cdf(-x) == doctest::Approx(1.0 - norm_cdf(x)).epsilon(1e-14));
    }
    // tail stays positive and monotone far out
    CHECK(norm_cdf(-38.0) > 0.0);
    CHECK(norm_cdf(-38.0) < norm_cdf(-37.0));
}

TEST_CASE("pdf reference value and evenness") {
    CHECK(std::abs(norm_pdf(0.0) - 0.39894228040143268) < 1e-16);
    CHECK(norm_pdf(1.7) == doctest::Approx(norm_pdf(-1.7)).epsilon(1e-15));
    CHECK(norm_pdf(3.0) == doctest::Approx(std::exp(-4.5) * norm_pdf(0.0)).epsilon(1e-14));
}

TEST_CASE("quantile and cdf invert each other") {
    for (double p : {1e-12, 1e-6, 0.01, 0.2, 0.5, 0.77, 0.99, 1.0 - 1e-6}) {
        CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
    }
    // above ~5.5 the cdf saturates toward 1 and the round trip loses the
    // argument to rounding in p; the lower tail keeps full relative precision
    for (double x = -8.0; x <= 5.5; x += 0.5) {
        CHECK(norm_quantile(norm_cdf(x)) == doctest::Approx(x).epsilon(1e-9));
    }
}

TEST_CASE("quantile rejects out-of-range probabilities") {
    CHECK_THROWS_AS(norm_quantile(0.0), std::invalid_argument);
    CHECK_THROWS_AS(norm_quantile(1.0), std::invalid_argument);
    CHECK_THROWS_AS(norm_quantile(-0.2), std::invalid_argument);
    CHECK_THROWS_AS(norm_quantile(1.2), std::invalid_argument);
}
