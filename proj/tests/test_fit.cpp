#include "support.hpp"

#include "qratchet/errors.hpp"
#include "qratchet/fit.hpp"

#include <doctest.h>

#include <vector>

using namespace qratchet;
using testing_support::Gen;

TEST_CASE("line fit against numpy.polyfit") {
    const std::vector<double> x{0, 1, 2, 3, 4}, y{1.0, 2.9, 5.2, 7.1, 8.8};
    const auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(1.9800000000000004).epsilon(1e-14));
    CHECK(f.intercept == doctest::Approx(1.0400000000000005).epsilon(1e-14));
    CHECK(f.r_squared == doctest::Approx(0.997557251908397).epsilon(1e-13));
}

TEST_CASE("exact lines are recovered") {
    Gen gen(61);
    for (int trial = 0; trial < 50; ++trial) {
        const double m = gen.uniform(-5, 5), c = gen.uniform(-5, 5);
        std::vector<double> x, y;
        const std::size_t n = 2 + gen.below(30);
        for (std::size_t i = 0; i < n; ++i) {
            x.push_back(gen.uniform(-10, 10) + double(i));
            y.push_back(m * x.back() + c);
        }
        const auto f = fit_line(x, y);
        CHECK(f.slope == doctest::Approx(m).epsilon(1e-9));
        CHECK(f.intercept == doctest::Approx(c).epsilon(1e-9).scale(1.0));
        CHECK(f.r_squared <= 1.0);
        if (std::abs(m) > 1e-3) CHECK(f.r_squared == doctest::Approx(1.0));
    }
}

TEST_CASE("r squared stays in [0, 1] for noisy data") {
    Gen gen(62);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x, y;
        for (int i = 0; i < 20; ++i) {
            x.push_back(i);
            y.push_back(gen.normal());
        }
        const auto f = fit_line(x, y);
        CHECK(f.r_squared >= 0.0);
        CHECK(f.r_squared <= 1.0);
    }
}

TEST_CASE("flat data has zero r squared") {
    const std::vector<double> x{1, 2, 3}, y{4, 4, 4};
    const auto f = fit_line(x, y);
    CHECK(f.slope == 0.0);
    CHECK(f.intercept == doctest::Approx(4.0));
    CHECK(f.r_squared == 0.0);
}

TEST_CASE("degenerate inputs") {
    const std::vector<double> one{1.0}, two{1.0, 2.0}, three{1.0, 2.0, 3.0}, same{2.0, 2.0};
    CHECK_THROWS_AS(fit_line(one, one), InvalidArgument);
    CHECK_THROWS_AS(fit_line(two, three), InvalidArgument);
    CHECK_THROWS_AS(fit_line(same, two), InvalidArgument);
}
