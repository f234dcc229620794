#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "altq/errors.hpp"
#include "altq/rational.hpp"

using altq::Polynomial;
using altq::RationalFunction;

namespace {
RationalFunction exp_lst(double rate) {  // rate / (rate + s)
    return RationalFunction{Polynomial{rate}, Polynomial{rate, 1.0}};
}
}  // namespace

TEST_CASE("quotient rule: d/ds [l/(l+s)] = -l/(l+s)^2") {
    RationalFunction f = exp_lst(1.0);
    RationalFunction d = f.derivative();
    for (double x : {0.0, 0.5, 2.0}) {
        double expected = -1.0 / ((1.0 + x) * (1.0 + x));
        CHECK(d(x) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("first derivative of an exponential transform at zero is minus the mean") {
    CHECK(exp_lst(1.0).derivative()(0.0) == doctest::Approx(-1.0));
    CHECK(exp_lst(4.0).derivative()(0.0) == doctest::Approx(-0.25));
}

TEST_CASE("second derivative of 1/(1+s) at zero is 2") {
    RationalFunction f{Polynomial{1.0}, Polynomial{1.0, 1.0}};
    CHECK(f.derivative(2)(0.0) == doctest::Approx(2.0));
    CHECK(f.derivatives_at(0.0, 2)[2] == doctest::Approx(2.0));
}

TEST_CASE("symbolic derivative matches central finite differences at random points") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> coeff(-3.0, 3.0);
    RationalFunction f{Polynomial{coeff(rng), coeff(rng), coeff(rng)}, Polynomial{2.0, 1.5, 1.0}};
    RationalFunction d = f.derivative();
    const double h = 1e-6;
    std::uniform_real_distribution<double> point(-0.9, 3.0);
    for (int k = 0; k < 10; ++k) {
        double x = point(rng);
        double numeric = (f(x + h) - f(x - h)) / (2.0 * h);
        CHECK(d(x) == doctest::Approx(numeric).epsilon(1e-5));
    }
}

TEST_CASE("derivatives_at agrees with the symbolic derivative to high order") {
    RationalFunction f{Polynomial{1.0, 0.5}, Polynomial{1.0, 2.0, 1.0}};
    auto values = f.derivatives_at(0.7, 4);
    for (int k = 0; k <= 4; ++k)
        CHECK(values[static_cast<size_t>(k)] == doctest::Approx(f.derivative(k)(0.7)).epsilon(1e-9));
}

TEST_CASE("denominator leading coefficient is normalized positive") {
    RationalFunction f{Polynomial{1.0}, Polynomial{-1.0, -1.0}};
    CHECK(f.denominator().leading_coefficient() > 0.0);
    CHECK(f(1.0) == doctest::Approx(-0.5));
}

TEST_CASE("zero denominator is rejected and poles raise domain errors") {
    CHECK_THROWS_AS(RationalFunction(Polynomial{1.0}, Polynomial{}), altq::ValidationError);
    RationalFunction f{Polynomial{1.0}, Polynomial{1.0, 1.0}};
    CHECK_THROWS_AS(f(-1.0), altq::DomainError);
}
