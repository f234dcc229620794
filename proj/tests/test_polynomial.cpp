#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "altq/polynomial.hpp"

using altq::Polynomial;

TEST_CASE("product expands (1+s)(1-s)") {
    Polynomial a{1.0, 1.0};
    Polynomial b{1.0, -1.0};
    Polynomial c = a * b;
    CHECK(c.degree() == 2);
    CHECK(c.coefficient(0) == 1.0);
    CHECK(c.coefficient(1) == 0.0);
    CHECK(c.coefficient(2) == -1.0);
}

TEST_CASE("adding zero is the identity") {
    Polynomial p{3.0, -2.0, 0.5};
    CHECK(p + Polynomial{} == p);
}

TEST_CASE("subtraction cancels to the zero polynomial") {
    Polynomial p{1.0, 1.0};
    Polynomial zero = p - p;
    CHECK(zero.is_zero());
    CHECK(zero.degree() == -1);
}

TEST_CASE("canonical trimming drops trailing zeros") {
    Polynomial p{1.0, 2.0, 0.0, 0.0};
    CHECK(p.degree() == 1);
    CHECK(p.leading_coefficient() == 2.0);
}

TEST_CASE("derivative of s^2 is 2s") {
    Polynomial p = Polynomial::monomial(2);
    Polynomial d = p.derivative();
    CHECK(d == Polynomial{0.0, 2.0});
}

TEST_CASE("zeroth derivative returns the input unchanged") {
    Polynomial p{4.0, 0.0, 1.0, 7.0};
    CHECK(p.derivative(0) == p);
}

TEST_CASE("second derivative of s^3 + s is 6s") {
    Polynomial p{0.0, 1.0, 0.0, 1.0};
    CHECK(p.derivative(2) == Polynomial{0.0, 6.0});
}

TEST_CASE("evaluation agrees between real and complex Horner") {
    Polynomial p{2.0, -1.0, 3.0, 0.25};
    double x = 1.7;
    CHECK(p(x) == doctest::Approx(p(std::complex<double>(x, 0.0)).real()));
    CHECK(p(std::complex<double>(x, 0.0)).imag() == 0.0);
}

TEST_CASE("reflection substitutes s -> -s") {
    Polynomial p{1.0, 2.0, 3.0, 4.0};
    Polynomial r = p.reflected();
    for (double x : {-1.5, 0.0, 0.3, 2.0}) CHECK(r(x) == doctest::Approx(p(-x)));
}
