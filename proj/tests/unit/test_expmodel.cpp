#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "bezsimplex/errors.hpp"
#include "bezsimplex/expmodel.hpp"
#include "bezsimplex/operator.hpp"
#include "support/oracles.hpp"

using namespace bezsimplex;

namespace {

std::vector<double> random_direction(std::mt19937_64& rng, std::size_t d, double max_norm) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> r(0.0, max_norm);
    std::vector<double> a(d);
    double norm = 0.0;
    for (auto& ai : a) {
        ai = g(rng);
        norm += ai * ai;
    }
    const double scale = r(rng) / std::sqrt(norm);
    for (auto& ai : a) {
        ai *= scale;
    }
    return a;
}

}  // namespace

TEST_SUITE("expmodel") {

TEST_CASE("exp polynomial evaluation") {
    const auto one = ExpPolynomial::single(1.0, {0.0, 0.0});
    CHECK(one(Point{0.3, -2.0}) == 1.0);
    const ExpPolynomial cancel({{1.0, {0.4, 0.2}}, {-1.0, {0.4, 0.2}}});
    CHECK(cancel(Point{0.7, 0.1}) == 0.0);
    CHECK(exp_poly_eval(ExpPolynomial::single(1.0, {1.0, 0.0}), Point{0.5, 0.3}) ==
          doctest::Approx(1.6487212707001282).epsilon(1e-15));
    CHECK_THROWS_AS((void)exp_poly_eval(ExpPolynomial::single(1.0, {800.0}), Point{1.0}), Overflow);
    CHECK_THROWS_AS((void)exp_poly_eval(ExpPolynomial::single(1.0, {1.0, 1.0}), Point{1.0}), DimensionMismatch);
    CHECK_THROWS_AS(ExpPolynomial({}), Error);
    CHECK_THROWS_AS(ExpPolynomial({{1.0, {1.0}}, {1.0, {1.0, 2.0}}}), DimensionMismatch);
}

TEST_CASE("closed form examples") {
    const Simplex unit({{0.0}, {1.0}});
    const std::vector<double> a{1.0};
    CHECK(bezier_exp_closed_form(unit, 1, a, Point{0.5}) == doctest::Approx(1.85914091422952262).epsilon(1e-15));

    std::mt19937_64 rng(3);
    const Simplex s(oracle::random_simplex(rng, 3, 2.0));
    const auto dir = random_direction(rng, 3, 2.0);
    for (int n : {1, 7, 40, 300}) {
        for (std::size_t j = 0; j <= 3; ++j) {
            const Point v(std::vector<double>(s.vertex(j).begin(), s.vertex(j).end()));
            const double exact = std::exp(dot(dir, v.coords()));
            CHECK(std::abs(bezier_exp_closed_form(s, n, dir, v) - exact) <= 1e-12 * exact);
        }
        CHECK(bezier_exp_closed_form(s, n, std::vector<double>(3, 0.0), s.centroid()) ==
              doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK_THROWS_AS((void)bezier_exp_closed_form(unit, 2, a, Point{1.5}), NegativeWeight);
    CHECK_THROWS_AS((void)bezier_exp_closed_form(unit, 0, a, Point{0.5}), Error);
}

TEST_CASE("property: closed form equals the operator on exp-sampled nets") {
    std::mt19937_64 rng(101);
    for (std::size_t d = 1; d <= 3; ++d) {
        const Simplex s(oracle::random_simplex(rng, d));
        for (int n = 1; n <= 12; n += (d == 3 ? 3 : 1)) {
            const auto a = random_direction(rng, d, 2.0);
            const auto net = sample_control_net(s, n, [&](const Point& x) { return std::exp(dot(a, x.coords())); });
            for (int trial = 0; trial < 5; ++trial) {
                const auto x = s.point_from_barycentric(oracle::random_weights(rng, d + 1));
                const double closed = bezier_exp_closed_form(s, n, a, x);
                CHECK(std::abs(apply_direct(net, x) - closed) <= 1e-10 * closed);
            }
        }
    }
}

TEST_CASE("residual examples") {
    const Simplex unit({{0.0}, {1.0}});
    const std::vector<double> a{1.0};
    CHECK(residual_rn(unit, 10, std::vector<double>{0.0}, Point{0.4}) == 0.0);
    // e^0.1 - 1 - 0.1
    CHECK(residual_rn(unit, 10, a, Point{1.0}) == doctest::Approx(0.0051709180756476248).epsilon(1e-14));

    // n^2 |r_n| stays below K_{1,n} and settles as n grows
    const auto tri = Simplex::standard(2);
    const std::vector<double> dir{1.0, 1.0};
    const auto grid = lattice_grid(tri, 20);
    double previous = -1.0;
    for (int n : {10, 100, 1000}) {
        const double k1 = error_budget(tri, dir, n).k1;
        double worst = 0.0;
        for (const auto& x : grid) {
            worst = std::max(worst, n * static_cast<double>(n) * std::abs(residual_rn(tri, n, dir, x)));
        }
        CHECK(worst <= k1 + 0.01);
        if (previous >= 0.0) {
            CHECK(std::abs(worst - previous) < 0.2);
        }
        previous = worst;
    }
}

TEST_CASE("residual matches the literal definition where it is well conditioned") {
    std::mt19937_64 rng(12);
    const Simplex s(oracle::random_simplex(rng, 2));
    const auto a = random_direction(rng, 2, 2.0);
    const int n = 3;
    for (int trial = 0; trial < 20; ++trial) {
        const auto t = oracle::random_weights(rng, 3);
        const auto x = s.point_from_barycentric(t);
        double literal = -1.0 - dot(a, x.coords()) / n;
        for (std::size_t j = 0; j < 3; ++j) {
            literal += t[j] * std::exp(dot(a, s.vertex(j)) / n);
        }
        CHECK(residual_rn(s, n, a, x) == doctest::Approx(literal).epsilon(1e-9).scale(1e-3));
    }
}

TEST_CASE("error budget") {
    const Simplex unit({{0.0}, {1.0}});
    const auto zero = error_budget(unit, std::vector<double>{0.0}, 5);
    CHECK(zero.k1 == 0.0);
    CHECK(zero.c == 0.0);
    CHECK(zero.k == 0.0);

    const auto b = error_budget(unit, std::vector<double>{1.0}, 10);
    CHECK(b.c == doctest::Approx(std::exp(1.0) / 2.0).epsilon(1e-15));
    CHECK(b.k == doctest::Approx(1.85914091422952262).epsilon(1e-15));
    CHECK(b.k1 == doctest::Approx(0.5 * std::exp(0.1)).epsilon(1e-15));
    CHECK(b.predicted_relative_bound == doctest::Approx(b.k / 10));

    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const Simplex s(oracle::random_simplex(rng, 2));
        const auto a = random_direction(rng, 2, 3.0);
        for (int n : {1, 2, 10, 100}) {
            const auto eb = error_budget(s, a, n);
            CHECK(eb.c >= eb.k1);
        }
    }

    // doubling the simplex about the origin scales every a.x_j, so K grows
    const Simplex tri({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
    const Simplex tri2({{0.0, 0.0}, {2.0, 0.0}, {0.0, 2.0}});
    const std::vector<double> dir{0.7, 1.1};
    CHECK(error_budget(tri2, dir, 40).k > error_budget(tri, dir, 40).k);
}

TEST_CASE("relative error report") {
    const Simplex unit({{0.0}, {1.0}});
    const auto grid1 = lattice_grid(unit, 50);
    const auto r0 = relative_error_report(unit, std::vector<double>{0.0}, 20, grid1);
    CHECK(r0.observed == 0.0);
    CHECK(r0.ratio == 0.0);

    const std::vector<double> a{1.0};
    const double e20 = relative_error_report(unit, a, 20, grid1).observed;
    const double e40 = relative_error_report(unit, a, 40, grid1).observed;
    const double e80 = relative_error_report(unit, a, 80, grid1).observed;
    CHECK(e20 / e40 >= 1.6);
    CHECK(e20 / e40 <= 2.4);
    CHECK(e40 / e80 >= 1.6);
    CHECK(e40 / e80 <= 2.4);

    const auto tri = Simplex::standard(2);
    const auto grid2 = lattice_grid(tri, 50);
    for (int n : {40, 80, 160}) {
        const auto r = relative_error_report(tri, std::vector<double>{1.0, 1.0}, n, grid2);
        CHECK(r.observed <= r.predicted);
        CHECK(r.ratio < 1.0);
    }
    CHECK_THROWS_AS((void)relative_error_report(tri, std::vector<double>{1.0, 1.0}, 4, std::vector<Point>{}),
                    EmptyGrid);
}

TEST_CASE("property: first-order decay of the relative error") {
    const auto tri = Simplex::standard(2);
    const auto grid = lattice_grid(tri, 30);
    const std::vector<double> a{0.6, -1.4};
    std::vector<double> xs;
    std::vector<double> ys;
    for (int n : {10, 20, 40, 80, 160}) {
        xs.push_back(std::log(n));
        ys.push_back(std::log(relative_error_report(tri, a, n, grid).observed));
    }
    const double mx = (xs[0] + xs[1] + xs[2] + xs[3] + xs[4]) / 5;
    const double my = (ys[0] + ys[1] + ys[2] + ys[3] + ys[4]) / 5;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = sxy / sxx;
    CHECK(slope >= -1.2);
    CHECK(slope <= -0.8);
}

TEST_CASE("Bezier image of exponential polynomials") {
    const auto tri = Simplex::standard(2);
    const auto constant = ExpPolynomial::single(2.5, {0.0, 0.0});
    CHECK(bezier_of_exp_polynomial(tri, 7, constant, Point{0.1, 0.6}) == doctest::Approx(2.5).epsilon(1e-15));
    const ExpPolynomial cancel({{1.0, {0.4, 1.2}}, {-1.0, {0.4, 1.2}}});
    CHECK(bezier_of_exp_polynomial(tri, 7, cancel, Point{0.1, 0.6}) == 0.0);

    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<ExpTerm> terms;
        for (int i = 0; i < 3; ++i) {
            terms.push_back({coef(rng), random_direction(rng, 2, 2.0)});
        }
        const ExpPolynomial p(terms);
        const auto net = sample_control_net(tri, 6, p);
        for (int k = 0; k < 10; ++k) {
            const auto x = tri.point_from_barycentric(oracle::random_weights(rng, 3));
            const double closed = bezier_of_exp_polynomial(tri, 6, p, x);
            CHECK(std::abs(apply_direct(net, x) - closed) <= 1e-10 * std::max(1.0, std::abs(closed)));
        }

        // linear in the coefficients
        auto doubled = terms;
        for (auto& t : doubled) {
            t.coefficient *= -3.0;
        }
        const auto x = tri.centroid();
        CHECK(bezier_of_exp_polynomial(tri, 6, ExpPolynomial(doubled), x) ==
              doctest::Approx(-3.0 * bezier_of_exp_polynomial(tri, 6, p, x)).epsilon(1e-14));
    }
}

TEST_CASE("exp polynomial JSON") {
    const auto j = nlohmann::json::parse(R"({"terms": [{"c": 1.5, "a": [1, 0]}, {"c": -2, "a": [0.5, 0.25]}]})");
    const auto p = exp_polynomial_from_json(j);
    REQUIRE(p.terms().size() == 2);
    CHECK(p.terms()[1].coefficient == -2.0);
    CHECK(exp_polynomial_from_json(exp_polynomial_to_json(p)).terms()[1].direction == p.terms()[1].direction);
    CHECK_THROWS_AS((void)exp_polynomial_from_json(nlohmann::json::parse(R"({"terms": []})")), Error);
    CHECK_THROWS_AS((void)exp_polynomial_from_json(nlohmann::json::parse(R"({"terms": [{"c": 1}]})")), Error);
}

}
