#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "bezsimplex/errors.hpp"
#include "bezsimplex/operator.hpp"
#include "support/oracles.hpp"

using namespace bezsimplex;

namespace {

std::vector<double> random_net(std::mt19937_64& rng, std::size_t size) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> c(size);
    for (auto& v : c) {
        v = u(rng);
    }
    return c;
}

double wavy(const std::vector<double>& x) {
    double s = 0.3;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += std::sin(1.7 * x[i] + 0.4 * static_cast<double>(i)) + x[i] * x[i];
    }
    return s;
}

}  // namespace

TEST_SUITE("operator") {

TEST_CASE("basis value examples") {
    const Simplex unit({{0.0}, {1.0}});
    CHECK(basis_value(unit, MultiIndex{1, 1}, Point{0.5}) == doctest::Approx(0.5).epsilon(1e-15));

    const auto tri = Simplex::standard(2);
    // 3!/(1!1!1!) * (1/3)^3 = 2/9 by the exact multinomial
    CHECK(static_cast<double>(multinomial_exact(MultiIndex{1, 1, 1})) / 27.0 == doctest::Approx(2.0 / 9.0));
    CHECK(basis_value(tri, MultiIndex{1, 1, 1}, tri.centroid()) == doctest::Approx(2.0 / 9.0).epsilon(1e-14));

    const int n = 4;
    for (std::size_t j = 0; j < 3; ++j) {
        const Point vertex(std::vector<double>(tri.vertex(j).begin(), tri.vertex(j).end()));
        for (const auto& k : enumerate_multi_indices(n, 2)) {
            CHECK(basis_value(tri, k, vertex) == (k[j] == n ? 1.0 : 0.0));
        }
    }
    CHECK_THROWS_AS((void)basis_value(tri, MultiIndex{1, 1, 1}, Point{1.0, 1.0}), NegativeWeight);
    CHECK_THROWS_AS((void)basis_value(tri, MultiIndex{1, 1}, Point{0.2, 0.2}), DimensionMismatch);
}

TEST_CASE("property: partition of unity and positivity") {
    std::mt19937_64 rng(99);
    for (std::size_t d = 1; d <= 4; ++d) {
        const Simplex s(oracle::random_simplex(rng, d));
        for (int n : {1, 3, 8, 20}) {
            for (int trial = 0; trial < 10; ++trial) {
                const auto x = s.point_from_barycentric(oracle::random_weights(rng, d + 1));
                const auto values = basis_values(s, n, x);
                double sum = 0.0;
                for (double v : values) {
                    CHECK(v >= 0.0);
                    CHECK(v <= 1.0);
                    sum += v;
                }
                CHECK(std::abs(sum - 1.0) <= 1e-12);
            }
        }
    }
}

TEST_CASE("sample_control_net") {
    const Simplex unit({{0.0}, {1.0}});
    const auto ones = sample_control_net(Simplex::standard(3), 4, [](const Point&) { return 1.0; });
    for (double c : ones.coefficients()) {
        CHECK(c == 1.0);
    }
    const auto lin = sample_control_net(unit, 2, [](const Point& x) { return x[0]; });
    CHECK(std::vector<double>(lin.coefficients().begin(), lin.coefficients().end()) ==
          std::vector<double>{0.0, 0.5, 1.0});

    // exp(a.x) at R(k/n) equals prod_j exp(a.x_j)^(k_j/n)
    const Simplex tri({{0.1, 0.0}, {1.2, 0.3}, {0.4, 0.9}});
    const std::vector<double> a{0.8, -1.3};
    const int n = 5;
    const auto net = sample_control_net(tri, n, [&](const Point& x) { return std::exp(dot(a, x.coords())); });
    for (const auto& k : enumerate_multi_indices(n, 2)) {
        double expected = 1.0;
        for (std::size_t j = 0; j < 3; ++j) {
            expected *= std::pow(std::exp(dot(a, tri.vertex(j))), static_cast<double>(k[j]) / n);
        }
        CHECK(net.coefficient(k) == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("sample_control_net reports the failing control point") {
    const Simplex unit({{0.0}, {1.0}});
    auto bad = [](const Point& x) -> double {
        if (x[0] > 0.6) {
            throw std::domain_error("outside domain");
        }
        return x[0];
    };
    try {
        (void)sample_control_net(unit, 4, bad);
        FAIL("expected SampleError");
    } catch (const SampleError& e) {
        const std::string what = e.what();
        CHECK(what.find("k=(1,3)") != std::string::npos);
        CHECK(what.find("outside domain") != std::string::npos);
        CHECK_THROWS_AS(std::rethrow_if_nested(e), std::domain_error);
    }
    CHECK_THROWS_AS((void)sample_control_net(unit, 2, [](const Point&) { return NAN; }), SampleError);
}

TEST_CASE("apply_direct examples") {
    const Simplex unit({{0.0}, {1.0}});
    const auto net = sample_control_net(unit, 1, [](const Point& x) { return std::exp(x[0]); });
    // two-term sum: 0.5 * e^0 + 0.5 * e^1
    CHECK(apply_direct(net, Point{0.5}) == doctest::Approx(1.85914091422952262).epsilon(1e-15));
    CHECK(apply_de_casteljau(net, Point{0.5}) == doctest::Approx(1.85914091422952262).epsilon(1e-15));

    const auto tri = Simplex::standard(2);
    const auto ones = ControlNet(tri, 6, std::vector<double>(lattice_size(6, 2), 1.0));
    CHECK(std::abs(apply_direct(ones, Point{0.2, 0.3}) - 1.0) <= 1e-12);
    CHECK_THROWS_AS((void)apply_direct(ones, Point{0.9, 0.9}), NegativeWeight);
}

TEST_CASE("property: direct sum agrees with the brute-force Bernstein oracle") {
    std::mt19937_64 rng(5);
    for (std::size_t d = 1; d <= 3; ++d) {
        const auto vertices = oracle::random_simplex(rng, d, 1.5);
        const Simplex s(vertices);
        for (int n : {1, 2, 5, 9}) {
            const auto net = sample_control_net(s, n, [](const Point& x) {
                return wavy(std::vector<double>(x.coords().begin(), x.coords().end()));
            });
            for (int trial = 0; trial < 5; ++trial) {
                const auto t = oracle::random_weights(rng, d + 1);
                const double expected = oracle::bernstein_sum(vertices, n, wavy, t);
                const auto x = s.point_from_barycentric(t);
                CHECK(apply_direct(net, x) == doctest::Approx(expected).epsilon(1e-11));
                CHECK(apply_de_casteljau(net, BarycentricPoint(t)) == doctest::Approx(expected).epsilon(1e-11));
            }
        }
    }
}

TEST_CASE("property: linear precision") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (std::size_t d = 1; d <= 3; ++d) {
        const Simplex s(oracle::random_simplex(rng, d));
        for (int n = 1; n <= 5; ++n) {
            std::vector<double> v(d);
            for (auto& vi : v) {
                vi = u(rng);
            }
            const double b = u(rng);
            auto affine = [&](const Point& x) { return dot(v, x.coords()) + b; };
            const auto net = sample_control_net(s, n, affine);
            for (int trial = 0; trial < 10; ++trial) {
                const auto x = s.point_from_barycentric(oracle::random_weights(rng, d + 1));
                CHECK(std::abs(apply_direct(net, x) - affine(x)) <= 1e-10);
                CHECK(std::abs(apply_de_casteljau(net, x) - affine(x)) <= 1e-10);
            }
        }
    }
}

TEST_CASE("de Casteljau examples") {
    const Simplex unit({{0.0}, {1.0}});
    const ControlNet net(unit, 1, {2.0, -3.0});
    const BarycentricPoint t{0.25, 0.75};
    CHECK(apply_de_casteljau(net, t) == doctest::Approx(0.25 * 2.0 + 0.75 * -3.0));

    const auto tri = Simplex::standard(2);
    const ControlNet constant(tri, 7, std::vector<double>(lattice_size(7, 2), 3.25));
    CHECK(apply_de_casteljau(constant, BarycentricPoint{0.2, 0.3, 0.5}) == 3.25);
    CHECK(apply_de_casteljau(constant, BarycentricPoint{1.0 / 3, 1.0 / 3, 1.0 / 3}) == doctest::Approx(3.25));
    CHECK_THROWS_AS((void)apply_de_casteljau(constant, BarycentricPoint{0.5, 0.5}), DimensionMismatch);
}

TEST_CASE("property: evaluator equivalence on random nets") {
    std::mt19937_64 rng(31);
    for (std::size_t d = 1; d <= 3; ++d) {
        const Simplex s(oracle::random_simplex(rng, d));
        for (int n : {1, 2, 4, 8, 15}) {
            const ControlNet net(s, n, random_net(rng, lattice_size(n, d)));
            for (int trial = 0; trial < 20; ++trial) {
                const BarycentricPoint t(oracle::random_weights(rng, d + 1));
                const double direct = apply_direct(net, t);
                const double dc = apply_de_casteljau(net, t);
                CHECK(std::abs(direct - dc) <= 1e-10 * std::max(std::abs(direct), net.max_abs()));
            }
        }
    }
    // 50 interior points of a degree-8 triangular net
    const auto tri = Simplex::standard(2);
    const ControlNet net(tri, 8, random_net(rng, lattice_size(8, 2)));
    for (int trial = 0; trial < 50; ++trial) {
        const BarycentricPoint t(oracle::random_weights(rng, 3));
        CHECK(apply_de_casteljau(net, t) ==
              doctest::Approx(apply_direct(net, t)).epsilon(1e-10).scale(net.max_abs()));
    }
}

TEST_CASE("vertex interpolation, contraction and monotonicity") {
    std::mt19937_64 rng(4);
    const Simplex s(oracle::random_simplex(rng, 2));
    const int n = 9;
    const auto size = lattice_size(n, 2);
    const auto grid = lattice_grid(s, 12);
    for (int trial = 0; trial < 10; ++trial) {
        auto c = random_net(rng, size);
        auto c_low = c;
        for (auto& v : c_low) {
            v -= std::uniform_real_distribution<double>(0.0, 0.5)(rng);
        }
        const ControlNet net(s, n, c);
        const ControlNet low(s, n, c_low);

        for (std::size_t j = 0; j < 3; ++j) {
            std::vector<int> k(3, 0);
            k[j] = n;
            const Point vertex(std::vector<double>(s.vertex(j).begin(), s.vertex(j).end()));
            CHECK(std::abs(apply_de_casteljau(net, vertex) - net.coefficient(MultiIndex(k))) <= 1e-12);
            CHECK(std::abs(apply_direct(net, vertex) - net.coefficient(MultiIndex(k))) <= 1e-12);
        }
        for (const auto& x : grid) {
            CHECK(std::abs(apply_de_casteljau(net, x)) <= net.max_abs() + 1e-12);
            CHECK(apply_de_casteljau(low, x) <= apply_de_casteljau(net, x) + 1e-12);
        }
    }
}

TEST_CASE("grid and sup error") {
    CHECK(default_grid_resolution(1) == 50);
    CHECK(default_grid_resolution(2) == 50);
    CHECK(default_grid_resolution(3) == 15);
    CHECK(default_grid_resolution(4) == 8);

    const auto tri = Simplex::standard(2);
    const auto grid = lattice_grid(tri, 10);
    CHECK(grid.size() == 66);
    auto one = [](const Point&) { return 1.0; };
    const auto net = sample_control_net(tri, 5, one);
    CHECK(operator_sup_error(net, one, grid) <= 1e-12);
    CHECK(operator_sup_error(net, one, grid, Evaluator::Direct) <= 1e-12);
    CHECK_THROWS_AS((void)operator_sup_error(net, one, std::vector<Point>{}), EmptyGrid);

    auto affine = [](const Point& x) { return 3.0 * x[0] - 2.0 * x[1] + 0.5; };
    CHECK(operator_sup_error(sample_control_net(tri, 6, affine), affine, grid) <= 1e-10);
}

TEST_CASE("evaluator names") {
    CHECK(evaluator_from_string("direct") == Evaluator::Direct);
    CHECK(evaluator_from_string("decasteljau") == Evaluator::DeCasteljau);
    CHECK(to_string(Evaluator::Direct) == "direct");
    CHECK_THROWS_AS((void)evaluator_from_string("horner"), ConfigError);
}

TEST_CASE("control net CSV round trip") {
    std::mt19937_64 rng(8);
    const Simplex s(oracle::random_simplex(rng, 3));
    const ControlNet net(s, 4, random_net(rng, lattice_size(4, 3)));
    std::stringstream ss;
    write_control_net_csv(ss, net);
    const auto back = read_control_net_csv(ss, s);
    CHECK(back.order() == 4);
    CHECK(std::equal(back.coefficients().begin(), back.coefficients().end(), net.coefficients().begin()));

    std::stringstream bad("k_0,k_1,c\n1,0,1\n0,2,1\n");
    CHECK_THROWS((void)read_control_net_csv(bad, Simplex({{0.0}, {1.0}})));
}

}
