#include "bezsimplex/expmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "bezsimplex/csv.hpp"
#include "bezsimplex/errors.hpp"
#include "bezsimplex/parallel.hpp"

namespace bezsimplex {

namespace {

double guarded_exp(double u) {
    if (u > kMaxExponent) {
        throw Overflow("exponent " + format_double(u) + " exceeds " + format_double(kMaxExponent));
    }
    return std::exp(u);
}

void check_order(int n) {
    if (n < 1) {
        throw Error("order n must be >= 1, got " + std::to_string(n));
    }
}

void check_direction(const Simplex& s, std::span<const double> a) {
    if (a.size() != s.dimension()) {
        throw DimensionMismatch("direction of length " + std::to_string(a.size()) + " on a " +
                                std::to_string(s.dimension()) + "-simplex");
    }
}

// a . x_j for every vertex.
std::vector<double> vertex_exponents(const Simplex& s, std::span<const double> a) {
    check_direction(s, a);
    std::vector<double> u(s.vertex_count());
    for (std::size_t j = 0; j < u.size(); ++j) {
        u[j] = dot(a, s.vertex(j));
    }
    return u;
}

BarycentricPoint admitted(const Simplex& s, const Point& x) {
    auto t = s.barycentric(x);
    if (!t.is_inside(kCoordinateTolerance)) {
        throw NegativeWeight("barycentric weight " + format_double(t.min_weight()) +
                             " below tolerance: point lies outside the simplex");
    }
    return t;
}

}  // namespace

ExpPolynomial::ExpPolynomial(std::vector<ExpTerm> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) {
        throw Error("an exponential polynomial needs at least one term");
    }
    const auto dimension = terms_.front().direction.size();
    for (const auto& term : terms_) {
        if (term.direction.size() != dimension || dimension == 0) {
            throw DimensionMismatch("exponential polynomial directions must share a positive length");
        }
        if (!std::isfinite(term.coefficient) ||
            !std::all_of(term.direction.begin(), term.direction.end(), [](double v) { return std::isfinite(v); })) {
            throw Error("exponential polynomial terms must be finite");
        }
    }
}

ExpPolynomial ExpPolynomial::single(double coefficient, std::vector<double> direction) {
    return ExpPolynomial({ExpTerm{coefficient, std::move(direction)}});
}

double ExpPolynomial::operator()(const Point& x) const { return exp_poly_eval(*this, x); }

double exp_poly_eval(const ExpPolynomial& p, const Point& x) {
    double sum = 0.0;
    for (const auto& term : p.terms()) {
        sum += term.coefficient * guarded_exp(dot(term.direction, x.coords()));
    }
    return sum;
}

double bezier_exp_closed_form(const Simplex& s, int n, std::span<const double> a, const Point& x) {
    check_order(n);
    const auto u = vertex_exponents(s, a);
    if (*std::max_element(u.begin(), u.end()) > kMaxExponent) {
        throw Overflow("exponent a.x_j exceeds " + format_double(kMaxExponent));
    }
    const auto t = admitted(s, x);
    // Dividing by the weight sum keeps e_{0,n} == 1 exactly despite rounding in t.
    double base = 0.0;
    double weight = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double tj = std::max(t[j], 0.0);
        base += tj * std::exp(u[j] / n);
        weight += tj;
    }
    return std::pow(base / weight, n);
}

double residual_rn(const Simplex& s, int n, std::span<const double> a, const Point& x) {
    check_order(n);
    const auto u = vertex_exponents(s, a);
    const auto t = admitted(s, x);
    double r = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double v = u[j] / n;
        r += std::max(t[j], 0.0) * (std::expm1(v) - v);
    }
    return r;
}

ErrorBudget error_budget(const Simplex& s, std::span<const double> a, int n) {
    check_order(n);
    const auto u = vertex_exponents(s, a);
    ErrorBudget b;
    b.n = n;
    double max_u = -std::numeric_limits<double>::infinity();
    for (double uj : u) {
        b.k1 += 0.5 * uj * uj * guarded_exp(uj / n);
        b.c += 0.5 * uj * uj * guarded_exp(std::max(0.0, uj));
        max_u = std::max(max_u, uj);
    }
    b.k = b.c + 0.5 * max_u;
    b.predicted_relative_bound = b.k / n;
    return b;
}

RelativeErrorReport relative_error_report(const Simplex& s, std::span<const double> a, int n,
                                          std::span<const Point> grid) {
    if (grid.empty()) {
        throw EmptyGrid("relative error report needs at least one grid point");
    }
    std::vector<double> err(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const double exact = guarded_exp(dot(a, grid[i].coords()));
        err[i] = std::abs(bezier_exp_closed_form(s, n, a, grid[i]) - exact) / exact;
    });

    RelativeErrorReport r;
    r.n = n;
    r.observed = *std::max_element(err.begin(), err.end());
    r.predicted = error_budget(s, a, n).predicted_relative_bound;
    r.ratio = r.observed == 0.0 ? 0.0 : r.observed / r.predicted;
    return r;
}

double bezier_of_exp_polynomial(const Simplex& s, int n, const ExpPolynomial& p, const Point& x) {
    double sum = 0.0;
    for (const auto& term : p.terms()) {
        sum += term.coefficient * bezier_exp_closed_form(s, n, term.direction, x);
    }
    return sum;
}

ExpPolynomial exp_polynomial_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("terms") || !j.at("terms").is_array()) {
        throw Error("exponential polynomial JSON must be an object with a \"terms\" array");
    }
    std::vector<ExpTerm> terms;
    std::size_t index = 0;
    for (const auto& jt : j.at("terms")) {
        const std::string where = "terms[" + std::to_string(index++) + "]";
        if (!jt.is_object() || !jt.contains("c") || !jt.contains("a")) {
            throw Error(where + ": expected an object with \"c\" and \"a\"");
        }
        if (!jt.at("c").is_number() || !jt.at("a").is_array()) {
            throw Error(where + ": \"c\" must be a number and \"a\" an array of numbers");
        }
        ExpTerm term;
        term.coefficient = jt.at("c").get<double>();
        for (const auto& v : jt.at("a")) {
            if (!v.is_number()) {
                throw Error(where + ": \"a\" must contain only numbers");
            }
            term.direction.push_back(v.get<double>());
        }
        terms.push_back(std::move(term));
    }
    return ExpPolynomial(std::move(terms));
}

nlohmann::json exp_polynomial_to_json(const ExpPolynomial& p) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : p.terms()) {
        terms.push_back({{"c", t.coefficient}, {"a", t.direction}});
    }
    return {{"terms", terms}};
}

}  // namespace bezsimplex
