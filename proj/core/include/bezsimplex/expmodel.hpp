#pragma once

#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bezsimplex/geometry.hpp"

namespace bezsimplex {

/// exp() arguments above this raise bezsimplex::Overflow.
inline constexpr double kMaxExponent = 700.0;

/// c * exp(a . x)
struct ExpTerm {
    double coefficient = 1.0;
    std::vector<double> direction;
};

/// Finite linear combination sum_i c_i exp(a_i . x); never empty.
class ExpPolynomial {
public:
    explicit ExpPolynomial(std::vector<ExpTerm> terms);

    [[nodiscard]] static ExpPolynomial single(double coefficient, std::vector<double> direction);

    [[nodiscard]] const std::vector<ExpTerm>& terms() const noexcept { return terms_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return terms_.front().direction.size(); }

    [[nodiscard]] double operator()(const Point& x) const;

private:
    std::vector<ExpTerm> terms_;
};

[[nodiscard]] double exp_poly_eval(const ExpPolynomial& p, const Point& x);

/// Bezier image of exp(a . x) in closed form: [sum_j s_j(x) exp(a . x_j / n)]^n.
[[nodiscard]] double bezier_exp_closed_form(const Simplex& s, int n, std::span<const double> a, const Point& x);

/// r_n(x) = sum_j s_j(x) exp(a . x_j / n) - 1 - a . x / n.
///
/// Evaluated as sum_j s_j (expm1(u_j) - u_j), u_j = a . x_j / n, which is the
/// same quantity once the weights sum to one and reproduce x; it avoids the
/// cancellation of the literal form at large n.
[[nodiscard]] double residual_rn(const Simplex& s, int n, std::span<const double> a, const Point& x);

/// Constants of the first-order relative error estimate for exp(a . x).
struct ErrorBudget {
    int n = 0;
    double k1 = 0.0;  ///< 1/2 sum_j (a.x_j)^2 exp(a.x_j / n)
    double c = 0.0;   ///< n-independent majorant: 1/2 sum_j (a.x_j)^2 exp(max(0, a.x_j))
    double k = 0.0;   ///< c + 1/2 max_j a.x_j
    double predicted_relative_bound = 0.0;  ///< k / n
};

[[nodiscard]] ErrorBudget error_budget(const Simplex& s, std::span<const double> a, int n);

struct RelativeErrorReport {
    int n = 0;
    double observed = 0.0;   ///< max over grid of |e_{a,n}(x) - exp(a.x)| / exp(a.x)
    double predicted = 0.0;  ///< K / n
    double ratio = 0.0;      ///< observed / predicted; 0 when observed is 0
};

/// Throws EmptyGrid.
[[nodiscard]] RelativeErrorReport relative_error_report(const Simplex& s, std::span<const double> a, int n,
                                                        std::span<const Point> grid);

/// sum_i c_i * bezier_exp_closed_form(s, n, a_i, x)
[[nodiscard]] double bezier_of_exp_polynomial(const Simplex& s, int n, const ExpPolynomial& p, const Point& x);

/// {"terms": [{"c": real, "a": [real, ...]}, ...]}
[[nodiscard]] ExpPolynomial exp_polynomial_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json exp_polynomial_to_json(const ExpPolynomial& p);

}  // namespace bezsimplex
