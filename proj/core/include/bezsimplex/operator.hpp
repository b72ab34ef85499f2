#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "bezsimplex/geometry.hpp"
#include "bezsimplex/lattice.hpp"

namespace bezsimplex {

/// Real-valued function on the closed simplex.
using ScalarField = std::function<double(const Point&)>;

enum class Evaluator { DeCasteljau, Direct };

[[nodiscard]] std::string_view to_string(Evaluator e) noexcept;
[[nodiscard]] Evaluator evaluator_from_string(std::string_view name);

/// Samples c_k = f(R(k/n)) of a function at the order-n control points,
/// stored in lattice enumeration order.
class ControlNet {
public:
    ControlNet(Simplex simplex, int n, std::vector<double> coefficients);

    [[nodiscard]] const Simplex& simplex() const noexcept { return simplex_; }
    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] std::size_t size() const noexcept { return coefficients_.size(); }
    [[nodiscard]] std::span<const double> coefficients() const noexcept { return coefficients_; }
    [[nodiscard]] double coefficient(const MultiIndex& k) const;
    [[nodiscard]] const Lattice& lattice() const noexcept { return *lattice_; }

    /// max_k |c_k|
    [[nodiscard]] double max_abs() const noexcept;

private:
    Simplex simplex_;
    int order_;
    std::vector<double> coefficients_;
    std::shared_ptr<const Lattice> lattice_;
};

/// B_k^n(x) = multinomial(k) * prod s_j(x)^k_j, evaluated in log space with 0^0 = 1.
/// Throws NegativeWeight when x lies outside the simplex by more than kCoordinateTolerance.
[[nodiscard]] double basis_value(const Simplex& s, const MultiIndex& k, const Point& x);
[[nodiscard]] double basis_value(const MultiIndex& k, const BarycentricPoint& t);

/// Every B_k^n(x) for k in M_n, in enumeration order.
[[nodiscard]] std::vector<double> basis_values(const Simplex& s, int n, const Point& x);

/// Throws SampleError (with the original exception nested) if f throws or
/// returns a non-finite value.
[[nodiscard]] ControlNet sample_control_net(const Simplex& s, int n, const ScalarField& f);

/// Reference evaluator: sum_k c_k B_k^n(x).
[[nodiscard]] double apply_direct(const ControlNet& net, const Point& x);
[[nodiscard]] double apply_direct(const ControlNet& net, const BarycentricPoint& t);

/// n rounds of convex-combination reduction of the net by the weights t.
[[nodiscard]] double apply_de_casteljau(const ControlNet& net, const BarycentricPoint& t);
[[nodiscard]] double apply_de_casteljau(const ControlNet& net, const Point& x);

[[nodiscard]] double evaluate(const ControlNet& net, const Point& x, Evaluator evaluator);

/// Barycentric lattice R(M_m / m): every point with weights j/m.
[[nodiscard]] std::vector<Point> lattice_grid(const Simplex& s, int m);

/// 50 for D <= 2, 15 for D = 3, 8 for D >= 4.
[[nodiscard]] int default_grid_resolution(std::size_t dimension) noexcept;

/// max over grid of |op(x) - f(x)|. Throws EmptyGrid.
[[nodiscard]] double operator_sup_error(const ControlNet& net, const ScalarField& f, std::span<const Point> grid,
                                        Evaluator evaluator = Evaluator::DeCasteljau);

/// CSV: k_0..k_D,c
void write_control_net_csv(std::ostream& os, const ControlNet& net);
[[nodiscard]] ControlNet read_control_net_csv(std::istream& is, const Simplex& s);

}  // namespace bezsimplex
