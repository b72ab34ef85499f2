#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace bezsimplex {

/// Absolute slack on non-negativity when admitting barycentric weights.
inline constexpr double kCoordinateTolerance = 1e-9;

/// Tolerance on |sum(t) - 1| for an admitted barycentric point.
inline constexpr double kWeightSumTolerance = 1e-12;

/// |det| <= kDegeneracyTolerance * diameter^D flags a degenerate simplex.
inline constexpr double kDegeneracyTolerance = 1e-12;

/// A point of R^D with finite coordinates.
class Point {
public:
    Point() = default;
    explicit Point(std::vector<double> coords);
    Point(std::initializer_list<double> coords);

    [[nodiscard]] std::size_t dimension() const noexcept { return coords_.size(); }
    [[nodiscard]] std::span<const double> coords() const noexcept { return coords_; }
    [[nodiscard]] double operator[](std::size_t i) const { return coords_[i]; }

    friend bool operator==(const Point&, const Point&) = default;

private:
    std::vector<double> coords_;
};

[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b);

/// D+1 weights t_0..t_D summing to one.
///
/// The public constructor admits only points of the closed simplex (every
/// weight >= -kCoordinateTolerance). Simplex::barycentric returns signed
/// weights for exterior points through `signed_weights`, which only checks the
/// sum.
class BarycentricPoint {
public:
    explicit BarycentricPoint(std::vector<double> weights);
    BarycentricPoint(std::initializer_list<double> weights);

    [[nodiscard]] static BarycentricPoint signed_weights(std::vector<double> weights);

    [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
    [[nodiscard]] double operator[](std::size_t i) const { return weights_[i]; }

    [[nodiscard]] double min_weight() const noexcept;
    [[nodiscard]] bool is_inside(double tol = kCoordinateTolerance) const noexcept;

private:
    struct Unchecked {};
    BarycentricPoint(Unchecked, std::vector<double> weights) : weights_(std::move(weights)) {}

    std::vector<double> weights_;
};

/// Non-degenerate D-simplex with an ordered, immutable vertex list x_0..x_D.
///
/// The (D+1)x(D+1) system [1 ... 1; x_0 ... x_D] t = (1, x) is factorized once
/// at construction and reused by every barycentric query.
class Simplex {
public:
    explicit Simplex(std::vector<std::vector<double>> vertices);

    /// Unit interval / standard D-simplex {0, e_1, ..., e_D}.
    [[nodiscard]] static Simplex standard(std::size_t dimension);

    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
    [[nodiscard]] std::size_t vertex_count() const noexcept { return dimension_ + 1; }
    [[nodiscard]] std::span<const double> vertex(std::size_t j) const { return vertices_[j]; }
    [[nodiscard]] const std::vector<std::vector<double>>& vertices() const noexcept { return vertices_; }

    /// S(x): signed weights for points outside the simplex.
    [[nodiscard]] BarycentricPoint barycentric(const Point& x) const;
    [[nodiscard]] BarycentricPoint barycentric(std::span<const double> x) const;

    /// R(t) = sum_i t_i x_i.
    [[nodiscard]] Point point_from_barycentric(const BarycentricPoint& t) const;
    [[nodiscard]] Point point_from_barycentric(std::span<const double> t) const;

    [[nodiscard]] bool contains(const Point& x, double tol = 0.0) const;

    /// Longest edge.
    [[nodiscard]] double diameter() const noexcept { return diameter_; }
    [[nodiscard]] double signed_determinant() const noexcept { return determinant_; }
    [[nodiscard]] Point centroid() const;

    /// Vertices mapped by c + factor * (x_j - c), c the centroid.
    [[nodiscard]] Simplex scaled(double factor) const;

private:
    std::size_t dimension_ = 0;
    std::vector<std::vector<double>> vertices_;
    double diameter_ = 0.0;
    double determinant_ = 0.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

[[nodiscard]] Simplex simplex_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json simplex_to_json(const Simplex& s);

}  // namespace bezsimplex
