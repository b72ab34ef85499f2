#include "bezsimplex/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "bezsimplex/errors.hpp"

namespace bezsimplex {

namespace {

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double distance(std::span<const double> a, std::span<const double> b) {
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sq += d * d;
    }
    return std::sqrt(sq);
}

// Exterior points far from the simplex carry large signed weights; the sum
// tolerance is relative to their magnitude.
void check_weight_sum(std::span<const double> w) {
    double sum = 0.0;
    double magnitude = 1.0;
    for (double x : w) {
        sum += x;
        magnitude = std::max(magnitude, std::abs(x));
    }
    if (!(std::abs(sum - 1.0) <= kWeightSumTolerance * magnitude)) {
        throw DimensionMismatch("barycentric weights sum to " + std::to_string(sum) + ", expected 1");
    }
}

}  // namespace

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) {
    if (!all_finite(coords_)) {
        throw Error("point has non-finite coordinates");
    }
}

Point::Point(std::initializer_list<double> coords) : Point(std::vector<double>(coords)) {}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("dot product of vectors of length " + std::to_string(a.size()) +
                                " and " + std::to_string(b.size()));
    }
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

BarycentricPoint::BarycentricPoint(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.size() < 2) {
        throw DimensionMismatch("barycentric point needs at least two weights");
    }
    if (!all_finite(weights_)) {
        throw Error("barycentric point has non-finite weights");
    }
    check_weight_sum(weights_);
    if (!is_inside(kCoordinateTolerance)) {
        throw NegativeWeight("barycentric weight " + std::to_string(min_weight()) +
                             " lies outside the closed simplex");
    }
}

BarycentricPoint::BarycentricPoint(std::initializer_list<double> weights)
    : BarycentricPoint(std::vector<double>(weights)) {}

BarycentricPoint BarycentricPoint::signed_weights(std::vector<double> weights) {
    if (weights.size() < 2) {
        throw DimensionMismatch("barycentric point needs at least two weights");
    }
    check_weight_sum(weights);
    return BarycentricPoint(Unchecked{}, std::move(weights));
}

double BarycentricPoint::min_weight() const noexcept {
    return *std::min_element(weights_.begin(), weights_.end());
}

bool BarycentricPoint::is_inside(double tol) const noexcept { return min_weight() >= -tol; }

Simplex::Simplex(std::vector<std::vector<double>> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 2) {
        throw DimensionMismatch("a simplex needs at least two vertices, got " +
                                std::to_string(vertices_.size()));
    }
    dimension_ = vertices_.size() - 1;
    for (std::size_t j = 0; j < vertices_.size(); ++j) {
        if (vertices_[j].size() != dimension_) {
            throw DimensionMismatch("vertex " + std::to_string(j) + " has length " +
                                    std::to_string(vertices_[j].size()) + ", expected " +
                                    std::to_string(dimension_));
        }
        if (!all_finite(vertices_[j])) {
            throw Error("vertex " + std::to_string(j) + " has non-finite coordinates");
        }
    }

    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        for (std::size_t j = i + 1; j < vertices_.size(); ++j) {
            diameter_ = std::max(diameter_, distance(vertices_[i], vertices_[j]));
        }
    }

    const auto n = static_cast<Eigen::Index>(dimension_ + 1);
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
        a(0, col) = 1.0;
        for (Eigen::Index row = 1; row < n; ++row) {
            a(row, col) = vertices_[static_cast<std::size_t>(col)][static_cast<std::size_t>(row - 1)];
        }
    }
    lu_.compute(a);
    determinant_ = lu_.determinant();

    const double scale = std::pow(diameter_, static_cast<double>(dimension_));
    if (!(std::abs(determinant_) > kDegeneracyTolerance * scale) || diameter_ == 0.0) {
        throw DegenerateSimplex("simplex is degenerate: |det| = " + std::to_string(std::abs(determinant_)) +
                                ", diameter = " + std::to_string(diameter_));
    }
}

Simplex Simplex::standard(std::size_t dimension) {
    if (dimension == 0) {
        throw DimensionMismatch("simplex dimension must be positive");
    }
    std::vector<std::vector<double>> v(dimension + 1, std::vector<double>(dimension, 0.0));
    for (std::size_t j = 1; j <= dimension; ++j) {
        v[j][j - 1] = 1.0;
    }
    return Simplex(std::move(v));
}

BarycentricPoint Simplex::barycentric(const Point& x) const { return barycentric(x.coords()); }

BarycentricPoint Simplex::barycentric(std::span<const double> x) const {
    if (x.size() != dimension_) {
        throw DimensionMismatch("point of dimension " + std::to_string(x.size()) +
                                " queried on a " + std::to_string(dimension_) + "-simplex");
    }
    const auto n = static_cast<Eigen::Index>(dimension_ + 1);
    Eigen::VectorXd rhs(n);
    rhs(0) = 1.0;
    for (Eigen::Index i = 1; i < n; ++i) {
        rhs(i) = x[static_cast<std::size_t>(i - 1)];
    }
    const Eigen::VectorXd t = lu_.solve(rhs);

    std::vector<double> w(t.data(), t.data() + n);
    // Fold the rounding residual of the ones row into t_0 so the weights sum to one.
    double rest = 0.0;
    for (std::size_t i = 1; i < w.size(); ++i) {
        rest += w[i];
    }
    w[0] = 1.0 - rest;
    return BarycentricPoint::signed_weights(std::move(w));
}

Point Simplex::point_from_barycentric(const BarycentricPoint& t) const {
    return point_from_barycentric(t.weights());
}

Point Simplex::point_from_barycentric(std::span<const double> t) const {
    if (t.size() != dimension_ + 1) {
        throw DimensionMismatch("expected " + std::to_string(dimension_ + 1) + " barycentric weights, got " +
                                std::to_string(t.size()));
    }
    std::vector<double> x(dimension_, 0.0);
    for (std::size_t j = 0; j <= dimension_; ++j) {
        for (std::size_t i = 0; i < dimension_; ++i) {
            x[i] += t[j] * vertices_[j][i];
        }
    }
    return Point(std::move(x));
}

bool Simplex::contains(const Point& x, double tol) const { return barycentric(x).is_inside(tol); }

Point Simplex::centroid() const {
    std::vector<double> c(dimension_, 0.0);
    for (const auto& v : vertices_) {
        for (std::size_t i = 0; i < dimension_; ++i) {
            c[i] += v[i];
        }
    }
    for (auto& ci : c) {
        ci /= static_cast<double>(vertices_.size());
    }
    return Point(std::move(c));
}

Simplex Simplex::scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor)) {
        throw Error("scale factor must be positive and finite");
    }
    const Point c = centroid();
    auto v = vertices_;
    for (auto& vertex : v) {
        for (std::size_t i = 0; i < dimension_; ++i) {
            vertex[i] = c[i] + factor * (vertex[i] - c[i]);
        }
    }
    return Simplex(std::move(v));
}

Simplex simplex_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("vertices")) {
        throw Error("simplex JSON must be an object with a \"vertices\" array");
    }
    const auto& jv = j.at("vertices");
    if (!jv.is_array()) {
        throw Error("simplex \"vertices\" must be an array of coordinate arrays");
    }
    std::vector<std::vector<double>> vertices;
    for (const auto& row : jv) {
        if (!row.is_array()) {
            throw Error("simplex vertex must be an array of numbers");
        }
        std::vector<double> v;
        for (const auto& c : row) {
            if (!c.is_number()) {
                throw Error("simplex vertex coordinate must be a number");
            }
            v.push_back(c.get<double>());
        }
        vertices.push_back(std::move(v));
    }
    return Simplex(std::move(vertices));
}

nlohmann::json simplex_to_json(const Simplex& s) { return nlohmann::json{{"vertices", s.vertices()}}; }

}  // namespace bezsimplex
