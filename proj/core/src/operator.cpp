#include "bezsimplex/operator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>

#include "bezsimplex/csv.hpp"
#include "bezsimplex/errors.hpp"
#include "bezsimplex/parallel.hpp"

namespace bezsimplex {

namespace {

// For the order-n layout: the tail sum k_1 + ... + k_D of every entry and the
// positions of k + e_j (j = 1..D) for entries whose tail sum is below n.
// Colex rank grows with every k_j, so neighbours always sit after the entry.
struct DeCasteljauPlan {
    std::vector<int> tail;
    std::vector<std::uint32_t> neighbour;  // size * D, unused slots are 0
};

std::shared_ptr<const DeCasteljauPlan> shared_plan(const Lattice& lattice) {
    static std::mutex mutex;
    static std::map<std::pair<int, std::size_t>, std::shared_ptr<const DeCasteljauPlan>> cache;
    const auto key = std::make_pair(lattice.order(), lattice.dimension());
    {
        const std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) {
            return it->second;
        }
    }

    const std::size_t dimension = lattice.dimension();
    const int n = lattice.order();
    auto plan = std::make_shared<DeCasteljauPlan>();
    plan->tail.resize(lattice.size());
    plan->neighbour.assign(lattice.size() * dimension, 0);
    std::vector<int> k(dimension + 1);
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        const auto entry = lattice.index(i);
        plan->tail[i] = n - entry[0];
        if (entry[0] == 0) {
            continue;
        }
        std::copy(entry.begin(), entry.end(), k.begin());
        --k[0];
        for (std::size_t j = 1; j <= dimension; ++j) {
            ++k[j];
            plan->neighbour[i * dimension + (j - 1)] = static_cast<std::uint32_t>(colex_rank(k));
            --k[j];
        }
    }

    const std::lock_guard lock(mutex);
    auto& slot = cache[key];
    if (!slot) {
        slot = std::move(plan);
    }
    return slot;
}

// Weights inside [-kCoordinateTolerance, 0) are snapped to zero.
std::vector<double> admitted_weights(const BarycentricPoint& t) {
    if (!t.is_inside(kCoordinateTolerance)) {
        throw NegativeWeight("barycentric weight " + std::to_string(t.min_weight()) +
                             " below tolerance: point lies outside the simplex");
    }
    std::vector<double> w(t.weights().begin(), t.weights().end());
    for (auto& wj : w) {
        wj = std::max(wj, 0.0);
    }
    return w;
}

double log_space_basis(std::span<const int> k, double log_multinomial, std::span<const double> w,
                       std::span<const double> log_w) {
    double acc = log_multinomial;
    for (std::size_t j = 0; j < k.size(); ++j) {
        if (k[j] == 0) {
            continue;
        }
        if (w[j] == 0.0) {
            return 0.0;
        }
        acc += k[j] * log_w[j];
    }
    return std::exp(acc);
}

std::vector<double> logs_of(std::span<const double> w) {
    std::vector<double> out(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
        out[j] = w[j] > 0.0 ? std::log(w[j]) : 0.0;
    }
    return out;
}

void check_net_dimension(const ControlNet& net, std::size_t weights) {
    if (weights != net.simplex().dimension() + 1) {
        throw DimensionMismatch("expected " + std::to_string(net.simplex().dimension() + 1) +
                                " barycentric weights, got " + std::to_string(weights));
    }
}

std::string describe(const MultiIndex& k, const Point& x) {
    std::ostringstream os;
    os << "k=" << k << " x=(";
    for (std::size_t i = 0; i < x.dimension(); ++i) {
        os << (i ? "," : "") << format_double(x[i]);
    }
    os << ')';
    return os.str();
}

}  // namespace

std::string_view to_string(Evaluator e) noexcept {
    return e == Evaluator::Direct ? "direct" : "decasteljau";
}

Evaluator evaluator_from_string(std::string_view name) {
    if (name == "direct") {
        return Evaluator::Direct;
    }
    if (name == "decasteljau" || name == "de-casteljau" || name == "de_casteljau") {
        return Evaluator::DeCasteljau;
    }
    throw ConfigError("unknown evaluator '" + std::string(name) + "' (expected direct or decasteljau)");
}

ControlNet::ControlNet(Simplex simplex, int n, std::vector<double> coefficients)
    : simplex_(std::move(simplex)), order_(n), coefficients_(std::move(coefficients)) {
    if (n < 1) {
        throw Error("control net order must be >= 1, got " + std::to_string(n));
    }
    lattice_ = shared_lattice(n, simplex_.dimension());
    if (coefficients_.size() != lattice_->size()) {
        throw DimensionMismatch("control net of order " + std::to_string(n) + " needs " +
                                std::to_string(lattice_->size()) + " coefficients, got " +
                                std::to_string(coefficients_.size()));
    }
    for (double c : coefficients_) {
        if (!std::isfinite(c)) {
            throw Error("control net coefficients must be finite");
        }
    }
}

double ControlNet::coefficient(const MultiIndex& k) const {
    if (k.size() != simplex_.dimension() + 1 || k.order() != order_) {
        throw DimensionMismatch("multi-index does not belong to this control net");
    }
    return coefficients_[colex_rank(k.entries())];
}

double ControlNet::max_abs() const noexcept {
    double m = 0.0;
    for (double c : coefficients_) {
        m = std::max(m, std::abs(c));
    }
    return m;
}

double basis_value(const Simplex& s, const MultiIndex& k, const Point& x) {
    if (k.size() != s.dimension() + 1) {
        throw DimensionMismatch("multi-index length does not match the simplex");
    }
    return basis_value(k, s.barycentric(x));
}

double basis_value(const MultiIndex& k, const BarycentricPoint& t) {
    if (k.size() != t.size()) {
        throw DimensionMismatch("multi-index and barycentric point lengths differ");
    }
    if (k.order() < 1) {
        throw Error("basis functions need order n >= 1");
    }
    const auto w = admitted_weights(t);
    return log_space_basis(k.entries(), multinomial_log(k), w, logs_of(w));
}

std::vector<double> basis_values(const Simplex& s, int n, const Point& x) {
    if (n < 1) {
        throw Error("basis functions need order n >= 1");
    }
    const auto lattice = shared_lattice(n, s.dimension());
    const auto w = admitted_weights(s.barycentric(x));
    const auto log_w = logs_of(w);
    std::vector<double> out(lattice->size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = log_space_basis(lattice->index(i), lattice->log_multinomial(i), w, log_w);
    }
    return out;
}

ControlNet sample_control_net(const Simplex& s, int n, const ScalarField& f) {
    const auto points = control_points(s, n);
    std::vector<double> c;
    c.reserve(points.size());
    for (const auto& [k, x] : points.entries()) {
        double value = 0.0;
        try {
            value = f(x);
        } catch (const std::exception& e) {
            std::throw_with_nested(SampleError("function evaluation failed at control point " + describe(k, x) +
                                               ": " + e.what()));
        }
        if (!std::isfinite(value)) {
            throw SampleError("function is not finite at control point " + describe(k, x));
        }
        c.push_back(value);
    }
    return ControlNet(s, n, std::move(c));
}

double apply_direct(const ControlNet& net, const Point& x) {
    return apply_direct(net, net.simplex().barycentric(x));
}

double apply_direct(const ControlNet& net, const BarycentricPoint& t) {
    check_net_dimension(net, t.size());
    const auto w = admitted_weights(t);
    const auto log_w = logs_of(w);
    const auto& lattice = net.lattice();
    const auto c = net.coefficients();
    double sum = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        sum += c[i] * log_space_basis(lattice.index(i), lattice.log_multinomial(i), w, log_w);
    }
    return sum;
}

double apply_de_casteljau(const ControlNet& net, const Point& x) {
    return apply_de_casteljau(net, net.simplex().barycentric(x));
}

double apply_de_casteljau(const ControlNet& net, const BarycentricPoint& t) {
    check_net_dimension(net, t.size());
    const auto w = admitted_weights(t);
    const auto plan = shared_plan(net.lattice());
    const std::size_t dimension = net.simplex().dimension();
    const auto& tail = plan->tail;
    const auto& neighbour = plan->neighbour;

    std::vector<double> b(net.coefficients().begin(), net.coefficients().end());
    // Level r holds the order-r net at the entries with tail <= r; stepping to
    // r - 1 rewrites those with tail <= r - 1 in increasing position, reading
    // only k (same slot) and k + e_j (later slots, still at level r).
    for (int r = net.order(); r >= 1; --r) {
        for (std::size_t i = 0; i < b.size(); ++i) {
            if (tail[i] > r - 1) {
                continue;
            }
            double v = w[0] * b[i];
            const std::uint32_t* nb = neighbour.data() + i * dimension;
            for (std::size_t j = 1; j <= dimension; ++j) {
                v += w[j] * b[nb[j - 1]];
            }
            b[i] = v;
        }
    }
    return b[0];
}

double evaluate(const ControlNet& net, const Point& x, Evaluator evaluator) {
    return evaluator == Evaluator::Direct ? apply_direct(net, x) : apply_de_casteljau(net, x);
}

std::vector<Point> lattice_grid(const Simplex& s, int m) {
    if (m < 1) {
        throw Error("grid resolution must be >= 1, got " + std::to_string(m));
    }
    return control_points(s, m).points();
}

int default_grid_resolution(std::size_t dimension) noexcept {
    if (dimension <= 2) {
        return 50;
    }
    if (dimension == 3) {
        return 15;
    }
    return 8;
}

double operator_sup_error(const ControlNet& net, const ScalarField& f, std::span<const Point> grid,
                          Evaluator evaluator) {
    if (grid.empty()) {
        throw EmptyGrid("sup-norm estimate needs at least one grid point");
    }
    std::vector<double> err(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        err[i] = std::abs(evaluate(net, grid[i], evaluator) - f(grid[i]));
    });
    return *std::max_element(err.begin(), err.end());
}

void write_control_net_csv(std::ostream& os, const ControlNet& net) {
    const std::size_t dimension = net.simplex().dimension();
    for (std::size_t j = 0; j <= dimension; ++j) {
        os << "k_" << j << ',';
    }
    os << "c\n";
    const auto& lattice = net.lattice();
    for (std::size_t i = 0; i < net.size(); ++i) {
        for (int kj : lattice.index(i)) {
            os << kj << ',';
        }
        os << format_double(net.coefficients()[i]) << '\n';
    }
}

ControlNet read_control_net_csv(std::istream& is, const Simplex& s) {
    const std::size_t width = s.dimension() + 2;
    std::string line;
    if (!std::getline(is, line)) {
        throw Error("control net CSV is empty");
    }
    if (split_csv_line(line).size() != width) {
        throw DimensionMismatch("control net CSV header has the wrong number of columns");
    }

    std::vector<std::pair<std::vector<int>, double>> rows;
    int order = -1;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != width) {
            throw Error("control net CSV line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                        " fields");
        }
        std::vector<int> k(s.dimension() + 1);
        for (std::size_t j = 0; j < k.size(); ++j) {
            k[j] = static_cast<int>(parse_double(fields[j]));
        }
        const MultiIndex mi(k);
        if (order < 0) {
            order = mi.order();
        } else if (mi.order() != order) {
            throw Error("control net CSV line " + std::to_string(line_no) + ": mixed orders");
        }
        rows.emplace_back(std::move(k), parse_double(fields.back()));
    }
    if (order < 1) {
        throw Error("control net CSV has no rows of order >= 1");
    }

    const auto expected = lattice_size(order, s.dimension());
    if (rows.size() != expected) {
        throw DimensionMismatch("control net CSV has " + std::to_string(rows.size()) + " rows, expected " +
                                std::to_string(expected));
    }
    std::vector<double> c(rows.size());
    std::vector<bool> seen(rows.size(), false);
    for (const auto& [k, value] : rows) {
        const auto rank = colex_rank(k);
        if (seen[rank]) {
            throw Error("control net CSV repeats a multi-index");
        }
        seen[rank] = true;
        c[rank] = value;
    }
    return ControlNet(s, order, std::move(c));
}

}  // namespace bezsimplex
