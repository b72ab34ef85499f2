#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bezsimplex/expmodel.hpp"
#include "bezsimplex/geometry.hpp"
#include "bezsimplex/operator.hpp"

namespace bezsimplex {

/// A test function from the builtin catalog, or an exponential polynomial.
///
/// Builtins: "const1"; "affine:v_1,...,v_D,b" (x -> v.x + b); "abs"
/// (x -> |u.(x - centroid)|, u = e_1 unless given); "runge"
/// (x -> 1 / (1 + 25 |x - centroid|^2)).
class TestFunction {
public:
    [[nodiscard]] static TestFunction const1();
    [[nodiscard]] static TestFunction affine(std::vector<double> v, double b);
    [[nodiscard]] static TestFunction abs_along(const Simplex& s, std::vector<double> direction);
    [[nodiscard]] static TestFunction runge(const Simplex& s);
    [[nodiscard]] static TestFunction exp_polynomial(ExpPolynomial p);

    /// Parses a config "function" entry for the given simplex.
    [[nodiscard]] static TestFunction from_json(const nlohmann::json& j, const Simplex& s);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const ScalarField& field() const noexcept { return field_; }
    [[nodiscard]] double operator()(const Point& x) const { return field_(x); }

    [[nodiscard]] const std::optional<ExpPolynomial>& exp_form() const noexcept { return exp_; }
    /// The term when the function is exactly one exponential c*exp(a.x).
    [[nodiscard]] std::optional<ExpTerm> single_exponential() const;

private:
    TestFunction(std::string name, ScalarField field, std::optional<ExpPolynomial> exp = std::nullopt)
        : name_(std::move(name)), field_(std::move(field)), exp_(std::move(exp)) {}

    std::string name_;
    ScalarField field_;
    std::optional<ExpPolynomial> exp_;
};

struct ExperimentConfig {
    Simplex simplex;
    TestFunction function;
    std::vector<int> n_values;
    int grid_resolution = 0;
    std::optional<std::filesystem::path> output;
    std::uint64_t seed = 0;
    /// Seeded uniform interior points added to the lattice grid.
    std::size_t probe_points = 0;
    Evaluator evaluator = Evaluator::DeCasteljau;
    /// Directions for the scaling study; empty means the single exponential's own.
    std::vector<std::vector<double>> directions;
};

/// Parses a config object. Relative simplex paths resolve against base_dir.
/// Throws ConfigError naming the offending field.
[[nodiscard]] ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

/// Reads a config from a file, or from inline JSON when the argument starts with '{'.
[[nodiscard]] ExperimentConfig load_config(const std::string& path_or_json);

/// Same path-or-inline convention as load_config.
[[nodiscard]] Simplex load_simplex(const std::string& path_or_json);

/// Lattice grid of the config's resolution plus its seeded probe points.
[[nodiscard]] std::vector<Point> experiment_grid(const ExperimentConfig& config);

/// Dirichlet(1,...,1) points inside s from a portable 64-bit generator.
[[nodiscard]] std::vector<Point> random_interior_points(const Simplex& s, std::size_t count, std::uint64_t seed);

struct ConvergenceRow {
    int n = 0;
    double sup_error = 0.0;
    /// sup_error / sup |f| over the grid (sup_error itself when f vanishes on the grid).
    double sup_relative_error = 0.0;
    std::optional<double> predicted_k_over_n;
    Evaluator evaluator = Evaluator::DeCasteljau;
    double wall_time_ms = 0.0;

    friend bool operator==(const ConvergenceRow&, const ConvergenceRow&) = default;
};

[[nodiscard]] std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& config);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

/// Errors below this are excluded from rate fits.
inline constexpr double kRateNoiseFloor = 1e-13;

enum class ErrorMetric { Absolute, Relative };

/// Least squares of log(error) on log(n). Throws ZeroError when every row is
/// below the noise floor and InsufficientData when fewer than three remain.
[[nodiscard]] RateFit fit_rate(std::span<const ConvergenceRow> rows, ErrorMetric metric = ErrorMetric::Absolute);
[[nodiscard]] RateFit fit_power_law(std::span<const double> n, std::span<const double> error);

struct BoundCheckRow {
    int n = 0;
    double observed = 0.0;
    double predicted = 0.0;
    double ratio = 0.0;
    bool violation = false;
};

struct BoundCheckReport {
    std::vector<BoundCheckRow> rows;
    double margin = 0.25;
    int min_checked_order = 40;
    [[nodiscard]] bool violated() const noexcept;
};

/// Observed sup relative error of exp(a.x) against K/n for each configured n;
/// a row with n >= min_checked_order and ratio > 1 + margin is a violation.
/// Throws ConfigError unless the function is a single exponential.
[[nodiscard]] BoundCheckReport run_bound_check(const ExperimentConfig& config, double margin = 0.25,
                                               int min_checked_order = 40);

struct ScalingRow {
    double scale = 0.0;
    double diameter = 0.0;
    std::size_t direction_index = 0;
    double direction_norm = 0.0;
    int n = 0;
    double sup_relative_error = 0.0;
};

/// Sup relative error of exp(a.x) on base.scaled(scale) for every
/// (scale, direction, n); grid resolution m.
[[nodiscard]] std::vector<ScalingRow> run_scaling_study(const Simplex& base, std::span<const double> scales,
                                                        std::span<const std::vector<double>> directions,
                                                        std::span<const int> n_values, int m);

/// Config-driven variant: directions from the config or its single exponential.
[[nodiscard]] std::vector<ScalingRow> run_scaling_study(const ExperimentConfig& config,
                                                        std::span<const double> scales);

/// Header n,sup_error,sup_relative_error,predicted_K_over_n,evaluator
/// (+ wall_time_ms when include_timing). Absent predictions are empty fields.
void write_convergence_csv(std::ostream& os, std::span<const ConvergenceRow> rows, bool include_timing = false);
[[nodiscard]] std::vector<ConvergenceRow> read_convergence_csv(std::istream& is);

/// Writes the convergence CSV to path; throws IoError naming the path.
void emit_csv(std::span<const ConvergenceRow> rows, const std::filesystem::path& path, bool include_timing = false);

void write_bound_check_csv(std::ostream& os, const BoundCheckReport& report);
void write_scaling_csv(std::ostream& os, std::span<const ScalingRow> rows);

/// Writes through writer(os) into path, surfacing failures as IoError.
void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);

}  // namespace bezsimplex
