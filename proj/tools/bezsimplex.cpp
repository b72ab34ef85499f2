#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bezsimplex/csv.hpp"
#include "bezsimplex/errors.hpp"
#include "bezsimplex/harness.hpp"
#include "bezsimplex/lattice.hpp"
#include "bezsimplex/operator.hpp"

using namespace bezsimplex;

namespace {

constexpr int kExitError = 1;
constexpr int kExitViolation = 2;

// Writes to path when given, otherwise to stdout.
void emit(const std::optional<std::string>& path, const std::function<void(std::ostream&)>& writer) {
    if (path) {
        write_file(*path, writer);
    } else {
        writer(std::cout);
        std::cout.flush();
    }
}

void print_grid_note(const ExperimentConfig& c) {
    const auto lattice_points = lattice_size(c.grid_resolution, c.simplex.dimension());
    std::cerr << "grid: lattice m=" << c.grid_resolution << " (" << lattice_points << " points) + " << c.probe_points
              << " probe points (seed " << c.seed << "); sup over the grid is a lower bound on the true sup\n";
}

std::optional<std::string> output_path(const std::string& flag, const ExperimentConfig& c) {
    if (!flag.empty()) {
        return flag;
    }
    if (c.output) {
        return c.output->string();
    }
    return std::nullopt;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    for (const auto& field : split_csv_line(text)) {
        try {
            out.push_back(parse_double(field));
        } catch (const Error&) {
            throw ConfigError(std::string(what) + ": cannot parse '" + field + "' as a number");
        }
    }
    return out;
}

std::string describe(const std::exception& e) {
    std::string msg = e.what();
    try {
        std::rethrow_if_nested(e);
    } catch (const std::exception& inner) {
        msg += ": " + describe(inner);
    } catch (...) {
        msg += ": unknown error";
    }
    return msg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bernstein-Bezier approximation on simplices"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out;
    std::string evaluator;
    bool timing = false;
    auto* converge = app.add_subcommand("converge", "sup error of B_n f over the grid for each configured n");
    converge->add_option("--config", config_path, "JSON config file, or inline JSON")->required();
    converge->add_option("--evaluator", evaluator, "decasteljau or direct (overrides the config)");
    converge->add_option("--out", out, "CSV output path (default: config output, else stdout)");
    converge->add_flag("--timing", timing, "append a wall_time_ms column");

    double margin = 0.25;
    auto* bound = app.add_subcommand("bound-check", "observed relative error of exp(a.x) against K/n");
    bound->add_option("--config", config_path, "JSON config file, or inline JSON")->required();
    bound->add_option("--margin", margin, "allowed excess over K/n for n >= 40")->capture_default_str();
    bound->add_option("--out", out, "CSV output path (default: stdout)");

    std::string scales_text = "0.5,1,2,4";
    auto* scaling = app.add_subcommand("scaling", "sup relative error of exp(a.x) under simplex and |a| scaling");
    scaling->add_option("--config", config_path, "JSON config file, or inline JSON")->required();
    scaling->add_option("--scales", scales_text, "comma-separated scale factors about the centroid")
        ->capture_default_str();
    scaling->add_option("--out", out, "CSV output path (default: stdout)");

    std::string simplex_arg;
    int order = 0;
    std::string point_text;
    auto* basis = app.add_subcommand("basis", "every B_k^n(x) at one point");
    basis->add_option("--simplex", simplex_arg, "simplex JSON file, or inline JSON")->required();
    basis->add_option("--n", order, "polynomial order")->required();
    basis->add_option("--point", point_text, "comma-separated coordinates")->required();

    auto* points = app.add_subcommand("control-points", "control points R(k/n) of order n");
    points->add_option("--simplex", simplex_arg, "simplex JSON file, or inline JSON")->required();
    points->add_option("--n", order, "polynomial order")->required();
    points->add_option("--out", out, "CSV output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitError;
    }

    try {
        if (*converge) {
            auto config = load_config(config_path);
            if (!evaluator.empty()) {
                config.evaluator = evaluator_from_string(evaluator);
            }
            print_grid_note(config);
            const auto rows = run_convergence(config);
            emit(output_path(out, config), [&](std::ostream& os) { write_convergence_csv(os, rows, timing); });
        } else if (*bound) {
            const auto config = load_config(config_path);
            print_grid_note(config);
            const auto report = run_bound_check(config, margin);
            emit(out.empty() ? std::nullopt : std::optional(out),
                 [&](std::ostream& os) { write_bound_check_csv(os, report); });
            if (report.violated()) {
                std::cerr << "bound violated: observed relative error exceeds (1 + " << format_double(margin)
                          << ") K/n for some n >= " << report.min_checked_order << '\n';
                return kExitViolation;
            }
        } else if (*scaling) {
            const auto config = load_config(config_path);
            const auto scales = parse_list(scales_text, "--scales");
            const auto rows = run_scaling_study(config, scales);
            emit(out.empty() ? std::nullopt : std::optional(out),
                 [&](std::ostream& os) { write_scaling_csv(os, rows); });
        } else if (*basis) {
            const auto s = load_simplex(simplex_arg);
            const Point x(parse_list(point_text, "--point"));
            const auto values = basis_values(s, order, x);
            const auto& lattice = *shared_lattice(order, s.dimension());
            double sum = 0.0;
            for (std::size_t j = 0; j <= s.dimension(); ++j) {
                std::cout << "k_" << j << ',';
            }
            std::cout << "B\n";
            for (std::size_t i = 0; i < values.size(); ++i) {
                for (int kj : lattice.index(i)) {
                    std::cout << kj << ',';
                }
                std::cout << format_double(values[i]) << '\n';
                sum += values[i];
            }
            std::cerr << "sum: " << format_double(sum) << '\n';
        } else if (*points) {
            const auto s = load_simplex(simplex_arg);
            const auto set = control_points(s, order);
            emit(out.empty() ? std::nullopt : std::optional(out),
                 [&](std::ostream& os) { write_control_points_csv(os, set); });
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << describe(e) << '\n';
        return kExitError;
    }
    return 0;
}
