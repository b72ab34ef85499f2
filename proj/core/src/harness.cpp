#include "bezsimplex/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string_view>

#include <nlohmann/json.hpp>

#include "bezsimplex/csv.hpp"
#include "bezsimplex/errors.hpp"
#include "bezsimplex/parallel.hpp"

namespace bezsimplex {

namespace {

using nlohmann::json;

std::vector<double> parse_number_list(std::string_view text, std::string_view what) {
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

std::vector<double> json_vector(const json& j, std::string_view field) {
    if (!j.is_array()) {
        throw ConfigError("config field '" + std::string(field) + "': expected an array of numbers");
    }
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) {
            throw ConfigError("config field '" + std::string(field) + "': expected an array of numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

void require_length(const std::vector<double>& v, std::size_t length, std::string_view field) {
    if (v.size() != length) {
        throw ConfigError("config field '" + std::string(field) + "': expected " + std::to_string(length) +
                          " entries, got " + std::to_string(v.size()));
    }
}

json read_json_argument(const std::string& path_or_json, std::filesystem::path& base_dir) {
    const auto first = path_or_json.find_first_not_of(" \t\r\n");
    try {
        if (first != std::string::npos && path_or_json[first] == '{') {
            base_dir = std::filesystem::current_path();
            return json::parse(path_or_json);
        }
        std::ifstream is(path_or_json);
        if (!is) {
            throw IoError("cannot open '" + path_or_json + "'");
        }
        base_dir = std::filesystem::path(path_or_json).parent_path();
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError("invalid JSON in '" + path_or_json.substr(0, 80) + "': " + e.what());
    }
}

// Portable uniform double in (0, 1].
double unit_interval(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

double vector_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

}  // namespace

TestFunction TestFunction::const1() {
    return TestFunction("const1", [](const Point&) { return 1.0; });
}

TestFunction TestFunction::affine(std::vector<double> v, double b) {
    std::string name = "affine:";
    for (double vi : v) {
        name += format_double(vi) + ",";
    }
    name += format_double(b);
    return TestFunction(std::move(name), [v = std::move(v), b](const Point& x) { return dot(v, x.coords()) + b; });
}

TestFunction TestFunction::abs_along(const Simplex& s, std::vector<double> direction) {
    if (direction.size() != s.dimension()) {
        throw DimensionMismatch("abs direction must have length " + std::to_string(s.dimension()));
    }
    const Point c = s.centroid();
    const double offset = dot(direction, c.coords());
    return TestFunction("abs", [direction = std::move(direction), offset](const Point& x) {
        return std::abs(dot(direction, x.coords()) - offset);
    });
}

TestFunction TestFunction::runge(const Simplex& s) {
    return TestFunction("runge", [c = s.centroid()](const Point& x) {
        double r2 = 0.0;
        for (std::size_t i = 0; i < x.dimension(); ++i) {
            const double d = x[i] - c[i];
            r2 += d * d;
        }
        return 1.0 / (1.0 + 25.0 * r2);
    });
}

TestFunction TestFunction::exp_polynomial(ExpPolynomial p) {
    auto field = [p](const Point& x) { return exp_poly_eval(p, x); };
    return TestFunction("exp-polynomial", std::move(field), std::move(p));
}

std::optional<ExpTerm> TestFunction::single_exponential() const {
    if (exp_ && exp_->terms().size() == 1) {
        return exp_->terms().front();
    }
    return std::nullopt;
}

TestFunction TestFunction::from_json(const json& j, const Simplex& s) {
    const std::size_t dimension = s.dimension();
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name == "const1") {
            return const1();
        }
        if (name == "abs") {
            std::vector<double> e1(dimension, 0.0);
            e1[0] = 1.0;
            return abs_along(s, std::move(e1));
        }
        if (name == "runge") {
            return runge(s);
        }
        if (name.starts_with("affine:")) {
            auto values = parse_number_list(std::string_view(name).substr(7), "config field 'function'");
            require_length(values, dimension + 1, "function");
            const double b = values.back();
            values.pop_back();
            return affine(std::move(values), b);
        }
        throw ConfigError("config field 'function': unknown builtin '" + name +
                          "' (expected const1, affine:v,b, abs, runge or an exp-polynomial object)");
    }
    if (!j.is_object()) {
        throw ConfigError("config field 'function': expected a builtin name or an object");
    }
    if (j.contains("terms")) {
        try {
            auto p = exp_polynomial_from_json(j);
            if (p.dimension() != dimension) {
                throw ConfigError("config field 'function.terms': directions must have length " +
                                  std::to_string(dimension));
            }
            return exp_polynomial(std::move(p));
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(std::string("config field 'function.terms': ") + e.what());
        }
    }
    if (!j.contains("builtin") || !j.at("builtin").is_string()) {
        throw ConfigError("config field 'function': object needs \"terms\" or \"builtin\"");
    }
    const auto name = j.at("builtin").get<std::string>();
    if (name == "affine") {
        if (!j.contains("v") || !j.contains("b") || !j.at("b").is_number()) {
            throw ConfigError("config field 'function': affine needs \"v\" and numeric \"b\"");
        }
        auto v = json_vector(j.at("v"), "function.v");
        require_length(v, dimension, "function.v");
        return affine(std::move(v), j.at("b").get<double>());
    }
    if (name == "abs" && j.contains("direction")) {
        auto u = json_vector(j.at("direction"), "function.direction");
        require_length(u, dimension, "function.direction");
        return abs_along(s, std::move(u));
    }
    return from_json(json(name), s);
}

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    static const std::set<std::string> known = {"simplex", "function",     "n_values", "grid_resolution", "output",
                                                "seed",    "probe_points", "evaluator", "directions"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw ConfigError("config field '" + key + "': unknown field");
        }
    }
    for (const char* required : {"simplex", "function", "n_values"}) {
        if (!j.contains(required)) {
            throw ConfigError(std::string("config field '") + required + "': missing");
        }
    }

    const auto simplex = [&] {
        const auto& js = j.at("simplex");
        try {
            if (js.is_string()) {
                auto path = std::filesystem::path(js.get<std::string>());
                if (path.is_relative()) {
                    path = base_dir / path;
                }
                return load_simplex(path.string());
            }
            return simplex_from_json(js);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(std::string("config field 'simplex': ") + e.what());
        }
    }();

    auto function = [&] {
        try {
            return TestFunction::from_json(j.at("function"), simplex);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(std::string("config field 'function': ") + e.what());
        }
    }();

    ExperimentConfig config{simplex, std::move(function), {}, 0, std::nullopt, 0, 0, Evaluator::DeCasteljau, {}};

    const auto& jn = j.at("n_values");
    if (!jn.is_array() || jn.empty()) {
        throw ConfigError("config field 'n_values': expected a non-empty array of integers");
    }
    for (std::size_t i = 0; i < jn.size(); ++i) {
        const auto field = "config field 'n_values[" + std::to_string(i) + "]'";
        if (!jn[i].is_number_integer() || jn[i].get<long long>() < 1 ||
            jn[i].get<long long>() > std::numeric_limits<int>::max()) {
            throw ConfigError(field + ": expected a positive integer");
        }
        const int n = jn[i].get<int>();
        if (!config.n_values.empty() && n <= config.n_values.back()) {
            throw ConfigError(field + ": n_values must be strictly increasing");
        }
        config.n_values.push_back(n);
    }

    config.grid_resolution = default_grid_resolution(simplex.dimension());
    if (j.contains("grid_resolution")) {
        const auto& jm = j.at("grid_resolution");
        if (!jm.is_number_integer() || jm.get<long long>() < 2 || jm.get<long long>() > 100000) {
            throw ConfigError("config field 'grid_resolution': expected an integer >= 2");
        }
        config.grid_resolution = jm.get<int>();
    }
    if (j.contains("output")) {
        if (!j.at("output").is_string()) {
            throw ConfigError("config field 'output': expected a path string");
        }
        config.output = j.at("output").get<std::string>();
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) {
            throw ConfigError("config field 'seed': expected a non-negative integer");
        }
        config.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("probe_points")) {
        if (!j.at("probe_points").is_number_unsigned()) {
            throw ConfigError("config field 'probe_points': expected a non-negative integer");
        }
        config.probe_points = j.at("probe_points").get<std::size_t>();
    }
    if (j.contains("evaluator")) {
        if (!j.at("evaluator").is_string()) {
            throw ConfigError("config field 'evaluator': expected \"direct\" or \"decasteljau\"");
        }
        config.evaluator = evaluator_from_string(j.at("evaluator").get<std::string>());
    }
    if (j.contains("directions")) {
        const auto& jd = j.at("directions");
        if (!jd.is_array()) {
            throw ConfigError("config field 'directions': expected an array of vectors");
        }
        for (std::size_t i = 0; i < jd.size(); ++i) {
            const auto field = "directions[" + std::to_string(i) + "]";
            auto a = json_vector(jd[i], field);
            require_length(a, simplex.dimension(), field);
            config.directions.push_back(std::move(a));
        }
    }
    return config;
}

ExperimentConfig load_config(const std::string& path_or_json) {
    std::filesystem::path base_dir;
    const auto j = read_json_argument(path_or_json, base_dir);
    return parse_config(j, base_dir);
}

Simplex load_simplex(const std::string& path_or_json) {
    std::filesystem::path base_dir;
    return simplex_from_json(read_json_argument(path_or_json, base_dir));
}

std::vector<Point> random_interior_points(const Simplex& s, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Point> out;
    out.reserve(count);
    std::vector<double> t(s.vertex_count());
    for (std::size_t p = 0; p < count; ++p) {
        double sum = 0.0;
        for (auto& tj : t) {
            tj = -std::log(unit_interval(rng));
            sum += tj;
        }
        for (auto& tj : t) {
            tj /= sum;
        }
        out.push_back(s.point_from_barycentric(t));
    }
    return out;
}

std::vector<Point> experiment_grid(const ExperimentConfig& config) {
    auto grid = lattice_grid(config.simplex, config.grid_resolution);
    auto probes = random_interior_points(config.simplex, config.probe_points, config.seed);
    grid.insert(grid.end(), probes.begin(), probes.end());
    return grid;
}

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& config) {
    const auto grid = experiment_grid(config);
    std::vector<double> fx(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { fx[i] = config.function(grid[i]); });
    double f_sup = 0.0;
    for (double v : fx) {
        f_sup = std::max(f_sup, std::abs(v));
    }
    const auto single = config.function.single_exponential();

    std::vector<ConvergenceRow> rows;
    for (int n : config.n_values) {
        const auto start = std::chrono::steady_clock::now();
        const auto net = sample_control_net(config.simplex, n, config.function.field());
        std::vector<double> err(grid.size());
        parallel_for(grid.size(), [&](std::size_t i) {
            err[i] = std::abs(evaluate(net, grid[i], config.evaluator) - fx[i]);
        });
        const auto stop = std::chrono::steady_clock::now();

        ConvergenceRow row;
        row.n = n;
        row.sup_error = *std::max_element(err.begin(), err.end());
        row.sup_relative_error = f_sup > 0.0 ? row.sup_error / f_sup : row.sup_error;
        if (single) {
            row.predicted_k_over_n = error_budget(config.simplex, single->direction, n).predicted_relative_bound;
        }
        row.evaluator = config.evaluator;
        row.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
        rows.push_back(row);
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
    return rows;
}

RateFit fit_power_law(std::span<const double> n, std::span<const double> error) {
    if (n.size() != error.size()) {
        throw DimensionMismatch("rate fit needs as many errors as orders");
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (error[i] >= kRateNoiseFloor) {
            xs.push_back(std::log(n[i]));
            ys.push_back(std::log(error[i]));
        }
    }
    if (xs.empty() && !n.empty()) {
        throw ZeroError("every error is below the noise floor: the function is reproduced exactly");
    }
    if (xs.size() < 3) {
        throw InsufficientData("rate fit needs at least 3 errors above the noise floor, got " +
                               std::to_string(xs.size()));
    }
    const double m = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) {
        throw InsufficientData("rate fit needs at least two distinct orders");
    }
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    fit.points = xs.size();
    return fit;
}

RateFit fit_rate(std::span<const ConvergenceRow> rows, ErrorMetric metric) {
    std::vector<double> n;
    std::vector<double> err;
    for (const auto& r : rows) {
        n.push_back(r.n);
        err.push_back(metric == ErrorMetric::Absolute ? r.sup_error : r.sup_relative_error);
    }
    return fit_power_law(n, err);
}

bool BoundCheckReport::violated() const noexcept {
    return std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.violation; });
}

BoundCheckReport run_bound_check(const ExperimentConfig& config, double margin, int min_checked_order) {
    const auto term = config.function.single_exponential();
    if (!term) {
        throw ConfigError("bound-check needs a single-term exponential function ({\"terms\": [{\"c\":..,\"a\":[..]}]})");
    }
    if (!(margin >= 0.0)) {
        throw ConfigError("bound-check margin must be non-negative");
    }
    const auto grid = experiment_grid(config);
    BoundCheckReport report;
    report.margin = margin;
    report.min_checked_order = min_checked_order;
    for (int n : config.n_values) {
        const auto r = relative_error_report(config.simplex, term->direction, n, grid);
        BoundCheckRow row;
        row.n = n;
        row.predicted = r.predicted;
        if (term->coefficient != 0.0) {
            row.observed = r.observed;
        }
        if (row.observed == 0.0) {
            row.ratio = 0.0;
        } else if (row.predicted > 0.0) {
            row.ratio = row.observed / row.predicted;
        } else {
            // A non-positive K cannot bound a positive error.
            row.ratio = std::numeric_limits<double>::infinity();
        }
        row.violation = n >= min_checked_order && row.ratio > 1.0 + margin;
        report.rows.push_back(row);
    }
    return report;
}

std::vector<ScalingRow> run_scaling_study(const Simplex& base, std::span<const double> scales,
                                          std::span<const std::vector<double>> directions,
                                          std::span<const int> n_values, int m) {
    if (scales.empty() || directions.empty() || n_values.empty()) {
        throw ConfigError("scaling study needs at least one scale, direction and order");
    }
    std::vector<ScalingRow> rows;
    for (double scale : scales) {
        if (!(scale > 0.0)) {
            throw ConfigError("scale factors must be positive, got " + format_double(scale));
        }
        const auto simplex = base.scaled(scale);
        const auto grid = lattice_grid(simplex, m);
        for (std::size_t d = 0; d < directions.size(); ++d) {
            for (int n : n_values) {
                ScalingRow row;
                row.scale = scale;
                row.diameter = simplex.diameter();
                row.direction_index = d;
                row.direction_norm = vector_norm(directions[d]);
                row.n = n;
                row.sup_relative_error = relative_error_report(simplex, directions[d], n, grid).observed;
                rows.push_back(row);
            }
        }
    }
    return rows;
}

std::vector<ScalingRow> run_scaling_study(const ExperimentConfig& config, std::span<const double> scales) {
    auto directions = config.directions;
    if (directions.empty()) {
        const auto term = config.function.single_exponential();
        if (!term) {
            throw ConfigError("scaling study needs \"directions\" or a single-term exponential function");
        }
        directions.push_back(term->direction);
    }
    return run_scaling_study(config.simplex, scales, directions, config.n_values, config.grid_resolution);
}

void write_convergence_csv(std::ostream& os, std::span<const ConvergenceRow> rows, bool include_timing) {
    os << "n,sup_error,sup_relative_error,predicted_K_over_n,evaluator";
    if (include_timing) {
        os << ",wall_time_ms";
    }
    os << '\n';
    for (const auto& r : rows) {
        os << r.n << ',' << format_double(r.sup_error) << ',' << format_double(r.sup_relative_error) << ','
           << (r.predicted_k_over_n ? format_double(*r.predicted_k_over_n) : std::string()) << ','
           << to_string(r.evaluator);
        if (include_timing) {
            os << ',' << format_double(r.wall_time_ms);
        }
        os << '\n';
    }
}

std::vector<ConvergenceRow> read_convergence_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) {
        throw Error("convergence CSV is empty");
    }
    const auto header = split_csv_line(line);
    const bool timing = header.size() == 6;
    if (header.size() != 5 && !timing) {
        throw Error("convergence CSV header has an unexpected column count");
    }
    std::vector<ConvergenceRow> rows;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        const auto f = split_csv_line(line);
        if (f.size() != header.size()) {
            throw Error("convergence CSV line " + std::to_string(line_no) + ": wrong field count");
        }
        ConvergenceRow r;
        r.n = static_cast<int>(parse_double(f[0]));
        r.sup_error = parse_double(f[1]);
        r.sup_relative_error = parse_double(f[2]);
        if (!f[3].empty()) {
            r.predicted_k_over_n = parse_double(f[3]);
        }
        r.evaluator = evaluator_from_string(f[4]);
        if (timing) {
            r.wall_time_ms = parse_double(f[5]);
        }
        rows.push_back(r);
    }
    return rows;
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    writer(os);
    os.flush();
    if (!os) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

void emit_csv(std::span<const ConvergenceRow> rows, const std::filesystem::path& path, bool include_timing) {
    write_file(path, [&](std::ostream& os) { write_convergence_csv(os, rows, include_timing); });
}

void write_bound_check_csv(std::ostream& os, const BoundCheckReport& report) {
    os << "n,observed_relative_error,predicted_K_over_n,ratio,violation\n";
    for (const auto& r : report.rows) {
        os << r.n << ',' << format_double(r.observed) << ',' << format_double(r.predicted) << ','
           << format_double(r.ratio) << ',' << (r.violation ? 1 : 0) << '\n';
    }
}

void write_scaling_csv(std::ostream& os, std::span<const ScalingRow> rows) {
    os << "scale,diameter,direction_index,direction_norm,d_times_a,n,sup_relative_error\n";
    for (const auto& r : rows) {
        os << format_double(r.scale) << ',' << format_double(r.diameter) << ',' << r.direction_index << ','
           << format_double(r.direction_norm) << ',' << format_double(r.diameter * r.direction_norm) << ','
           << r.n << ',' << format_double(r.sup_relative_error) << '\n';
    }
}

}  // namespace bezsimplex
