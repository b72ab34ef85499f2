#include "bezsimplex/lattice.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>

#include "bezsimplex/csv.hpp"
#include "bezsimplex/errors.hpp"

namespace bezsimplex {

namespace {

constexpr int kLogFactorialTableSize = 1025;

double log_gamma_plus_one(int m) {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(static_cast<double>(m) + 1.0, &sign);
#else
    return std::lgamma(static_cast<double>(m) + 1.0);
#endif
}

const std::vector<double>& log_factorial_table() {
    static const std::vector<double> table = [] {
        std::vector<double> t(kLogFactorialTableSize);
        for (int m = 0; m < kLogFactorialTableSize; ++m) {
            t[static_cast<std::size_t>(m)] = log_gamma_plus_one(m);
        }
        t[0] = 0.0;
        t[1] = 0.0;
        return t;
    }();
    return table;
}

double log_factorial(int m) {
    const auto& table = log_factorial_table();
    if (m < kLogFactorialTableSize) {
        return table[static_cast<std::size_t>(m)];
    }
    return log_gamma_plus_one(m);
}

// binomial(m + d, d) = number of (k_1..k_d) >= 0 with sum <= m.
std::uint64_t bounded_count(int m, std::size_t d) {
    constexpr auto saturated = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= d; ++i) {
        // r * (m + i) is divisible by i; split the division so nothing overflows early.
        const std::uint64_t g = std::gcd(r, i);
        const std::uint64_t factor = (static_cast<std::uint64_t>(m) + i) / (i / g);
        if (__builtin_mul_overflow(r / g, factor, &r)) {
            return saturated;
        }
    }
    return r;
}

void check_order(int n) {
    if (n < 0) {
        throw Error("multi-index order must be non-negative, got " + std::to_string(n));
    }
}

void check_dimension(std::size_t dimension) {
    if (dimension == 0) {
        throw DimensionMismatch("simplex dimension must be positive");
    }
}

std::size_t checked_lattice_size(int n, std::size_t dimension) {
    check_order(n);
    check_dimension(dimension);
    const auto size = lattice_size(n, dimension);
    if (size > kMaxLatticeSize) {
        throw SizeOverflow("multi-index set of order " + std::to_string(n) + " in dimension " +
                           std::to_string(dimension) + " has " + std::to_string(size) +
                           " entries, above the cap of " + std::to_string(kMaxLatticeSize));
    }
    return static_cast<std::size_t>(size);
}

// Calls visit(k) for each k in colex order; k has length D+1 and is reused.
template <typename Visit>
void for_each_multi_index(int n, std::size_t dimension, Visit&& visit) {
    std::vector<int> k(dimension + 1, 0);
    k[0] = n;
    int tail = 0;  // k_1 + ... + k_D
    while (true) {
        visit(std::span<const int>(k));
        std::size_t j = 1;
        while (j <= dimension) {
            if (tail < n) {
                ++k[j];
                ++tail;
                break;
            }
            tail -= k[j];
            k[j] = 0;
            ++j;
        }
        if (j > dimension) {
            return;
        }
        k[0] = n - tail;
    }
}

}  // namespace

MultiIndex::MultiIndex(std::vector<int> entries) : k_(std::move(entries)) {
    if (k_.size() < 2) {
        throw DimensionMismatch("a multi-index needs at least two entries");
    }
    for (int kj : k_) {
        if (kj < 0) {
            throw Error("multi-index entries must be non-negative");
        }
        order_ += kj;
    }
}

MultiIndex::MultiIndex(std::initializer_list<int> entries) : MultiIndex(std::vector<int>(entries)) {}

std::ostream& operator<<(std::ostream& os, const MultiIndex& k) {
    os << '(';
    for (std::size_t j = 0; j < k.size(); ++j) {
        os << (j ? "," : "") << k[j];
    }
    return os << ')';
}

std::uint64_t lattice_size(int n, std::size_t dimension) {
    check_order(n);
    check_dimension(dimension);
    return bounded_count(n, dimension);
}

std::vector<MultiIndex> enumerate_multi_indices(int n, std::size_t dimension) {
    std::vector<MultiIndex> out;
    out.reserve(checked_lattice_size(n, dimension));
    for_each_multi_index(n, dimension, [&](std::span<const int> k) {
        out.emplace_back(std::vector<int>(k.begin(), k.end()));
    });
    return out;
}

std::size_t colex_rank(std::span<const int> k) {
    if (k.size() < 2) {
        throw DimensionMismatch("a multi-index needs at least two entries");
    }
    int remaining = std::accumulate(k.begin(), k.end(), 0);
    std::uint64_t rank = 0;
    for (std::size_t d = k.size() - 1; d >= 1; --d) {
        // Indices with a smaller d-th entry v come first, each leaving
        // binomial(remaining - v + d - 1, d - 1) choices for k_1..k_{d-1};
        // the hockey-stick identity sums them over v < k_d.
        rank += bounded_count(remaining, d) - bounded_count(remaining - k[d], d);
        remaining -= k[d];
    }
    return static_cast<std::size_t>(rank);
}

double multinomial_log(const MultiIndex& k) { return multinomial_log(k.entries()); }

double multinomial_log(std::span<const int> k) {
    int n = 0;
    double denominator = 0.0;
    for (int kj : k) {
        n += kj;
        denominator += log_factorial(kj);
    }
    return log_factorial(n) - denominator;
}

boost::multiprecision::cpp_int multinomial_exact(const MultiIndex& k) {
    if (k.order() > kMaxExactOrder) {
        throw SizeOverflow("exact multinomial supports order <= " + std::to_string(kMaxExactOrder) + ", got " +
                           std::to_string(k.order()));
    }
    using boost::multiprecision::cpp_int;
    auto factorial = [](int m) {
        cpp_int f = 1;
        for (int i = 2; i <= m; ++i) {
            f *= i;
        }
        return f;
    };
    cpp_int denominator = 1;
    for (int kj : k.entries()) {
        denominator *= factorial(kj);
    }
    return factorial(k.order()) / denominator;
}

Lattice::Lattice(int n, std::size_t dimension) : order_(n), dimension_(dimension) {
    const auto size = checked_lattice_size(n, dimension);
    flat_.reserve(size * (dimension + 1));
    log_multinomials_.reserve(size);
    for_each_multi_index(n, dimension, [&](std::span<const int> k) {
        flat_.insert(flat_.end(), k.begin(), k.end());
        log_multinomials_.push_back(multinomial_log(k));
    });
}

std::shared_ptr<const Lattice> shared_lattice(int n, std::size_t dimension) {
    static std::mutex mutex;
    static std::map<std::pair<int, std::size_t>, std::shared_ptr<const Lattice>> cache;
    const std::lock_guard lock(mutex);
    auto& slot = cache[{n, dimension}];
    if (!slot) {
        slot = std::make_shared<const Lattice>(n, dimension);
    }
    return slot;
}

std::vector<Point> ControlPointSet::points() const {
    std::vector<Point> out;
    out.reserve(entries_.size());
    for (const auto& [k, x] : entries_) {
        out.push_back(x);
    }
    return out;
}

ControlPointSet control_points(const Simplex& s, int n) {
    if (n < 1) {
        throw Error("control points need order n >= 1, got " + std::to_string(n));
    }
    const auto dimension = s.dimension();
    std::vector<std::pair<MultiIndex, Point>> entries;
    entries.reserve(checked_lattice_size(n, dimension));
    std::vector<double> t(dimension + 1);
    for_each_multi_index(n, dimension, [&](std::span<const int> k) {
        for (std::size_t j = 0; j <= dimension; ++j) {
            t[j] = static_cast<double>(k[j]) / n;
        }
        entries.emplace_back(MultiIndex(std::vector<int>(k.begin(), k.end())), s.point_from_barycentric(t));
    });
    return ControlPointSet(n, std::move(entries));
}

void write_control_points_csv(std::ostream& os, const ControlPointSet& set) {
    if (set.size() == 0) {
        return;
    }
    const auto& first = set.entries().front();
    const std::size_t dimension = first.second.dimension();
    for (std::size_t j = 0; j <= dimension; ++j) {
        os << (j ? "," : "") << "k_" << j;
    }
    for (std::size_t i = 1; i <= dimension; ++i) {
        os << ",x_" << i;
    }
    os << '\n';
    for (const auto& [k, x] : set.entries()) {
        for (std::size_t j = 0; j < k.size(); ++j) {
            os << (j ? "," : "") << k[j];
        }
        for (double c : x.coords()) {
            os << ',' << format_double(c);
        }
        os << '\n';
    }
}

}  // namespace bezsimplex
