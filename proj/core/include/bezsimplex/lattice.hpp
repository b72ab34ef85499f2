#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bezsimplex/geometry.hpp"

namespace bezsimplex {

/// Largest multi-index set the library will materialize.
inline constexpr std::uint64_t kMaxLatticeSize = 100'000'000;

/// Largest order accepted by multinomial_exact.
inline constexpr int kMaxExactOrder = 60;

/// D+1 non-negative integers k_0..k_D; the order is their sum.
class MultiIndex {
public:
    explicit MultiIndex(std::vector<int> entries);
    MultiIndex(std::initializer_list<int> entries);

    [[nodiscard]] std::size_t size() const noexcept { return k_.size(); }
    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] std::span<const int> entries() const noexcept { return k_; }
    [[nodiscard]] int operator[](std::size_t j) const { return k_[j]; }

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

private:
    std::vector<int> k_;
    int order_ = 0;
};

std::ostream& operator<<(std::ostream& os, const MultiIndex& k);

/// binomial(n + D, D), saturating at UINT64_MAX.
[[nodiscard]] std::uint64_t lattice_size(int n, std::size_t dimension);

/// All k with |k| = n, colexicographic on (k_1, ..., k_D) with k_0 = n - sum.
///
/// k_1 varies fastest, k_D slowest. For n = 2, D = 1 this yields
/// (2,0), (1,1), (0,2). Throws SizeOverflow above kMaxLatticeSize entries.
[[nodiscard]] std::vector<MultiIndex> enumerate_multi_indices(int n, std::size_t dimension);

/// Position of k in enumerate_multi_indices(k.order(), k.size() - 1).
[[nodiscard]] std::size_t colex_rank(std::span<const int> k);

/// log(n! / prod k_j!) through a log-factorial table.
[[nodiscard]] double multinomial_log(const MultiIndex& k);
[[nodiscard]] double multinomial_log(std::span<const int> k);

/// Exact n! / prod k_j! for n <= kMaxExactOrder.
[[nodiscard]] boost::multiprecision::cpp_int multinomial_exact(const MultiIndex& k);

/// Enumerated M_n together with the log multinomial of each entry.
///
/// Built once per (n, D) and shared; see shared_lattice.
class Lattice {
public:
    Lattice(int n, std::size_t dimension);

    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
    [[nodiscard]] std::size_t size() const noexcept { return log_multinomials_.size(); }

    /// Entries of the i-th multi-index (length D+1).
    [[nodiscard]] std::span<const int> index(std::size_t i) const {
        return {flat_.data() + i * (dimension_ + 1), dimension_ + 1};
    }
    [[nodiscard]] double log_multinomial(std::size_t i) const { return log_multinomials_[i]; }

private:
    int order_;
    std::size_t dimension_;
    std::vector<int> flat_;
    std::vector<double> log_multinomials_;
};

/// Process-wide cache of lattices; thread-safe.
[[nodiscard]] std::shared_ptr<const Lattice> shared_lattice(int n, std::size_t dimension);

/// Control points R(k/n) for every k in M_n, in enumeration order.
class ControlPointSet {
public:
    ControlPointSet(int n, std::vector<std::pair<MultiIndex, Point>> entries)
        : order_(n), entries_(std::move(entries)) {}

    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] const std::vector<std::pair<MultiIndex, Point>>& entries() const noexcept { return entries_; }
    [[nodiscard]] std::vector<Point> points() const;

private:
    int order_;
    std::vector<std::pair<MultiIndex, Point>> entries_;
};

[[nodiscard]] ControlPointSet control_points(const Simplex& s, int n);

/// CSV with header k_0..k_D,x_1..x_D; shortest round-trip decimal formatting.
void write_control_points_csv(std::ostream& os, const ControlPointSet& set);

}  // namespace bezsimplex
