#pragma once
// Range statistics over grid bins: all-interval sums in O(M^2), the matrix of
// one-vs-all deviations for every interval, and 2D summed-area tables.

#include <cstddef>
#include <span>
#include <vector>

#include "fairgroups/core.hpp"

namespace fairgroups {

inline constexpr std::size_t kMaxBins1D = 4096;
inline constexpr std::size_t kMaxBins2D = 512;

// M x M upper-triangular table; entry (first, last) is the sum of the per-bin
// values over bins first..last inclusive (0-based). The strict lower triangle is 0.
class RangeSumTable {
public:
    explicit RangeSumTable(std::size_t bins) : bins_(bins), data_(bins * bins, 0.0) {}

    std::size_t bins() const noexcept { return bins_; }
    double operator()(std::size_t first, std::size_t last) const noexcept {
        return data_[first * bins_ + last];
    }
    double& at(std::size_t first, std::size_t last) noexcept { return data_[first * bins_ + last]; }

    bool operator==(const RangeSumTable&) const = default;

private:
    std::size_t bins_;
    std::vector<double> data_;
};

// First row by running sums, every later row by dropping the leftmost bin of
// the row above.
inline RangeSumTable count_on_all_ranges(std::span<const double> sum_by_bin) {
    const std::size_t m = sum_by_bin.size();
    if (m == 0) throw ValidationError("count_on_all_ranges needs at least one bin");
    RangeSumTable table(m);
    table.at(0, 0) = sum_by_bin[0];
    for (std::size_t last = 1; last < m; ++last)
        table.at(0, last) = table(0, last - 1) + sum_by_bin[last];
    for (std::size_t first = 1; first < m; ++first) {
        for (std::size_t last = first; last < m; ++last)
            table.at(first, last) = table(first - 1, last) - sum_by_bin[first - 1];
    }
    return table;
}

// Per-bin sample and positive counts of a 1D dataset on a grid.
struct BinCounts {
    std::vector<double> counts;
    std::vector<double> positives;
};

inline BinCounts bin_counts(const Dataset& data, const Grid& grid, Target target, std::size_t axis = 0) {
    data.require_target(target);
    BinCounts out{std::vector<double>(grid.bins(), 0.0), std::vector<double>(grid.bins(), 0.0)};
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto b = grid.bin_of(data[i].l[axis]);
        if (!b) throw OutOfRangeError(i, "sample " + std::to_string(i) + " lies outside the grid");
        out.counts[*b] += 1.0;
        out.positives[*b] += data.outcome(i, target);
    }
    return out;
}

// Interval statistics for every pair of bins (first <= last): count, positive
// count, weight P(L in interval) and psi = P(Y=1 | L in interval) - P(Y=1).
// Intervals without samples are undefined; psi() is meaningless there.
class PsiMatrix {
public:
    PsiMatrix(std::span<const double> counts_by_bin, std::span<const double> positives_by_bin)
        : counts_(count_on_all_ranges(counts_by_bin)),
          positives_(count_on_all_ranges(positives_by_bin)),
          psi_(counts_by_bin.size() * counts_by_bin.size(), 0.0),
          weight_(counts_by_bin.size() * counts_by_bin.size(), 0.0) {
        const std::size_t m = bins();
        total_ = counts_(0, m - 1);
        positives_total_ = positives_(0, m - 1);
        if (total_ <= 0.0) throw ValidationError("psi matrix needs at least one sample");
        overall_rate_ = positives_total_ / total_;
        for (std::size_t first = 0; first < m; ++first) {
            for (std::size_t last = first; last < m; ++last) {
                const double c = counts_(first, last);
                weight_[first * m + last] = c / total_;
                if (c > 0.0) psi_[first * m + last] = positives_(first, last) / c - overall_rate_;
            }
        }
    }

    std::size_t bins() const noexcept { return counts_.bins(); }
    double total() const noexcept { return total_; }
    double positives_total() const noexcept { return positives_total_; }
    double overall_rate() const noexcept { return overall_rate_; }

    bool defined(std::size_t first, std::size_t last) const noexcept { return counts_(first, last) > 0.0; }
    double count(std::size_t first, std::size_t last) const noexcept { return counts_(first, last); }
    double positives(std::size_t first, std::size_t last) const noexcept { return positives_(first, last); }
    double weight(std::size_t first, std::size_t last) const noexcept { return weight_[first * bins() + last]; }
    double psi(std::size_t first, std::size_t last) const noexcept { return psi_[first * bins() + last]; }

    std::optional<double> psi_if_defined(std::size_t first, std::size_t last) const noexcept {
        if (!defined(first, last)) return std::nullopt;
        return psi(first, last);
    }

    // Per-bin values psi_j: the diagonal.
    std::vector<std::optional<double>> diagonal() const {
        std::vector<std::optional<double>> out(bins());
        for (std::size_t j = 0; j < bins(); ++j) out[j] = psi_if_defined(j, j);
        return out;
    }

    const RangeSumTable& counts() const noexcept { return counts_; }
    const RangeSumTable& positive_counts() const noexcept { return positives_; }

private:
    RangeSumTable counts_;
    RangeSumTable positives_;
    std::vector<double> psi_;
    std::vector<double> weight_;
    double total_ = 0.0;
    double positives_total_ = 0.0;
    double overall_rate_ = 0.0;
};

inline PsiMatrix psi_matrix(const Dataset& data, const Grid& grid, Target target) {
    if (data.dimension() != 1) throw ValidationError("psi_matrix requires a 1D dataset");
    if (grid.bins() > kMaxBins1D) throw ValidationError("grid exceeds the 1D bin cap");
    const BinCounts bc = bin_counts(data, grid, target);
    return PsiMatrix(bc.counts, bc.positives);
}

// Summed-area tables of counts and positives on a 2D grid; any rectangle of
// cells is answered by four-corner inclusion-exclusion.
class RectPrefixSums {
public:
    RectPrefixSums(const Dataset& data, const Grid& x, const Grid& y, Target target)
        : mx_(x.bins()), my_(y.bins()), count_((mx_ + 1) * (my_ + 1), 0.0),
          positive_((mx_ + 1) * (my_ + 1), 0.0) {
        if (data.dimension() != 2) throw ValidationError("rectangle prefix sums require a 2D dataset");
        if (mx_ > kMaxBins2D || my_ > kMaxBins2D) throw ValidationError("grid exceeds the 2D bin cap");
        data.require_target(target);
        for (std::size_t i = 0; i < data.size(); ++i) {
            auto bx = x.bin_of(data[i].l[0]);
            auto by = y.bin_of(data[i].l[1]);
            if (!bx || !by) throw OutOfRangeError(i, "sample " + std::to_string(i) + " lies outside the grid");
            count_[idx(*bx + 1, *by + 1)] += 1.0;
            positive_[idx(*bx + 1, *by + 1)] += data.outcome(i, target);
        }
        for (std::size_t i = 1; i <= mx_; ++i) {
            for (std::size_t j = 1; j <= my_; ++j) {
                count_[idx(i, j)] += count_[idx(i - 1, j)] + count_[idx(i, j - 1)] - count_[idx(i - 1, j - 1)];
                positive_[idx(i, j)] +=
                    positive_[idx(i - 1, j)] + positive_[idx(i, j - 1)] - positive_[idx(i - 1, j - 1)];
            }
        }
    }

    std::size_t bins_x() const noexcept { return mx_; }
    std::size_t bins_y() const noexcept { return my_; }
    double count(const Rect& r) const noexcept { return query(count_, r); }
    double positives(const Rect& r) const noexcept { return query(positive_, r); }
    double total() const noexcept { return count_[idx(mx_, my_)]; }
    double positives_total() const noexcept { return positive_[idx(mx_, my_)]; }

private:
    std::size_t idx(std::size_t i, std::size_t j) const noexcept { return i * (my_ + 1) + j; }

    double query(const std::vector<double>& t, const Rect& r) const noexcept {
        return t[idx(r.x1, r.y1)] - t[idx(r.x0, r.y1)] - t[idx(r.x1, r.y0)] + t[idx(r.x0, r.y0)];
    }

    std::size_t mx_, my_;
    std::vector<double> count_;
    std::vector<double> positive_;
};

inline RectPrefixSums rect_prefix_sums(const Dataset& data, const Grid& x, const Grid& y,
                                       Target target = Target::Y) {
    return RectPrefixSums(data, x, y, target);
}

}  // namespace fairgroups
