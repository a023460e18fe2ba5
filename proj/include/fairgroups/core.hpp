#pragma once
// Domain types shared by every fairgroups module: samples, datasets, grids,
// partitions of the sensitive space and the group assignment they induce.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fairgroups {

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid arguments, configuration or dataset contents.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Mathematical domain violation (e.g. b* = 0 in the ITA formula).
class DomainError : public Error {
public:
    using Error::Error;
};

class OutOfRangeError : public Error {
public:
    OutOfRangeError(std::size_t sample_index, const std::string& what)
        : Error(what), index_(sample_index) {}
    std::size_t sample_index() const noexcept { return index_; }

private:
    std::size_t index_;
};

// No candidate partition satisfies the constraints (too many empty bins, ...).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what) : Error(what), line_(line) {}
    explicit ParseError(const std::string& what) : Error(what), line_(0) {}
    // 1-based line number, 0 when not tied to a line.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class UndefinedGroupError : public Error {
public:
    UndefinedGroupError(std::size_t group, const std::string& what) : Error(what), group_(group) {}
    std::size_t group() const noexcept { return group_; }

private:
    std::size_t group_;
};

// Non-fatal conditions are collected here when the caller asks for them.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message) {
    if (sink != nullptr) sink->push_back(std::move(message));
}

// ---------------------------------------------------------------------------
// Samples and datasets

enum class Target { Y, YHat, Score };

// Scores are turned into binary outcomes with 1{score > kScoreThreshold}.
inline constexpr double kScoreThreshold = 0.5;

inline std::string_view to_string(Target t) {
    switch (t) {
        case Target::Y: return "y";
        case Target::YHat: return "y_hat";
        case Target::Score: return "score";
    }
    return "y";
}

inline Target parse_target(std::string_view name) {
    if (name == "y") return Target::Y;
    if (name == "y_hat") return Target::YHat;
    if (name == "score") return Target::Score;
    throw ValidationError("unknown target '" + std::string(name) + "' (expected y, y_hat or score)");
}

struct Sample {
    std::array<double, 2> l{};  // sensitive attribute; only l[0] is used in 1D
    int y = 0;
    std::optional<double> score;
    std::optional<int> y_hat;

    bool operator==(const Sample&) const = default;
};

class Dataset {
public:
    Dataset(std::vector<Sample> samples, std::size_t dimension)
        : samples_(std::move(samples)), dimension_(dimension) {
        if (samples_.empty()) throw ValidationError("dataset is empty");
        if (dimension_ != 1 && dimension_ != 2)
            throw ValidationError("dataset dimension must be 1 or 2");
        has_score_ = samples_.front().score.has_value();
        has_y_hat_ = samples_.front().y_hat.has_value();
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            const Sample& s = samples_[i];
            for (std::size_t d = 0; d < dimension_; ++d) {
                if (!std::isfinite(s.l[d]))
                    throw ValidationError("sample " + std::to_string(i) + ": non-finite sensitive value");
            }
            if (s.y != 0 && s.y != 1)
                throw ValidationError("sample " + std::to_string(i) + ": y must be 0 or 1");
            if (s.score.has_value() != has_score_ || s.y_hat.has_value() != has_y_hat_)
                throw ValidationError("sample " + std::to_string(i) +
                                      ": score/y_hat presence differs from the first sample");
            if (s.score && !(*s.score >= 0.0 && *s.score <= 1.0))
                throw ValidationError("sample " + std::to_string(i) + ": score outside [0,1]");
            if (s.y_hat && *s.y_hat != 0 && *s.y_hat != 1)
                throw ValidationError("sample " + std::to_string(i) + ": y_hat must be 0 or 1");
        }
    }

    std::size_t size() const noexcept { return samples_.size(); }
    std::size_t dimension() const noexcept { return dimension_; }
    bool has_score() const noexcept { return has_score_; }
    bool has_y_hat() const noexcept { return has_y_hat_; }
    std::span<const Sample> samples() const noexcept { return samples_; }
    const Sample& operator[](std::size_t i) const { return samples_[i]; }

    bool has_target(Target t) const noexcept {
        switch (t) {
            case Target::Y: return true;
            case Target::YHat: return has_y_hat_;
            case Target::Score: return has_score_;
        }
        return false;
    }

    void require_target(Target t) const {
        if (!has_target(t))
            throw ValidationError("dataset has no '" + std::string(to_string(t)) + "' column");
    }

    // Binary outcome of sample i for the chosen target.
    int outcome(std::size_t i, Target t) const {
        const Sample& s = samples_[i];
        switch (t) {
            case Target::Y: return s.y;
            case Target::YHat: return *s.y_hat;
            case Target::Score: return *s.score > kScoreThreshold ? 1 : 0;
        }
        return s.y;
    }

    std::vector<int> outcomes(Target t) const {
        require_target(t);
        std::vector<int> out(size());
        for (std::size_t i = 0; i < size(); ++i) out[i] = outcome(i, t);
        return out;
    }

    std::vector<double> coordinate(std::size_t axis) const {
        std::vector<double> out(size());
        for (std::size_t i = 0; i < size(); ++i) out[i] = samples_[i].l[axis];
        return out;
    }

    std::vector<double> scores() const {
        require_target(Target::Score);
        std::vector<double> out(size());
        for (std::size_t i = 0; i < size(); ++i) out[i] = *samples_[i].score;
        return out;
    }

    bool operator==(const Dataset&) const = default;

private:
    std::vector<Sample> samples_;
    std::size_t dimension_;
    bool has_score_ = false;
    bool has_y_hat_ = false;
};

// ---------------------------------------------------------------------------
// Grid

// Ordered bin edges over one axis. Bin j (0-based) is [edges[j], edges[j+1]),
// except the last bin which is closed on the right.
class Grid {
public:
    explicit Grid(std::vector<double> edges) : edges_(std::move(edges)) {
        if (edges_.size() < 3) throw ValidationError("grid needs at least 2 bins");
        for (std::size_t j = 0; j < edges_.size(); ++j) {
            if (!std::isfinite(edges_[j])) throw ValidationError("grid edges must be finite");
            if (j > 0 && !(edges_[j] > edges_[j - 1]))
                throw ValidationError("grid edges must be strictly increasing");
        }
    }

    static Grid uniform(double lo, double hi, std::size_t bins) {
        if (bins < 2) throw ValidationError("grid needs at least 2 bins");
        if (!(hi > lo)) throw ValidationError("grid upper bound must exceed lower bound");
        std::vector<double> edges(bins + 1);
        const double step = (hi - lo) / static_cast<double>(bins);
        for (std::size_t j = 0; j <= bins; ++j) edges[j] = lo + static_cast<double>(j) * step;
        edges.back() = hi;
        return Grid(std::move(edges));
    }

    std::size_t bins() const noexcept { return edges_.size() - 1; }
    std::span<const double> edges() const noexcept { return edges_; }
    double edge(std::size_t j) const { return edges_[j]; }
    double lo() const noexcept { return edges_.front(); }
    double hi() const noexcept { return edges_.back(); }
    bool contains(double x) const noexcept { return x >= lo() && x <= hi(); }

    std::optional<std::size_t> bin_of(double x) const noexcept {
        if (!contains(x)) return std::nullopt;
        auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
        auto bin = static_cast<std::size_t>(it - edges_.begin()) - 1;
        return std::min(bin, bins() - 1);
    }

    std::size_t clamped_bin_of(double x) const noexcept {
        if (x < lo()) return 0;
        if (x > hi()) return bins() - 1;
        return *bin_of(x);
    }

    bool operator==(const Grid&) const = default;

private:
    std::vector<double> edges_;
};

// ---------------------------------------------------------------------------
// Partition

// Axis-aligned rectangle in bin indices: bins [x0, x1) x [y0, y1).
struct Rect {
    std::size_t x0 = 0, x1 = 0, y0 = 0, y1 = 0;

    bool operator==(const Rect&) const = default;
    bool contains_cell(std::size_t x, std::size_t y) const noexcept {
        return x >= x0 && x < x1 && y >= y0 && y < y1;
    }
};

struct Provenance {
    std::string method;
    std::string measure = "one_vs_all_di";
    std::string target = "y";
    std::optional<double> objective;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::string timestamp;
    std::string input;

    bool operator==(const Provenance&) const = default;
};

// K connected groups covering a 1D interval (segments, or bin-labelled groups
// when a heuristic produced disconnected clusters) or a 2D box (rectangles).
class Partition {
public:
    static Partition segments(Grid grid, std::vector<std::size_t> boundaries) {
        const std::size_t m = grid.bins();
        if (boundaries.size() < 2 || boundaries.front() != 0 || boundaries.back() != m)
            throw ValidationError("segment boundaries must start at 0 and end at the bin count");
        for (std::size_t i = 1; i < boundaries.size(); ++i) {
            if (boundaries[i] <= boundaries[i - 1])
                throw ValidationError("segment boundaries must be strictly increasing");
        }
        Partition p;
        p.k_ = boundaries.size() - 1;
        p.cell_labels_.resize(m);
        for (std::size_t g = 0; g < p.k_; ++g) {
            for (std::size_t j = boundaries[g]; j < boundaries[g + 1]; ++j) p.cell_labels_[j] = g;
        }
        p.boundaries_ = std::move(boundaries);
        p.axes_.push_back(std::move(grid));
        return p;
    }

    // Groups given per bin. Labels are renumbered in order of first appearance
    // from the left; segment boundaries are derived when every group is a run.
    static Partition labelled_bins(Grid grid, std::span<const std::size_t> bin_labels) {
        if (bin_labels.size() != grid.bins())
            throw ValidationError("one label per grid bin is required");
        std::vector<std::size_t> remap;
        std::vector<std::size_t> labels(bin_labels.size());
        std::size_t next = 0;
        for (std::size_t j = 0; j < bin_labels.size(); ++j) {
            const std::size_t raw = bin_labels[j];
            if (raw >= remap.size()) remap.resize(raw + 1, kUnset);
            if (remap[raw] == kUnset) remap[raw] = next++;
            labels[j] = remap[raw];
        }
        Partition p;
        p.k_ = next;
        p.cell_labels_ = std::move(labels);
        // Every group is a single run iff label changes exactly k-1 times.
        std::vector<std::size_t> bounds{0};
        for (std::size_t j = 1; j < p.cell_labels_.size(); ++j) {
            if (p.cell_labels_[j] != p.cell_labels_[j - 1]) bounds.push_back(j);
        }
        bounds.push_back(p.cell_labels_.size());
        if (bounds.size() == p.k_ + 1) p.boundaries_ = std::move(bounds);
        p.axes_.push_back(std::move(grid));
        return p;
    }

    static Partition rectangles(Grid x, Grid y, std::vector<Rect> rects) {
        const std::size_t mx = x.bins(), my = y.bins();
        if (rects.empty()) throw ValidationError("a 2D partition needs at least one rectangle");
        Partition p;
        p.k_ = rects.size();
        p.cell_labels_.assign(mx * my, kUnset);
        for (std::size_t g = 0; g < rects.size(); ++g) {
            const Rect& r = rects[g];
            if (!(r.x0 < r.x1 && r.x1 <= mx && r.y0 < r.y1 && r.y1 <= my))
                throw ValidationError("rectangle " + std::to_string(g) + " is empty or outside the grid");
            for (std::size_t i = r.x0; i < r.x1; ++i) {
                for (std::size_t j = r.y0; j < r.y1; ++j) {
                    std::size_t& cell = p.cell_labels_[i * my + j];
                    if (cell != kUnset) throw ValidationError("rectangles overlap");
                    cell = g;
                }
            }
        }
        if (std::find(p.cell_labels_.begin(), p.cell_labels_.end(), kUnset) != p.cell_labels_.end())
            throw ValidationError("rectangles do not cover the grid box");
        p.rects_ = std::move(rects);
        p.axes_.push_back(std::move(x));
        p.axes_.push_back(std::move(y));
        return p;
    }

    std::size_t dimension() const noexcept { return axes_.size(); }
    std::size_t group_count() const noexcept { return k_; }
    const Grid& axis(std::size_t i) const { return axes_.at(i); }
    std::span<const Grid> axes() const noexcept { return axes_; }

    // True for 1D partitions whose groups are connected segments.
    bool is_segmented() const noexcept { return dimension() == 1 && !boundaries_.empty(); }

    std::span<const std::size_t> boundaries() const {
        if (!is_segmented()) throw ValidationError("partition is not made of segments");
        return boundaries_;
    }

    std::span<const std::size_t> bin_labels() const {
        if (dimension() != 1) throw ValidationError("bin labels exist only for 1D partitions");
        return cell_labels_;
    }

    std::span<const Rect> rects() const {
        if (dimension() != 2) throw ValidationError("rectangles exist only for 2D partitions");
        return rects_;
    }

    // Group of a point, or nullopt when the point lies outside the cover.
    std::optional<std::size_t> group_of(std::span<const double> point) const {
        if (dimension() == 1) {
            auto b = axes_[0].bin_of(point[0]);
            if (!b) return std::nullopt;
            return cell_labels_[*b];
        }
        auto bx = axes_[0].bin_of(point[0]);
        auto by = axes_[1].bin_of(point[1]);
        if (!bx || !by) return std::nullopt;
        return cell_labels_[*bx * axes_[1].bins() + *by];
    }

    // Same, but points outside the cover go to the nearest boundary cell.
    std::size_t clamped_group_of(std::span<const double> point) const {
        if (dimension() == 1) return cell_labels_[axes_[0].clamped_bin_of(point[0])];
        return cell_labels_[axes_[0].clamped_bin_of(point[0]) * axes_[1].bins() +
                            axes_[1].clamped_bin_of(point[1])];
    }

    // Structural equality, ignoring provenance.
    bool same_groups(const Partition& o) const {
        return axes_ == o.axes_ && k_ == o.k_ && cell_labels_ == o.cell_labels_ && rects_ == o.rects_;
    }

    bool operator==(const Partition& o) const { return same_groups(o) && provenance == o.provenance; }

    Provenance provenance;

private:
    static constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();

    Partition() = default;

    std::vector<Grid> axes_;
    std::size_t k_ = 0;
    std::vector<std::size_t> cell_labels_;  // 1D: per bin; 2D: row-major over (x, y) cells
    std::vector<std::size_t> boundaries_;   // 1D segments only
    std::vector<Rect> rects_;                // 2D only
};

// ---------------------------------------------------------------------------
// Group assignment

struct GroupAssignment {
    std::vector<std::size_t> labels;     // per sample, 0-based group index
    std::vector<std::size_t> counts;     // n_k
    std::vector<std::size_t> positives;  // n_k^+ for the assignment's target
    std::size_t total = 0;               // N
    std::size_t positives_total = 0;     // N^+
    std::size_t clamped = 0;             // samples moved into a boundary group

    std::size_t group_count() const noexcept { return counts.size(); }
};

enum class OutOfRange { Error, Clamp };

inline GroupAssignment assign_groups(const Dataset& data, const Partition& partition,
                                     Target target = Target::Y,
                                     OutOfRange policy = OutOfRange::Error,
                                     Warnings* warnings = nullptr) {
    if (data.dimension() != partition.dimension())
        throw ValidationError("partition dimension " + std::to_string(partition.dimension()) +
                              " does not match dataset dimension " + std::to_string(data.dimension()));
    data.require_target(target);
    const std::size_t k = partition.group_count();
    GroupAssignment a;
    a.labels.resize(data.size());
    a.counts.assign(k, 0);
    a.positives.assign(k, 0);
    a.total = data.size();
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::span<const double> point(data[i].l.data(), data.dimension());
        std::size_t g;
        if (auto found = partition.group_of(point)) {
            g = *found;
        } else if (policy == OutOfRange::Clamp) {
            g = partition.clamped_group_of(point);
            ++a.clamped;
        } else {
            throw OutOfRangeError(i, "sample " + std::to_string(i) + " lies outside the partition cover");
        }
        const int y = data.outcome(i, target);
        a.labels[i] = g;
        ++a.counts[g];
        a.positives[g] += static_cast<std::size_t>(y);
        a.positives_total += static_cast<std::size_t>(y);
    }
    if (a.clamped > 0)
        warn(warnings, std::to_string(a.clamped) + " sample(s) outside the partition cover were clamped");
    return a;
}

// ---------------------------------------------------------------------------
// Per-group statistics (computed in metrics.hpp)

struct GroupStat {
    std::size_t count = 0;
    std::size_t positives = 0;
    double weight = 0.0;  // n_k / N
    double rate = 0.0;    // n_k^+ / n_k
    double phi = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct GroupStats {
    std::vector<GroupStat> groups;
    double overall_rate = 0.0;
    double level = 0.95;
};

}  // namespace fairgroups
