#pragma once
// Score post-processing by optimal transport: each group's score distribution
// is moved toward the Wasserstein-1 barycenter of all groups, as far as needed
// to bring every pair of groups within alpha of each other in quantile space.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairgroups/core.hpp"
#include "fairgroups/metrics.hpp"
#include "fairgroups/synth.hpp"

namespace fairgroups {

struct BarycenterSpec {
    std::size_t resolution = 512;  // quantile grid u_i = i / (R - 1), i = 0..R-1
};

struct GroupTransport {
    std::size_t count = 0;
    double weight = 0.0;
    std::vector<double> source;  // Q_k on the grid
    std::vector<double> target;  // Q_k^alpha on the grid

    bool operator==(const GroupTransport&) const = default;
};

struct TransportMap {
    double alpha = 1.0;
    double t = 0.0;        // interpolation toward the barycenter
    double max_gap = 0.0;  // D = max over pairs and u of |Q_k(u) - Q_k'(u)|
    std::size_t resolution = 512;
    std::vector<double> barycenter;
    std::vector<GroupTransport> groups;

    bool operator==(const TransportMap&) const = default;
};

// Type-7 empirical quantiles of sorted values at u_i = i / (R - 1).
inline std::vector<double> quantile_grid(std::span<const double> sorted, std::size_t resolution) {
    const std::size_t n = sorted.size();
    std::vector<double> q(resolution);
    for (std::size_t i = 0; i < resolution; ++i) {
        const double h = static_cast<double>(n - 1) * static_cast<double>(i) / static_cast<double>(resolution - 1);
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, n - 1);
        q[i] = sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    }
    return q;
}

// Weighted median of values with integer weights; an exact half split
// resolves to the lower value.
inline double weighted_median(std::span<const double> values, std::span<const std::size_t> counts) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    std::size_t cum = 0;
    for (std::size_t i : order) {
        cum += counts[i];
        if (2 * cum >= total) return values[i];
    }
    return values[order.back()];
}

inline TransportMap fit_postprocessor(std::span<const double> scores, std::span<const std::size_t> labels,
                                      std::size_t group_count, double alpha, const BarycenterSpec& spec = {}) {
    if (scores.size() != labels.size()) throw ValidationError("scores and group labels differ in length");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [0,1]");
    if (spec.resolution < 16) throw ValidationError("quantile grid resolution must be at least 16");
    if (group_count < 1) throw ValidationError("at least one group is required");

    std::vector<std::vector<double>> by_group(group_count);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] >= group_count) throw ValidationError("group label " + std::to_string(labels[i]) + " out of range");
        if (!(scores[i] >= 0.0 && scores[i] <= 1.0)) throw ValidationError("scores must lie in [0,1]");
        by_group[labels[i]].push_back(scores[i]);
    }

    TransportMap map;
    map.alpha = alpha;
    map.resolution = spec.resolution;
    map.groups.resize(group_count);
    std::vector<std::size_t> counts(group_count);
    for (std::size_t k = 0; k < group_count; ++k) {
        auto& v = by_group[k];
        std::sort(v.begin(), v.end());
        if (v.empty() || v.front() == v.back())
            throw ValidationError("group " + std::to_string(k) + " has fewer than 2 distinct scores");
        counts[k] = v.size();
        map.groups[k].count = v.size();
        map.groups[k].weight = static_cast<double>(v.size()) / static_cast<double>(scores.size());
        map.groups[k].source = quantile_grid(v, spec.resolution);
    }

    map.barycenter.resize(spec.resolution);
    std::vector<double> column(group_count);
    for (std::size_t i = 0; i < spec.resolution; ++i) {
        double lo = 1.0, hi = 0.0;
        for (std::size_t k = 0; k < group_count; ++k) {
            column[k] = map.groups[k].source[i];
            lo = std::min(lo, column[k]);
            hi = std::max(hi, column[k]);
        }
        map.max_gap = std::max(map.max_gap, hi - lo);
        map.barycenter[i] = weighted_median(column, counts);
    }

    map.t = map.max_gap <= alpha ? 0.0 : 1.0 - alpha / map.max_gap;
    for (auto& g : map.groups) {
        g.target.resize(spec.resolution);
        for (std::size_t i = 0; i < spec.resolution; ++i)
            g.target[i] = std::clamp((1.0 - map.t) * g.source[i] + map.t * map.barycenter[i], 0.0, 1.0);
    }
    return map;
}

inline TransportMap fit_postprocessor(std::span<const double> scores, const GroupAssignment& assignment, double alpha,
                                      const BarycenterSpec& spec = {}) {
    return fit_postprocessor(scores, assignment.labels, assignment.group_count(), alpha, spec);
}

namespace detail {

// Grid position u of a score under a piecewise-linear quantile function. A
// score hitting a flat run maps to the middle of the run.
inline double grid_position(std::span<const double> q, double s) {
    const auto first = static_cast<std::size_t>(std::lower_bound(q.begin(), q.end(), s) - q.begin());
    const auto past = static_cast<std::size_t>(std::upper_bound(q.begin(), q.end(), s) - q.begin());
    if (past > first) return (static_cast<double>(first) + static_cast<double>(past - 1)) / 2.0;
    // q[first - 1] < s < q[first]
    return static_cast<double>(first - 1) + (s - q[first - 1]) / (q[first] - q[first - 1]);
}

inline double grid_value(std::span<const double> q, double pos) {
    const auto i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= q.size()) return q.back();
    const double f = pos - static_cast<double>(i);
    return q[i] + f * (q[i + 1] - q[i]);
}

}  // namespace detail

// Q_k^alpha(F_k(score)). Scores outside the group's fitted range keep their
// offset from the nearest end of the range, so alpha = 1 is the identity.
inline double apply_postprocessor(const TransportMap& map, double score, std::size_t group) {
    if (group >= map.groups.size()) throw ValidationError("unknown group " + std::to_string(group));
    const GroupTransport& g = map.groups[group];
    const double s = std::clamp(score, 0.0, 1.0);
    double out;
    if (s <= g.source.front()) {
        out = g.target.front() + (s - g.source.front());
    } else if (s >= g.source.back()) {
        out = g.target.back() + (s - g.source.back());
    } else {
        out = detail::grid_value(g.target, detail::grid_position(g.source, s));
    }
    return std::clamp(out, 0.0, 1.0);
}

// Batch form. Labels outside the fitted groups pass through unchanged with a warning.
inline std::vector<double> transform_scores(const TransportMap& map, std::span<const double> scores,
                                            std::span<const std::size_t> labels, Warnings* warnings = nullptr) {
    if (scores.size() != labels.size()) throw ValidationError("scores and group labels differ in length");
    std::vector<double> out(scores.size());
    bool unseen = false;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] >= map.groups.size()) {
            out[i] = scores[i];
            unseen = true;
            continue;
        }
        out[i] = apply_postprocessor(map, scores[i], labels[i]);
    }
    if (unseen) warn(warnings, "samples from groups unseen at fit time were left unchanged");
    return out;
}

struct DebiasOptions {
    BarycenterSpec spec;
    double train_fraction = 0.5;
    std::uint64_t seed = 0;
    std::size_t hgr_bins = 20;
};

struct DebiasRow {
    std::optional<double> alpha;  // empty for the unprocessed baseline
    double t = 0.0;
    double accuracy = 0.0;
    double pr_auc = 0.0;
    double hgr = 0.0;
};

struct DebiasReport {
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    std::vector<DebiasRow> rows;
    Warnings warnings;
};

// Equal-frequency codes of the sensitive attribute. In 2D each axis gets
// ceil(sqrt(bins)) bins and the codes are combined.
inline std::vector<std::size_t> sensitive_codes(const Dataset& data, std::span<const std::size_t> rows,
                                                std::size_t bins) {
    std::vector<double> x(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) x[i] = data[rows[i]].l[0];
    if (data.dimension() == 1) return equal_frequency_codes(x, bins);
    const auto per_axis = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(bins))));
    std::vector<double> y(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) y[i] = data[rows[i]].l[1];
    auto cx = equal_frequency_codes(x, per_axis);
    const auto cy = equal_frequency_codes(y, per_axis);
    for (std::size_t i = 0; i < cx.size(); ++i) cx[i] = cx[i] * per_axis + cy[i];
    return cx;
}

// Fits on a random train split and reports accuracy of 1{score' > 0.5},
// PR-AUC and HGR(score', L) on the held-out split: first the raw scores,
// then one row per alpha.
inline DebiasReport debias_report(const Dataset& data, const Partition& partition, std::span<const double> alphas,
                                  const DebiasOptions& options = {}) {
    if (!data.has_score()) throw ValidationError("debiasing needs a score column");
    if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0))
        throw ValidationError("train fraction must lie in (0,1)");
    DebiasReport report;
    const GroupAssignment groups = assign_groups(data, partition, Target::Y, OutOfRange::Clamp, &report.warnings);

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(options.seed);
    shuffle(order, rng);
    const auto train_n = static_cast<std::size_t>(std::floor(options.train_fraction * static_cast<double>(data.size())));
    if (train_n == 0 || train_n == data.size()) throw ValidationError("dataset too small to split");
    std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_n));
    std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(train_n), order.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    report.train_size = train.size();
    report.test_size = test.size();

    auto gather = [&](const std::vector<std::size_t>& rows, std::vector<double>& s, std::vector<std::size_t>& g,
                      std::vector<int>& y) {
        for (std::size_t i : rows) {
            s.push_back(*data[i].score);
            g.push_back(groups.labels[i]);
            y.push_back(data[i].y);
        }
    };
    std::vector<double> train_s, test_s;
    std::vector<std::size_t> train_g, test_g;
    std::vector<int> train_y, test_y;
    gather(train, train_s, train_g, train_y);
    gather(test, test_s, test_g, test_y);
    const std::vector<std::size_t> l_codes = sensitive_codes(data, test, options.hgr_bins);

    auto evaluate = [&](std::span<const double> s) {
        DebiasRow row;
        std::vector<int> pred(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) pred[i] = s[i] > kScoreThreshold ? 1 : 0;
        row.accuracy = accuracy(pred, test_y);
        row.pr_auc = pr_auc(s, test_y);
        row.hgr = hgr_from_codes(equal_frequency_codes(s, options.hgr_bins), l_codes, &report.warnings);
        return row;
    };

    report.rows.push_back(evaluate(test_s));
    for (double alpha : alphas) {
        const TransportMap map = fit_postprocessor(train_s, train_g, groups.group_count(), alpha, options.spec);
        const std::vector<double> repaired = transform_scores(map, test_s, test_g, &report.warnings);
        DebiasRow row = evaluate(repaired);
        row.alpha = alpha;
        row.t = map.t;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace fairgroups
