#pragma once
// Fairness measures, the inter-group variance objective, partition comparison
// and model-evaluation metrics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>

#include "fairgroups/core.hpp"

namespace fairgroups {

enum class FairnessMeasure {
    OneVsAllDI,  // P(Y=1 | S=k) - P(Y=1)
};

inline std::string_view to_string(FairnessMeasure) { return "one_vs_all_di"; }

inline FairnessMeasure parse_measure(std::string_view name) {
    if (name == "one_vs_all_di") return FairnessMeasure::OneVsAllDI;
    throw ValidationError("unknown fairness measure '" + std::string(name) + "'");
}

// Measures whose population-weighted mean over groups is zero by construction
// make the variance objective additive over groups.
constexpr bool has_zero_weighted_mean(FairnessMeasure m) noexcept {
    return m == FairnessMeasure::OneVsAllDI;
}

struct ConfidenceInterval {
    double low = 0.0;
    double high = 0.0;
    double level = 0.95;
};

// ---------------------------------------------------------------------------
// Phi and the variance objective

inline double phi_from_counts(double count, double positives, double total, double positives_total,
                              FairnessMeasure = FairnessMeasure::OneVsAllDI) {
    return positives / count - positives_total / total;
}

inline double phi(const GroupAssignment& a, std::size_t k,
                  FairnessMeasure measure = FairnessMeasure::OneVsAllDI) {
    if (k >= a.group_count()) throw UndefinedGroupError(k, "group " + std::to_string(k) + " does not exist");
    if (a.counts[k] == 0) throw UndefinedGroupError(k, "group " + std::to_string(k) + " is empty");
    return phi_from_counts(static_cast<double>(a.counts[k]), static_cast<double>(a.positives[k]),
                           static_cast<double>(a.total), static_cast<double>(a.positives_total), measure);
}

enum class EmptyGroups { Error, Skip };

// sum_k w_k (phi_k - mean)^2 with mean = sum_k w_k phi_k.
inline double variance_from_counts(std::span<const double> counts, std::span<const double> positives,
                                   FairnessMeasure measure = FairnessMeasure::OneVsAllDI,
                                   EmptyGroups empty = EmptyGroups::Error) {
    double total = 0.0, positives_total = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        total += counts[k];
        positives_total += positives[k];
    }
    if (total <= 0.0) throw ValidationError("variance needs at least one sample");
    std::vector<double> w(counts.size(), 0.0), f(counts.size(), 0.0);
    double mean = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] <= 0.0) {
            if (empty == EmptyGroups::Error)
                throw UndefinedGroupError(k, "group " + std::to_string(k) + " is empty");
            continue;
        }
        w[k] = counts[k] / total;
        f[k] = phi_from_counts(counts[k], positives[k], total, positives_total, measure);
        mean += w[k] * f[k];
    }
    double var = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) var += w[k] * (f[k] - mean) * (f[k] - mean);
    return var;
}

inline double partition_variance(const GroupAssignment& a,
                                 FairnessMeasure measure = FairnessMeasure::OneVsAllDI,
                                 EmptyGroups empty = EmptyGroups::Error) {
    std::vector<double> c(a.counts.begin(), a.counts.end());
    std::vector<double> p(a.positives.begin(), a.positives.end());
    return variance_from_counts(c, p, measure, empty);
}

inline double partition_variance(const Dataset& data, const Partition& partition, Target target = Target::Y,
                                 FairnessMeasure measure = FairnessMeasure::OneVsAllDI) {
    return partition_variance(assign_groups(data, partition, target), measure);
}

// Two-group case: the variance equals pi (1 - pi) DI^2 with pi the weight of
// group 1 and DI = rate(group 1) - rate(group 0).
struct BinaryDiCheck {
    double variance = 0.0;
    double pi = 0.0;
    double di = 0.0;

    double identity() const noexcept { return pi * (1.0 - pi) * di * di; }
};

inline BinaryDiCheck binary_di_identity_check(const GroupAssignment& a,
                                              FairnessMeasure measure = FairnessMeasure::OneVsAllDI) {
    if (a.group_count() != 2) throw ValidationError("the DI identity needs exactly 2 groups");
    BinaryDiCheck out;
    out.variance = partition_variance(a, measure);
    const double n = static_cast<double>(a.total);
    out.pi = static_cast<double>(a.counts[1]) / n;
    out.di = static_cast<double>(a.positives[1]) / static_cast<double>(a.counts[1]) -
             static_cast<double>(a.positives[0]) / static_cast<double>(a.counts[0]);
    return out;
}

inline BinaryDiCheck binary_di_identity_check(const Dataset& data, const Partition& partition,
                                              Target target = Target::Y) {
    return binary_di_identity_check(assign_groups(data, partition, target));
}

// ---------------------------------------------------------------------------
// Partition comparison

// Fraction of sample pairs on which both labelings agree (together vs apart),
// computed from the contingency table.
inline double rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
    if (a.size() != b.size()) throw ValidationError("rand_index: label vectors differ in length");
    if (a.size() < 2) throw ValidationError("rand_index needs at least 2 samples");
    const std::size_t ka = *std::max_element(a.begin(), a.end()) + 1;
    const std::size_t kb = *std::max_element(b.begin(), b.end()) + 1;
    std::vector<std::uint64_t> joint(ka * kb, 0), row(ka, 0), col(kb, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++joint[a[i] * kb + b[i]];
        ++row[a[i]];
        ++col[b[i]];
    }
    auto pairs = [](std::uint64_t n) { return n * (n - (n > 0 ? 1 : 0)) / 2; };
    std::uint64_t same_both = 0, same_a = 0, same_b = 0;
    for (auto n : joint) same_both += pairs(n);
    for (auto n : row) same_a += pairs(n);
    for (auto n : col) same_b += pairs(n);
    const std::uint64_t all = pairs(a.size());
    // agreements = pairs together in both + pairs apart in both
    const std::uint64_t apart_both = all - same_a - same_b + same_both;
    return static_cast<double>(same_both + apart_both) / static_cast<double>(all);
}

inline double rand_index(const GroupAssignment& a, const GroupAssignment& b) {
    return rand_index(a.labels, b.labels);
}

// ---------------------------------------------------------------------------
// Confidence intervals

inline double normal_quantile(double p) {
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

// Asymptotic interval for phi_k by the delta method. The four cells (in/out of
// group k) x (positive/negative) are multinomial with frequencies pi; phi is a
// smooth function of pi and Var(phi_hat) ~ (g' diag(pi) g - (g' pi)^2) / N.
inline ConfidenceInterval phi_confidence_interval(const GroupAssignment& a, std::size_t k, double level = 0.95,
                                                  Warnings* warnings = nullptr) {
    if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0,1)");
    const double estimate = phi(a, k);
    if (a.counts[k] < 30)
        warn(warnings, "group " + std::to_string(k) + " has fewer than 30 samples; interval is unreliable");
    const double n = static_cast<double>(a.total);
    const double in_pos = static_cast<double>(a.positives[k]) / n;
    const double in_neg = static_cast<double>(a.counts[k] - a.positives[k]) / n;
    const double out_pos = static_cast<double>(a.positives_total - a.positives[k]) / n;
    const double out_neg = 1.0 - in_pos - in_neg - out_pos;
    const double in = in_pos + in_neg;

    const double cells[4] = {in_pos, in_neg, out_pos, out_neg};
    const double grad[4] = {in_neg / (in * in) - 1.0, -in_pos / (in * in), -1.0, 0.0};
    double quad = 0.0, lin = 0.0;
    for (int c = 0; c < 4; ++c) {
        quad += cells[c] * grad[c] * grad[c];
        lin += cells[c] * grad[c];
    }
    const double variance = std::max(0.0, (quad - lin * lin) / n);
    const double half = normal_quantile(0.5 + level / 2.0) * std::sqrt(variance);
    return {estimate - half, estimate + half, level};
}

inline GroupStats group_stats(const GroupAssignment& a, double level = 0.95, Warnings* warnings = nullptr) {
    GroupStats out;
    out.level = level;
    out.overall_rate = static_cast<double>(a.positives_total) / static_cast<double>(a.total);
    out.groups.resize(a.group_count());
    for (std::size_t k = 0; k < a.group_count(); ++k) {
        GroupStat& g = out.groups[k];
        g.count = a.counts[k];
        g.positives = a.positives[k];
        g.weight = static_cast<double>(a.counts[k]) / static_cast<double>(a.total);
        if (a.counts[k] == 0) {
            warn(warnings, "group " + std::to_string(k) + " is empty; its phi is undefined");
            g.rate = g.phi = g.ci_low = g.ci_high = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        g.rate = static_cast<double>(a.positives[k]) / static_cast<double>(a.counts[k]);
        g.phi = phi(a, k);
        const ConfidenceInterval ci = phi_confidence_interval(a, k, level, warnings);
        g.ci_low = ci.low;
        g.ci_high = ci.high;
    }
    return out;
}

// ---------------------------------------------------------------------------
// HGR maximal correlation

// Equal-frequency discretization; tied values share the bin of their first
// occurrence in sorted order.
inline std::vector<std::size_t> equal_frequency_codes(std::span<const double> values, std::size_t bins) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    std::vector<std::size_t> codes(n);
    std::size_t first_rank = 0;
    for (std::size_t r = 0; r < n; ++r) {
        if (r > 0 && values[order[r]] != values[order[r - 1]]) first_rank = r;
        codes[order[r]] = first_rank * bins / n;
    }
    return codes;
}

// Second singular value of Q_ij = p_ij / sqrt(p_i. p_.j) for two categorical
// variables; 0 when either side has a single category.
inline double hgr_from_codes(std::span<const std::size_t> a, std::span<const std::size_t> b,
                             Warnings* warnings = nullptr) {
    if (a.size() != b.size()) throw ValidationError("hgr: inputs differ in length");
    if (a.empty()) throw ValidationError("hgr: empty input");
    // Compact codes to the categories actually present.
    auto compact = [](std::span<const std::size_t> codes, std::vector<std::size_t>& out) {
        const std::size_t hi = *std::max_element(codes.begin(), codes.end()) + 1;
        std::vector<std::size_t> remap(hi, SIZE_MAX);
        std::size_t next = 0;
        for (std::size_t c : codes) {
            if (remap[c] == SIZE_MAX) remap[c] = next++;
        }
        out.resize(codes.size());
        for (std::size_t i = 0; i < codes.size(); ++i) out[i] = remap[codes[i]];
        return next;
    };
    std::vector<std::size_t> ca, cb;
    const std::size_t ra = compact(a, ca), rb = compact(b, cb);
    if (ra < 2 || rb < 2) {
        warn(warnings, "hgr: constant input, returning 0");
        return 0.0;
    }
    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ra), static_cast<Eigen::Index>(rb));
    for (std::size_t i = 0; i < ca.size(); ++i) joint(static_cast<Eigen::Index>(ca[i]), static_cast<Eigen::Index>(cb[i])) += 1.0;
    joint /= static_cast<double>(ca.size());
    const Eigen::VectorXd pa = joint.rowwise().sum();
    const Eigen::VectorXd pb = joint.colwise().sum().transpose();
    Eigen::MatrixXd q = pa.cwiseSqrt().cwiseInverse().asDiagonal() * joint * pb.cwiseSqrt().cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(q);
    const Eigen::VectorXd& sv = svd.singularValues();
    return std::clamp(sv(1), 0.0, 1.0);
}

inline double hgr(std::span<const double> scores, std::span<const double> sensitive, std::size_t bins = 20,
                  Warnings* warnings = nullptr) {
    if (scores.size() != sensitive.size()) throw ValidationError("hgr: inputs differ in length");
    if (bins < 2) throw ValidationError("hgr: at least 2 bins are required");
    const auto a = equal_frequency_codes(scores, bins);
    const auto b = equal_frequency_codes(sensitive, bins);
    return hgr_from_codes(a, b, warnings);
}

// ---------------------------------------------------------------------------
// Model evaluation

inline double accuracy(std::span<const int> y_hat, std::span<const int> y) {
    if (y_hat.size() != y.size()) throw ValidationError("accuracy: inputs differ in length");
    if (y.empty()) throw ValidationError("accuracy: empty input");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y.size(); ++i) hits += (y_hat[i] == y[i]) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(y.size());
}

// Area under the precision-recall curve by the trapezoidal rule over all
// distinct score thresholds, starting at recall 0 with the first precision.
inline double pr_auc(std::span<const double> score, std::span<const int> y) {
    if (score.size() != y.size()) throw ValidationError("pr_auc: inputs differ in length");
    const auto positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    if (positives == 0) throw ValidationError("pr_auc is undefined without positive labels");
    std::vector<std::size_t> order(score.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return score[i] > score[j]; });
    double tp = 0.0, fp = 0.0, area = 0.0;
    double prev_recall = 0.0, prev_precision = -1.0;
    for (std::size_t r = 0; r < order.size();) {
        const double t = score[order[r]];
        for (; r < order.size() && score[order[r]] == t; ++r) (y[order[r]] == 1 ? tp : fp) += 1.0;
        const double recall = tp / static_cast<double>(positives);
        const double precision = tp / (tp + fp);
        if (prev_precision < 0.0) prev_precision = precision;
        area += (recall - prev_recall) * (precision + prev_precision) / 2.0;
        prev_recall = recall;
        prev_precision = precision;
    }
    return area;
}

}  // namespace fairgroups
