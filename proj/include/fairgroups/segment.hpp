#pragma once
// Partition search: FairGroups exhaustive search in 1D (plain enumeration and
// the equivalent segment dynamic program) and over 2D guillotine rectangles,
// the K-Means heuristic on per-bin deviations, fixed-threshold baselines, and
// evaluation of a fitted partition on other data.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "fairgroups/core.hpp"
#include "fairgroups/metrics.hpp"
#include "fairgroups/rangesum.hpp"

namespace fairgroups {

enum class Method { FairGroups, KMeans, Fixed };

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::FairGroups: return "fairgroups";
        case Method::KMeans: return "kmeans";
        case Method::Fixed: return "fixed";
    }
    return "fairgroups";
}

inline Method parse_method(std::string_view name) {
    if (name == "fairgroups") return Method::FairGroups;
    if (name == "kmeans") return Method::KMeans;
    if (name == "fixed") return Method::Fixed;
    throw ValidationError("unknown method '" + std::string(name) + "' (expected fairgroups, kmeans or fixed)");
}

// Among candidates whose objective is within the tie tolerance of the
// optimum, the lexicographically smallest boundary vector wins.
enum class TieBreak { LexicographicSmallest };

struct AxisSpec {
    std::size_t bins = 100;
    std::optional<double> lo;  // default: smallest observed value
    std::optional<double> hi;  // default: largest observed value
    std::vector<double> edges;  // explicit edges override bins/lo/hi
};

inline Grid resolve_grid(const AxisSpec& spec, std::span<const double> values) {
    if (!spec.edges.empty()) return Grid(spec.edges);
    double lo = 0.0, hi = 0.0;
    if (!spec.lo || !spec.hi) {
        if (values.empty()) throw ValidationError("grid bounds need data or explicit lo/hi");
        auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        lo = *mn;
        hi = *mx;
    }
    if (spec.lo) lo = *spec.lo;
    if (spec.hi) hi = *spec.hi;
    return Grid::uniform(lo, hi, spec.bins);
}

struct SearchConfig {
    std::size_t k = 5;
    AxisSpec axis_x;                 // the 1D axis, or the first 2D axis
    AxisSpec axis_y{.bins = 20, .lo = {}, .hi = {}, .edges = {}};  // second 2D axis
    Method method = Method::FairGroups;
    Target target = Target::Y;
    FairnessMeasure measure = FairnessMeasure::OneVsAllDI;
    TieBreak tie_break = TieBreak::LexicographicSmallest;
    std::size_t min_group_count = 1;
    bool fast_path = true;  // additive dynamic program when the measure has zero weighted mean
    unsigned threads = 1;   // workers for the exhaustive enumeration
    double tie_tolerance = 1e-12;
    double level = 0.95;
};

struct SearchDiagnostics {
    std::uint64_t candidates = 0;
    bool disconnected = false;       // K-Means produced non-contiguous groups
    std::optional<double> kmeans_sse;
    Warnings warnings;
};

struct SearchResult {
    Partition partition;
    double objective = 0.0;
    GroupStats stats;
    SearchDiagnostics diagnostics;
};

// Boundaries 0 = j_0 < j_1 < ... < j_K = M and the achieved objective.
struct CutResult {
    std::vector<std::size_t> boundaries;
    double objective = -std::numeric_limits<double>::infinity();
    std::uint64_t candidates = 0;
};

namespace detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline void validate_search(std::size_t k, std::size_t bins, std::size_t min_group_count) {
    if (k < 1) throw ValidationError("K must be at least 1");
    if (k > bins) throw ValidationError("K = " + std::to_string(k) + " exceeds the bin count " + std::to_string(bins));
    if (min_group_count < 1) throw ValidationError("minimum group count must be at least 1");
}

// Visits every feasible boundary vector in lexicographic order. `visit`
// returns true to stop. Partial sums carry sum w, sum w psi, sum w psi^2 so
// each candidate costs O(1) at the deepest level.
template <typename Visit>
bool enumerate_cuts(const PsiMatrix& psi, std::size_t k, double min_count, std::size_t level,
                    std::vector<std::size_t>& cuts, double sw, double s1, double s2, Visit& visit) {
    const std::size_t m = psi.bins();
    const std::size_t start = cuts[level];
    if (level + 1 == k) {
        if (psi.count(start, m - 1) < min_count) return false;
        const double w = psi.weight(start, m - 1), p = psi.psi(start, m - 1);
        const double tw = sw + w, t1 = s1 + w * p, t2 = s2 + w * p * p;
        return visit(cuts, t2 - t1 * t1 / tw);
    }
    for (std::size_t end = start + 1; end + (k - 1 - level) <= m; ++end) {
        if (psi.count(start, end - 1) < min_count) continue;
        const double w = psi.weight(start, end - 1), p = psi.psi(start, end - 1);
        cuts[level + 1] = end;
        if (enumerate_cuts(psi, k, min_count, level + 1, cuts, sw + w, s1 + w * p, s2 + w * p * p, visit))
            return true;
    }
    return false;
}

}  // namespace detail

// Exact objective of a segment partition: sum_k w_k (psi_k - mean)^2.
inline double segments_objective(const PsiMatrix& psi, std::span<const std::size_t> boundaries,
                                 FairnessMeasure measure = FairnessMeasure::OneVsAllDI) {
    std::vector<double> counts, positives;
    for (std::size_t g = 0; g + 1 < boundaries.size(); ++g) {
        counts.push_back(psi.count(boundaries[g], boundaries[g + 1] - 1));
        positives.push_back(psi.positives(boundaries[g], boundaries[g + 1] - 1));
    }
    return variance_from_counts(counts, positives, measure);
}

// Plain enumeration of all C(M-1, K-1) cut placements. Work is split over the
// position of the first cut; the reduction takes the global maximum first and
// then the lexicographically first candidate within tolerance of it, so the
// answer does not depend on the worker count.
inline CutResult optimal_cuts_exhaustive(const PsiMatrix& psi, std::size_t k, std::size_t min_group_count = 1,
                                         FairnessMeasure = FairnessMeasure::OneVsAllDI, unsigned threads = 1,
                                         double tie_tolerance = 1e-12) {
    const std::size_t m = psi.bins();
    detail::validate_search(k, m, min_group_count);
    const auto min_count = static_cast<double>(min_group_count);
    CutResult out;
    if (k == 1) {
        if (psi.count(0, m - 1) < min_count) throw InfeasibleError("no feasible partition: too few samples");
        out.boundaries = {0, m};
        out.objective = 0.0;
        out.candidates = 1;
        return out;
    }

    // Chunk c holds every candidate whose first cut is at c + 1.
    const std::size_t chunks = m - k + 1;
    std::vector<double> chunk_best(chunks, detail::kNegInf);
    std::vector<std::uint64_t> chunk_candidates(chunks, 0);

    auto scan_chunk = [&](std::size_t c) {
        const std::size_t first_end = c + 1;
        if (psi.count(0, first_end - 1) < min_count) return;
        std::vector<std::size_t> cuts(k + 1, 0);
        cuts[1] = first_end;
        cuts[k] = m;
        const double w = psi.weight(0, first_end - 1), p = psi.psi(0, first_end - 1);
        double best = detail::kNegInf;
        std::uint64_t seen = 0;
        auto visit = [&](const std::vector<std::size_t>&, double value) {
            ++seen;
            if (value > best) best = value;
            return false;
        };
        detail::enumerate_cuts(psi, k, min_count, 1, cuts, w, w * p, w * p * p, visit);
        chunk_best[c] = best;
        chunk_candidates[c] = seen;
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
    if (workers == 1) {
        for (std::size_t c = 0; c < chunks; ++c) scan_chunk(c);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (std::size_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) scan_chunk(c);
            });
        }
        for (auto& th : pool) th.join();
    }

    double global = detail::kNegInf;
    for (std::size_t c = 0; c < chunks; ++c) {
        global = std::max(global, chunk_best[c]);
        out.candidates += chunk_candidates[c];
    }
    if (global == detail::kNegInf) throw InfeasibleError("no feasible partition: every placement has an empty group");

    const double threshold = global - tie_tolerance;
    for (std::size_t c = 0; c < chunks; ++c) {
        if (chunk_best[c] < threshold) continue;
        std::vector<std::size_t> cuts(k + 1, 0);
        cuts[1] = c + 1;
        cuts[k] = m;
        const double w = psi.weight(0, c), p = psi.psi(0, c);
        auto visit = [&](const std::vector<std::size_t>& candidate, double value) {
            if (value < threshold) return false;
            out.boundaries = candidate;
            return true;
        };
        detail::enumerate_cuts(psi, k, min_count, 1, cuts, w, w * p, w * p * p, visit);
        break;
    }
    out.objective = segments_objective(psi, out.boundaries);
    return out;
}

// Segment dynamic program for zero-mean measures, where the objective is
// sum_k w_k psi_k^2 and therefore additive over segments. O(M^2 K).
inline CutResult optimal_cuts_dp(const PsiMatrix& psi, std::size_t k, std::size_t min_group_count = 1,
                                 double tie_tolerance = 1e-12) {
    const std::size_t m = psi.bins();
    detail::validate_search(k, m, min_group_count);
    const auto min_count = static_cast<double>(min_group_count);
    auto segment = [&](std::size_t first, std::size_t last) {
        if (psi.count(first, last) < min_count) return detail::kNegInf;
        const double p = psi.psi(first, last);
        return psi.weight(first, last) * p * p;
    };

    CutResult out;
    // best[c][i]: best value covering bins i..M-1 with c groups.
    std::vector<std::vector<double>> best(k + 1, std::vector<double>(m + 1, detail::kNegInf));
    for (std::size_t i = 0; i < m; ++i) best[1][i] = segment(i, m - 1);
    for (std::size_t c = 2; c <= k; ++c) {
        for (std::size_t i = 0; i + c <= m; ++i) {
            double v = detail::kNegInf;
            for (std::size_t j = i + 1; j + (c - 1) <= m; ++j) {
                ++out.candidates;
                const double rest = best[c - 1][j];
                if (rest == detail::kNegInf) continue;
                const double s = segment(i, j - 1);
                if (s == detail::kNegInf) continue;
                v = std::max(v, s + rest);
            }
            best[c][i] = v;
        }
    }
    const double optimum = best[k][0];
    if (optimum == detail::kNegInf) throw InfeasibleError("no feasible partition: every placement has an empty group");

    // Smallest next boundary that still admits a completion within tolerance.
    out.boundaries = {0};
    std::size_t pos = 0;
    double acc = 0.0;
    for (std::size_t c = k; c >= 2; --c) {
        for (std::size_t j = pos + 1; j + (c - 1) <= m; ++j) {
            const double s = segment(pos, j - 1);
            const double rest = best[c - 1][j];
            if (s == detail::kNegInf || rest == detail::kNegInf) continue;
            if (acc + s + rest >= optimum - tie_tolerance) {
                acc += s;
                pos = j;
                out.boundaries.push_back(j);
                break;
            }
        }
    }
    out.boundaries.push_back(m);
    out.objective = segments_objective(psi, out.boundaries);
    return out;
}

namespace detail {

inline Provenance make_provenance(const Dataset& data, Method method, const SearchConfig& cfg, double objective) {
    Provenance p;
    p.method = std::string(to_string(method));
    p.measure = std::string(to_string(cfg.measure));
    p.target = std::string(to_string(cfg.target));
    p.objective = objective;
    p.n = data.size();
    return p;
}

inline SearchResult finish(const Dataset& data, Partition partition, double objective, const SearchConfig& cfg,
                           SearchDiagnostics diag, Method method) {
    partition.provenance = make_provenance(data, method, cfg, objective);
    const GroupAssignment a = assign_groups(data, partition, cfg.target);
    GroupStats stats = group_stats(a, cfg.level, &diag.warnings);
    return SearchResult{std::move(partition), objective, std::move(stats), std::move(diag)};
}

}  // namespace detail

inline SearchResult fairgroups_1d(const Dataset& data, const SearchConfig& cfg) {
    if (data.dimension() != 1) throw ValidationError("fairgroups_1d requires a 1D dataset");
    const Grid grid = resolve_grid(cfg.axis_x, data.coordinate(0));
    detail::validate_search(cfg.k, grid.bins(), cfg.min_group_count);
    const PsiMatrix psi = psi_matrix(data, grid, cfg.target);
    const CutResult cuts = (cfg.fast_path && has_zero_weighted_mean(cfg.measure))
                               ? optimal_cuts_dp(psi, cfg.k, cfg.min_group_count, cfg.tie_tolerance)
                               : optimal_cuts_exhaustive(psi, cfg.k, cfg.min_group_count, cfg.measure, cfg.threads,
                                                         cfg.tie_tolerance);
    SearchDiagnostics diag;
    diag.candidates = cuts.candidates;
    return detail::finish(data, Partition::segments(grid, cuts.boundaries), cuts.objective, cfg, std::move(diag),
                          Method::FairGroups);
}

// ---------------------------------------------------------------------------
// K-Means on per-bin deviations

struct KMeans1DResult {
    std::vector<std::size_t> labels;  // cluster per input value, clusters ordered by value
    double sse = 0.0;
};

// Exact K-Means for scalar values: after sorting, optimal clusters are
// contiguous runs, found by dynamic programming over distinct values
// (weighted by multiplicity, so equal values always share a cluster).
inline KMeans1DResult kmeans_1d_exact(std::span<const double> values, std::size_t k) {
    if (k < 1) throw ValidationError("K must be at least 1");
    std::vector<double> distinct(values.begin(), values.end());
    std::sort(distinct.begin(), distinct.end());
    std::vector<double> mult;
    {
        std::vector<double> uniq;
        for (double v : distinct) {
            if (uniq.empty() || v != uniq.back()) {
                uniq.push_back(v);
                mult.push_back(1.0);
            } else {
                mult.back() += 1.0;
            }
        }
        distinct = std::move(uniq);
    }
    const std::size_t d = distinct.size();
    if (d < k)
        throw InfeasibleError("K-Means needs at least K = " + std::to_string(k) + " distinct values, found " +
                              std::to_string(d));
    std::vector<double> cm(d + 1, 0.0), cs(d + 1, 0.0), cq(d + 1, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        cm[i + 1] = cm[i] + mult[i];
        cs[i + 1] = cs[i] + mult[i] * distinct[i];
        cq[i + 1] = cq[i] + mult[i] * distinct[i] * distinct[i];
    }
    auto cost = [&](std::size_t a, std::size_t b) {  // values a..b inclusive
        const double n = cm[b + 1] - cm[a], s = cs[b + 1] - cs[a], q = cq[b + 1] - cq[a];
        return std::max(0.0, q - s * s / n);
    };
    const double inf = std::numeric_limits<double>::infinity();
    // dp[c][i]: best cost of the first i+1 distinct values in c clusters.
    std::vector<std::vector<double>> dp(k + 1, std::vector<double>(d, inf));
    std::vector<std::vector<std::size_t>> from(k + 1, std::vector<std::size_t>(d, 0));
    for (std::size_t i = 0; i < d; ++i) dp[1][i] = cost(0, i);
    for (std::size_t c = 2; c <= k; ++c) {
        for (std::size_t i = c - 1; i < d; ++i) {
            for (std::size_t j = c - 1; j <= i; ++j) {  // cluster c covers j..i
                const double v = dp[c - 1][j - 1] + cost(j, i);
                if (v < dp[c][i]) {
                    dp[c][i] = v;
                    from[c][i] = j;
                }
            }
        }
    }
    std::vector<std::size_t> cluster_of(d);
    std::size_t end = d - 1;
    for (std::size_t c = k; c >= 1; --c) {
        const std::size_t begin = c == 1 ? 0 : from[c][end];
        for (std::size_t i = begin; i <= end; ++i) cluster_of[i] = c - 1;
        if (c > 1) end = begin - 1;
    }
    KMeans1DResult out;
    out.sse = dp[k][d - 1];
    out.labels.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto it = std::lower_bound(distinct.begin(), distinct.end(), values[i]);
        out.labels[i] = cluster_of[static_cast<std::size_t>(it - distinct.begin())];
    }
    return out;
}

// Clusters the per-bin values psi_j of non-empty bins. Empty bins join the
// group of the nearest non-empty bin to their left (or right at the start).
// Disconnected clusters are reported, not repaired.
inline SearchResult kmeans_1d(const Dataset& data, const SearchConfig& cfg) {
    if (data.dimension() != 1) throw ValidationError("kmeans_1d requires a 1D dataset");
    const Grid grid = resolve_grid(cfg.axis_x, data.coordinate(0));
    detail::validate_search(cfg.k, grid.bins(), cfg.min_group_count);
    const BinCounts bc = bin_counts(data, grid, cfg.target);
    const double n = static_cast<double>(data.size());
    double pos_total = 0.0;
    for (double p : bc.positives) pos_total += p;
    const double overall = pos_total / n;

    std::vector<double> psi_values;
    std::vector<std::size_t> bins_used;
    for (std::size_t j = 0; j < grid.bins(); ++j) {
        if (bc.counts[j] <= 0.0) continue;
        psi_values.push_back(bc.positives[j] / bc.counts[j] - overall);
        bins_used.push_back(j);
    }
    const KMeans1DResult km = kmeans_1d_exact(psi_values, cfg.k);

    constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> labels(grid.bins(), unset);
    for (std::size_t i = 0; i < bins_used.size(); ++i) labels[bins_used[i]] = km.labels[i];
    for (std::size_t j = 1; j < labels.size(); ++j) {
        if (labels[j] == unset) labels[j] = labels[j - 1];
    }
    for (std::size_t j = labels.size(); j-- > 0;) {
        if (labels[j] == unset) labels[j] = labels[j + 1];
    }

    Partition partition = Partition::labelled_bins(grid, labels);
    SearchDiagnostics diag;
    diag.candidates = psi_values.size();
    diag.kmeans_sse = km.sse;
    if (!partition.is_segmented()) {
        diag.disconnected = true;
        diag.warnings.push_back("K-Means produced disconnected groups; fairness is likely not monotone in L");
    }
    const GroupAssignment a = assign_groups(data, partition, cfg.target);
    const double objective = partition_variance(a, cfg.measure);
    return detail::finish(data, std::move(partition), objective, cfg, std::move(diag), Method::KMeans);
}

// ---------------------------------------------------------------------------
// 2D guillotine partitions

inline constexpr std::size_t kMaxGroups2D = 16;
inline constexpr std::size_t kMaxAxisBins2D = 128;
inline constexpr std::size_t kMaxMemoEntries2D = std::size_t{1} << 27;

namespace detail {

// Best split of every sub-rectangle into c guillotine pieces, memoized. The
// objective is additive over rectangles (zero-mean measure), so the optimum
// over all guillotine trees decomposes over the first cut.
class GuillotineSearch {
public:
    GuillotineSearch(const RectPrefixSums& sums, std::size_t k, double min_count)
        : sums_(sums), k_(k), min_count_(min_count), sx_(sums.bins_x() + 1), sy_(sums.bins_y() + 1) {
        if (k_ >= 2) memo_.assign(sx_ * sx_ * sy_ * sy_ * (k_ - 1), kUnknown);
        n_ = sums.total();
        overall_ = sums.positives_total() / n_;
    }

    double value(const Rect& r, std::size_t c) {
        if (c == 1) return score(r);
        if ((r.x1 - r.x0) * (r.y1 - r.y0) < c) return kNegInf;
        double& slot = memo_[key(r, c)];
        if (!std::isnan(slot)) return slot;
        double best = kNegInf;
        for_each_split(r, c, [&](const Rect& a, std::size_t ca, const Rect& b, std::size_t cb) {
            ++candidates_;
            const double va = value(a, ca);
            if (va == kNegInf) return false;
            const double vb = value(b, cb);
            if (vb == kNegInf) return false;
            best = std::max(best, va + vb);
            return false;
        });
        slot = best;
        return best;
    }

    // Replays the first split (in scan order) that attains the optimum within tolerance.
    void collect(const Rect& r, std::size_t c, double tolerance, std::vector<Rect>& out) {
        if (c == 1) {
            out.push_back(r);
            return;
        }
        const double target = value(r, c);
        Rect ra{}, rb{};
        std::size_t ca = 0, cb = 0;
        for_each_split(r, c, [&](const Rect& a, std::size_t x, const Rect& b, std::size_t y) {
            const double va = value(a, x), vb = value(b, y);
            if (va == kNegInf || vb == kNegInf || va + vb < target - tolerance) return false;
            ra = a, rb = b, ca = x, cb = y;
            return true;
        });
        collect(ra, ca, tolerance, out);
        collect(rb, cb, tolerance, out);
    }

    std::uint64_t candidates() const noexcept { return candidates_; }

private:
    // Memo slots hold NaN until computed.
    static constexpr double kUnknown = std::numeric_limits<double>::quiet_NaN();

    double score(const Rect& r) const {
        const double c = sums_.count(r);
        if (c < min_count_) return kNegInf;
        const double f = sums_.positives(r) / c - overall_;
        return c / n_ * f * f;
    }

    std::size_t key(const Rect& r, std::size_t c) const {
        return (((r.x0 * sx_ + r.x1) * sy_ + r.y0) * sy_ + r.y1) * (k_ - 1) + (c - 2);
    }

    // Vertical cuts (on x) first, then horizontal, each with the left/lower
    // piece taking 1..c-1 groups. `f` returns true to stop.
    template <typename F>
    static void for_each_split(const Rect& r, std::size_t c, F&& f) {
        for (std::size_t x = r.x0 + 1; x < r.x1; ++x) {
            for (std::size_t ca = 1; ca < c; ++ca) {
                if (f(Rect{r.x0, x, r.y0, r.y1}, ca, Rect{x, r.x1, r.y0, r.y1}, c - ca)) return;
            }
        }
        for (std::size_t y = r.y0 + 1; y < r.y1; ++y) {
            for (std::size_t ca = 1; ca < c; ++ca) {
                if (f(Rect{r.x0, r.x1, r.y0, y}, ca, Rect{r.x0, r.x1, y, r.y1}, c - ca)) return;
            }
        }
    }

    const RectPrefixSums& sums_;
    std::size_t k_;
    double min_count_;
    std::size_t sx_, sy_;
    double n_ = 0.0, overall_ = 0.0;
    std::vector<double> memo_;
    std::uint64_t candidates_ = 0;
};

}  // namespace detail

inline SearchResult fairgroups_2d(const Dataset& data, const SearchConfig& cfg) {
    if (data.dimension() != 2) throw ValidationError("fairgroups_2d requires a 2D dataset");
    if (!has_zero_weighted_mean(cfg.measure))
        throw ValidationError("2D search supports zero-mean fairness measures only");
    if (cfg.k > kMaxGroups2D) throw ValidationError("2D search supports at most 16 groups");
    const Grid gx = resolve_grid(cfg.axis_x, data.coordinate(0));
    const Grid gy = resolve_grid(cfg.axis_y, data.coordinate(1));
    if (gx.bins() > kMaxAxisBins2D || gy.bins() > kMaxAxisBins2D)
        throw ValidationError("2D search supports at most 128 bins per axis");
    detail::validate_search(cfg.k, gx.bins() * gy.bins(), cfg.min_group_count);
    const std::size_t memo = (gx.bins() + 1) * (gx.bins() + 1) * (gy.bins() + 1) * (gy.bins() + 1) * (cfg.k - 1);
    if (memo > kMaxMemoEntries2D)
        throw ValidationError("2D grid too fine for exhaustive guillotine search with K = " + std::to_string(cfg.k) +
                              "; use fewer bins per axis");
    const RectPrefixSums sums(data, gx, gy, cfg.target);
    detail::GuillotineSearch search(sums, cfg.k, static_cast<double>(cfg.min_group_count));
    const Rect box{0, gx.bins(), 0, gy.bins()};
    if (search.value(box, cfg.k) == -std::numeric_limits<double>::infinity())
        throw InfeasibleError("no feasible 2D partition: every candidate has an empty rectangle");
    std::vector<Rect> rects;
    search.collect(box, cfg.k, cfg.tie_tolerance, rects);

    std::vector<double> counts, positives;
    for (const Rect& r : rects) {
        counts.push_back(sums.count(r));
        positives.push_back(sums.positives(r));
    }
    const double objective = variance_from_counts(counts, positives, cfg.measure);
    SearchDiagnostics diag;
    diag.candidates = search.candidates();
    return detail::finish(data, Partition::rectangles(gx, gy, std::move(rects)), objective, cfg, std::move(diag),
                          Method::FairGroups);
}

// ---------------------------------------------------------------------------
// Fixed-threshold baselines

enum class FixedScheme {
    FitzpatrickIta,  // six ITA groups
    L60,             // lightness split at 60
    Default2D,       // (L, h) quadrants at L = 60, h = 55
};

// ITA category edges in degrees: dark < -30 <= brown < 10 <= tan < 28 <=
// intermediate < 41 <= light < 55 <= very light.
inline const std::vector<double>& fitzpatrick_ita_edges() {
    static const std::vector<double> edges{-90.0, -30.0, 10.0, 28.0, 41.0, 55.0, 90.0};
    return edges;
}

inline void check_thresholds(std::span<const double> t, double lo, double hi) {
    if (t.empty()) throw ValidationError("at least one threshold is required");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > lo && t[i] < hi))
            throw ValidationError("threshold " + std::to_string(t[i]) + " lies outside the range (" +
                                  std::to_string(lo) + ", " + std::to_string(hi) + ")");
        if (i > 0 && !(t[i] > t[i - 1])) throw ValidationError("thresholds must be strictly increasing");
    }
}

inline Partition fixed_partition(std::span<const double> thresholds, double lo, double hi) {
    check_thresholds(thresholds, lo, hi);
    std::vector<double> edges{lo};
    edges.insert(edges.end(), thresholds.begin(), thresholds.end());
    edges.push_back(hi);
    std::vector<std::size_t> bounds(edges.size());
    for (std::size_t i = 0; i < bounds.size(); ++i) bounds[i] = i;
    Partition p = Partition::segments(Grid(std::move(edges)), std::move(bounds));
    p.provenance.method = "fixed";
    return p;
}

// Product partition: one rectangle per (x-interval, y-interval), x-major.
inline Partition fixed_partition_2d(std::span<const double> tx, std::span<const double> ty, double lo_x, double hi_x,
                                    double lo_y, double hi_y) {
    check_thresholds(tx, lo_x, hi_x);
    check_thresholds(ty, lo_y, hi_y);
    std::vector<double> ex{lo_x}, ey{lo_y};
    ex.insert(ex.end(), tx.begin(), tx.end());
    ex.push_back(hi_x);
    ey.insert(ey.end(), ty.begin(), ty.end());
    ey.push_back(hi_y);
    std::vector<Rect> rects;
    for (std::size_t i = 0; i + 1 < ex.size(); ++i) {
        for (std::size_t j = 0; j + 1 < ey.size(); ++j) rects.push_back(Rect{i, i + 1, j, j + 1});
    }
    Partition p = Partition::rectangles(Grid(std::move(ex)), Grid(std::move(ey)), std::move(rects));
    p.provenance.method = "fixed";
    return p;
}

struct FixedRanges {
    double lo_x = 0.0, hi_x = 100.0;  // L* (or ITA for the Fitzpatrick scheme)
    double lo_y = 0.0, hi_y = 360.0;  // hue
};

inline Partition fixed_partition(FixedScheme scheme, FixedRanges ranges = {}) {
    switch (scheme) {
        case FixedScheme::FitzpatrickIta: {
            const auto& e = fitzpatrick_ita_edges();
            return fixed_partition(std::span(e).subspan(1, e.size() - 2), e.front(), e.back());
        }
        case FixedScheme::L60: {
            const double t[] = {60.0};
            return fixed_partition(t, ranges.lo_x, ranges.hi_x);
        }
        case FixedScheme::Default2D: {
            const double tx[] = {60.0}, ty[] = {55.0};
            return fixed_partition_2d(tx, ty, ranges.lo_x, ranges.hi_x, ranges.lo_y, ranges.hi_y);
        }
    }
    throw ValidationError("unknown fixed scheme");
}

inline FixedScheme parse_fixed_scheme(std::string_view name) {
    if (name == "fitzpatrick") return FixedScheme::FitzpatrickIta;
    if (name == "l60") return FixedScheme::L60;
    if (name == "default2d") return FixedScheme::Default2D;
    throw ValidationError("unknown fixed scheme '" + std::string(name) + "' (expected fitzpatrick, l60 or default2d)");
}

// ---------------------------------------------------------------------------
// Dispatch and evaluation

inline SearchResult search(const Dataset& data, const SearchConfig& cfg) {
    switch (cfg.method) {
        case Method::FairGroups: return data.dimension() == 1 ? fairgroups_1d(data, cfg) : fairgroups_2d(data, cfg);
        case Method::KMeans: return kmeans_1d(data, cfg);
        case Method::Fixed: break;
    }
    throw ValidationError("fixed partitions are built with fixed_partition, not searched");
}

struct TransferResult {
    GroupAssignment assignment;
    double variance = 0.0;
    GroupStats stats;
    std::vector<std::size_t> empty_groups;
    Warnings warnings;
};

// Re-evaluates a fitted partition on another dataset. Samples outside the
// cover are clamped into the nearest boundary group; groups left empty on the
// new data carry zero weight in the variance.
inline TransferResult transfer_evaluate(const Partition& partition, const Dataset& data, Target target = Target::Y,
                                        double level = 0.95) {
    TransferResult out;
    out.assignment = assign_groups(data, partition, target, OutOfRange::Clamp, &out.warnings);
    for (std::size_t k = 0; k < out.assignment.group_count(); ++k) {
        if (out.assignment.counts[k] == 0) out.empty_groups.push_back(k);
    }
    out.variance = partition_variance(out.assignment, FairnessMeasure::OneVsAllDI, EmptyGroups::Skip);
    out.stats = group_stats(out.assignment, level, &out.warnings);
    return out;
}

struct AmplificationRow {
    std::size_t group = 0;
    std::size_t count = 0;
    double phi_y = 0.0;
    ConfidenceInterval ci_y;
    double phi_y_hat = 0.0;
    ConfidenceInterval ci_y_hat;
    bool flagged = false;  // the two intervals are disjoint
};

struct AmplificationReport {
    std::vector<AmplificationRow> rows;
    Warnings warnings;

    bool any_flagged() const noexcept {
        return std::any_of(rows.begin(), rows.end(), [](const AmplificationRow& r) { return r.flagged; });
    }
};

// Phi of each group for the ground truth and for the model's predictions,
// side by side, with their confidence intervals.
inline AmplificationReport bias_amplification_report(const Dataset& data, const Partition& partition,
                                                     double level = 0.95) {
    if (!data.has_y_hat()) throw ValidationError("bias amplification needs a y_hat column");
    AmplificationReport out;
    const GroupAssignment ay = assign_groups(data, partition, Target::Y, OutOfRange::Clamp, &out.warnings);
    const GroupAssignment ah = assign_groups(data, partition, Target::YHat, OutOfRange::Clamp);
    for (std::size_t k = 0; k < ay.group_count(); ++k) {
        if (ay.counts[k] == 0) {
            warn(&out.warnings, "group " + std::to_string(k) + " is empty");
            continue;
        }
        AmplificationRow row;
        row.group = k;
        row.count = ay.counts[k];
        row.phi_y = phi(ay, k);
        row.ci_y = phi_confidence_interval(ay, k, level, &out.warnings);
        row.phi_y_hat = phi(ah, k);
        row.ci_y_hat = phi_confidence_interval(ah, k, level);
        row.flagged = row.ci_y.high < row.ci_y_hat.low || row.ci_y_hat.high < row.ci_y.low;
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace fairgroups
