// Acceptance runner. Prints one PASS/FAIL line per criterion; `--only N`
// restricts the run to criterion N. Exit status is non-zero if any selected
// criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>

#include "fairgroups_cli.hpp"
#include "oracles.hpp"

using namespace fairgroups;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_s;  // 0 = no runtime budget
    std::function<Verdict()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const Partition& truth_partition() {
    static const Partition p = fixed_partition(std::vector<double>{20, 30, 55, 88}, 0, 100);
    return p;
}

SearchConfig config_1d(std::size_t k, Method method = Method::FairGroups) {
    SearchConfig c;
    c.k = k;
    c.method = method;
    c.axis_x = AxisSpec{.bins = 100, .lo = 0.0, .hi = 100.0, .edges = {}};
    return c;
}

// P(Y=1) under the reference steps with L uniform on [0,100].
double analytic_uniform_rate() {
    const StepSpec s = reference_step_spec();
    double r = 0;
    for (std::size_t g = 0; g < s.pieces(); ++g)
        r += (s.breakpoints()[g + 1] - s.breakpoints()[g]) / 100.0 * s.values()[g];
    return r;
}

Verdict c1_uniform() {
    const Dataset d = generate_step_dataset(reference_step_spec(), SensitiveDistribution::uniform(0, 100), 50000, 7);
    const SearchResult r = fairgroups_1d(d, config_1d(5));
    const double ri = rand_index(assign_groups(d, r.partition), assign_groups(d, truth_partition()));
    return {std::abs(r.objective - 0.068) <= 0.005 && ri >= 0.98,
            fmt("variance %.6f (want 0.068 +- 0.005), Rand index %.6f (want >= 0.98)", r.objective, ri)};
}

Verdict c2_truncnormal() {
    const Dataset d = generate_step_dataset(reference_step_spec(),
                                            SensitiveDistribution::truncated_normal(50, 20, 0, 100), 50000, 7);
    const SearchResult fg = fairgroups_1d(d, config_1d(5));
    const SearchResult km = kmeans_1d(d, config_1d(5, Method::KMeans));
    const GroupAssignment truth = assign_groups(d, truth_partition());
    const double ri_fg = rand_index(assign_groups(d, fg.partition), truth);
    const double ri_km = rand_index(assign_groups(d, km.partition), truth);
    return {std::abs(fg.objective - 0.032) <= 0.005 && ri_fg >= 0.95 && ri_km >= 0.75,
            fmt("variance %.6f (want 0.032 +- 0.005), FairGroups RI %.6f (>= 0.95), K-Means RI %.6f (>= 0.75)",
                fg.objective, ri_fg, ri_km)};
}

Verdict c3_binary_identity() {
    Rng rng(3);
    double worst = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t n = 10 + rng.uniform_index(2000);
        const double cut = 0.05 + 0.9 * rng.uniform();
        const double q0 = rng.uniform(), q1 = rng.uniform();
        std::vector<Sample> s(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i].l[0] = rng.uniform();
            s[i].y = rng.uniform() < (s[i].l[0] < cut ? q0 : q1) ? 1 : 0;
        }
        s[0].l[0] = 0.0;  // keep both sides of the split non-empty
        s[1].l[0] = 1.0;
        const Dataset d(std::move(s), 1);
        const Partition p = fixed_partition(std::vector<double>{cut}, 0.0, 1.0);
        const BinaryDiCheck c = binary_di_identity_check(d, p);

        // Independent evaluation of pi (1 - pi) DI^2 from raw samples.
        double n1 = 0, pos0 = 0, pos1 = 0;
        std::vector<int> y;
        std::vector<std::size_t> labels;
        for (const auto& x : d.samples()) {
            const std::size_t g = x.l[0] < cut ? 0 : 1;
            labels.push_back(g);
            y.push_back(x.y);
            if (g == 1) n1 += 1, pos1 += x.y;
            else pos0 += x.y;
        }
        const double pi = n1 / static_cast<double>(n);
        const double di = pos1 / n1 - pos0 / (static_cast<double>(n) - n1);
        const double identity = pi * (1 - pi) * di * di;
        worst = std::max({worst, std::abs(c.variance - identity), std::abs(oracle::variance_of_labels(y, labels) - identity)});
    }
    return {worst <= 1e-12, fmt("max |variance - pi(1-pi)DI^2| = %.3e over 1000 instances (want <= 1e-12)", worst)};
}

Verdict c4_exhaustive_vs_oracle() {
    Rng rng(4);
    std::size_t checks = 0, mismatches = 0;
    double worst = 0;
    std::string first_bad;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 30 + rng.uniform_index(300);
        std::vector<double> rate(8);
        for (auto& r : rate) r = rng.uniform();
        std::vector<Sample> s(n);
        for (auto& x : s) {
            x.l[0] = rng.uniform();
            x.y = rng.uniform() < rate[static_cast<std::size_t>(x.l[0] * 8) % 8] ? 1 : 0;
        }
        const Dataset d(std::move(s), 1);
        for (std::size_t m = 2; m <= 14; ++m) {
            for (std::size_t k = 1; k <= std::min<std::size_t>(4, m); ++k) {
                SearchConfig c;
                c.k = k;
                c.axis_x = AxisSpec{.bins = m, .lo = 0.0, .hi = 1.0, .edges = {}};
                const oracle::BruteCuts brute = oracle::brute_force_cuts(d, Grid::uniform(0.0, 1.0, m), k);
                for (bool fast : {false, true}) {
                    c.fast_path = fast;
                    ++checks;
                    bool ok;
                    try {
                        const SearchResult r = fairgroups_1d(d, c);
                        const std::vector<std::size_t> b(r.partition.boundaries().begin(),
                                                         r.partition.boundaries().end());
                        ok = brute.feasible && b == brute.boundaries;
                        if (brute.feasible) worst = std::max(worst, std::abs(r.objective - brute.objective));
                    } catch (const InfeasibleError&) {
                        ok = !brute.feasible;
                    }
                    if (!ok && mismatches++ == 0)
                        first_bad = fmt(" first mismatch: dataset %d M=%zu K=%zu %s", rep, m, k,
                                        fast ? "fast path" : "exhaustive");
                }
            }
        }
    }
    return {mismatches == 0 && worst <= 1e-12,
            fmt("%zu comparisons, %zu boundary mismatches, max objective gap %.3e (want 0 and <= 1e-12)%s", checks,
                mismatches, worst, first_bad.c_str())};
}

Verdict c5_range_tables() {
    Rng rng(5);
    std::size_t bad = 0;
    double worst_psi = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t m = 1 + rng.uniform_index(64);
        std::vector<double> v(m);
        for (auto& x : v) x = static_cast<double>(rng.uniform_index(50));
        const RangeSumTable t = count_on_all_ranges(v);
        const auto naive = oracle::range_sums(v);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j) bad += t(i, j) != naive[i][j];

        const std::size_t n = 1 + rng.uniform_index(400);
        std::vector<Sample> s(n);
        for (auto& x : s) {
            x.l[0] = 10 * rng.uniform();
            x.y = rng.uniform() < 0.3 + 0.04 * x.l[0] ? 1 : 0;
        }
        const Dataset d(std::move(s), 1);
        const Grid g = Grid::uniform(0, 10, std::max<std::size_t>(m, 2));
        const PsiMatrix psi = psi_matrix(d, g, Target::Y);
        const double p = oracle::overall_rate(d);
        for (std::size_t i = 0; i < g.bins(); ++i) {
            for (std::size_t j = i; j < g.bins(); ++j) {
                const oracle::Interval iv = oracle::interval_scan(d, g, i, j);
                bad += psi.count(i, j) != iv.count || psi.positives(i, j) != iv.positives ||
                       psi.defined(i, j) != (iv.count > 0);
                if (iv.count > 0) worst_psi = std::max(worst_psi, std::abs(psi.psi(i, j) - (iv.positives / iv.count - p)));
            }
        }
    }
    return {bad == 0 && worst_psi <= 1e-12,
            fmt("%zu table mismatches, max psi error %.3e over 100 instances (want 0 and <= 1e-12)", bad, worst_psi)};
}

Verdict c6_contiguity() {
    Rng rng(6);
    std::size_t monotone_flagged = 0, nonmonotone_missed = 0;
    for (int rep = 0; rep < 100; ++rep) {
        // Monotone step generator with levels 0.2 apart and K equal to the
        // number of steps. 2000 samples per bin keep the per-bin psi sequence
        // in step order.
        const std::size_t pieces = 2 + rng.uniform_index(4);
        std::vector<double> q(pieces);
        const double base = 0.05 + (0.9 - 0.2 * static_cast<double>(pieces - 1)) * rng.uniform();
        for (std::size_t g = 0; g < pieces; ++g) q[g] = base + 0.2 * static_cast<double>(g);
        if (rng.uniform() < 0.5) std::reverse(q.begin(), q.end());
        // Piece widths of at least 8 on [0,100].
        std::vector<double> widths(pieces);
        double total = 0;
        for (auto& w : widths) total += (w = rng.uniform());
        double at = 0;
        std::vector<double> bp{0.0};
        for (std::size_t g = 0; g < pieces; ++g) {
            at += 8.0 + (100.0 - 8.0 * static_cast<double>(pieces)) * widths[g] / total;
            bp.push_back(g + 1 == pieces ? 100.0 : at);
        }
        const Dataset d = generate_step_dataset(StepSpec(bp, q), SensitiveDistribution::uniform(0, 100), 200000,
                                                1000 + static_cast<std::uint64_t>(rep));
        monotone_flagged += kmeans_1d(d, config_1d(pieces, Method::KMeans)).diagnostics.disconnected;

        const Dataset nm = generate_step_dataset(StepSpec({0, 30, 70, 100}, {0.9, 0.1, 0.9}),
                                                 SensitiveDistribution::uniform(0, 100), 20000,
                                                 2000 + static_cast<std::uint64_t>(rep));
        nonmonotone_missed += !kmeans_1d(nm, config_1d(2, Method::KMeans)).diagnostics.disconnected;
    }
    return {monotone_flagged == 0 && nonmonotone_missed == 0,
            fmt("monotone generators flagged %zu/100 (want 0), non-monotone missed %zu/100 (want 0)",
                monotone_flagged, nonmonotone_missed)};
}

Verdict c7_ci_coverage() {
    const StepSpec spec = reference_step_spec();
    const double p = analytic_uniform_rate();
    std::vector<std::size_t> covered(spec.pieces(), 0);
    const int reps = 500;
    for (int rep = 0; rep < reps; ++rep) {
        const Dataset d = generate_step_dataset(spec, SensitiveDistribution::uniform(0, 100), 50000,
                                                static_cast<std::uint64_t>(rep));
        const GroupAssignment a = assign_groups(d, truth_partition());
        for (std::size_t g = 0; g < spec.pieces(); ++g) {
            const ConfidenceInterval ci = phi_confidence_interval(a, g, 0.95);
            const double truth = spec.values()[g] - p;
            covered[g] += ci.low <= truth && truth <= ci.high;
        }
    }
    bool ok = true;
    std::string detail = "coverage per group:";
    for (std::size_t g = 0; g < spec.pieces(); ++g) {
        const double c = static_cast<double>(covered[g]) / reps;
        ok = ok && std::abs(c - 0.95) <= 0.025;
        detail += fmt(" %.3f", c);
    }
    return {ok, detail + " (want 0.95 +- 0.025 each)"};
}

Verdict c8_debias() {
    const Dataset base = generate_step_dataset(StepSpec({0, 100}, {0.5}), SensitiveDistribution::uniform(0, 100),
                                               50000, 8);
    const Dataset d = generate_biased_scores(base, planted_bias_scorer(), 9);
    SearchConfig c = config_1d(5);
    c.target = Target::YHat;
    const SearchResult groups = fairgroups_1d(d, c);
    const std::vector<double> alphas{1.0, 0.5, 0.25, 0.0};
    DebiasOptions opt;
    opt.seed = 10;
    const DebiasReport r = debias_report(d, groups.partition, alphas, opt);
    const DebiasRow& raw = r.rows[0];
    const DebiasRow& a1 = r.rows[1];
    const DebiasRow& a0 = r.rows[4];
    const double interp = 1.0 / static_cast<double>(opt.spec.resolution);
    const bool reduce = a0.hgr <= 0.5 * raw.hgr;
    const bool acc = raw.accuracy - a0.accuracy <= 0.05;
    const bool identity = std::abs(a1.accuracy - raw.accuracy) <= interp && std::abs(a1.pr_auc - raw.pr_auc) <= interp &&
                          std::abs(a1.hgr - raw.hgr) <= interp;
    bool monotone = true;
    std::string hgrs;
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
        if (i > 1 && r.rows[i].hgr > r.rows[i - 1].hgr) monotone = false;
        hgrs += fmt(" %.4f", r.rows[i].hgr);
    }
    return {reduce && acc && identity && monotone,
            fmt("HGR baseline %.4f, alpha=0 %.4f (ratio %.3f, want <= 0.5); accuracy %.4f -> %.4f (drop <= 0.05); "
                "alpha=1 max deviation %.2e (want <= %.2e); HGR over alpha {1,.5,.25,0}:%s (nonincreasing: %s)",
                raw.hgr, a0.hgr, a0.hgr / raw.hgr, raw.accuracy, a0.accuracy,
                std::max({std::abs(a1.accuracy - raw.accuracy), std::abs(a1.pr_auc - raw.pr_auc),
                          std::abs(a1.hgr - raw.hgr)}),
                interp, hgrs.c_str(), monotone ? "yes" : "no")};
}

Verdict c9_transfer() {
    const Dataset u = generate_step_dataset(reference_step_spec(), SensitiveDistribution::uniform(0, 100), 50000, 7);
    const Dataset tn = generate_step_dataset(reference_step_spec(),
                                             SensitiveDistribution::truncated_normal(50, 20, 0, 100), 50000, 8);
    const SearchResult fit = fairgroups_1d(u, config_1d(5));
    const TransferResult t = transfer_evaluate(fit.partition, tn);
    const SearchResult refit = fairgroups_1d(tn, config_1d(5));
    const double rel = std::abs(t.variance - refit.objective) / refit.objective;
    const double ri = rand_index(t.assignment, assign_groups(tn, refit.partition));
    return {rel <= 0.2 && ri >= 0.9,
            fmt("transferred variance %.6f vs refit %.6f (relative gap %.3f, want <= 0.2), Rand index %.6f (want >= 0.9)",
                t.variance, refit.objective, rel, ri)};
}

Verdict c10_performance() {
    const Dataset d = generate_step_dataset(reference_step_spec(), SensitiveDistribution::uniform(0, 100), 50000, 10);
    SearchConfig c = config_1d(6);
    c.fast_path = false;
    auto timed = [&](std::size_t threads) {
        c.threads = threads;
        const auto t0 = std::chrono::steady_clock::now();
        SearchResult r = fairgroups_1d(d, c);
        return std::pair{std::move(r), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
    };
    const auto [one, t1] = timed(1);
    const auto [four, t4] = timed(4);
    const bool identical = one.partition == four.partition && one.objective == four.objective &&
                           one.diagnostics.candidates == four.diagnostics.candidates;
    const double speedup = t1 / t4;
    return {t1 < 60.0 && speedup >= 3.0 && identical,
            fmt("%zu candidates; 1 worker %.2f s (want < 60), 4 workers %.2f s, speedup %.2fx (want >= 3) on %u "
                "hardware thread(s); outputs bit-identical: %s",
                one.diagnostics.candidates, t1, t4, speedup, std::thread::hardware_concurrency(),
                identical ? "yes" : "no")};
}

// Runs the CLI pipeline twice in the same directory and compares every file
// it writes plus the stdout summaries. Lines carrying a timestamp field are
// dropped before comparing.
Verdict c11_determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "fairgroups_acceptance_determinism";
    auto at = [&](const std::string& name) { return (dir / name).string(); };
    const std::vector<std::vector<std::string>> pipeline{
        {"generate", "--n", "20000", "--seed", "11", "--out", at("uniform.csv")},
        {"generate", "--preset", "step-truncnormal", "--n", "20000", "--seed", "12", "--out", at("tn.csv")},
        {"generate", "--preset", "planted-bias", "--n", "20000", "--seed", "13", "--out", at("planted.csv")},
        {"partition", "--input", at("uniform.csv"), "--k", "5", "--seed", "11", "--out", at("fg.json")},
        {"partition", "--input", at("uniform.csv"), "--method", "kmeans", "--k", "5", "--out", at("km.json")},
        {"partition", "--input", at("uniform.csv"), "--k", "4", "--m", "40", "--exhaustive", "--threads", "2",
         "--out", at("ex.json")},
        {"partition", "--input", at("uniform.csv"), "--method", "fixed", "--thresholds", "20,30,55,88", "--lo", "0",
         "--hi", "100", "--out", at("gt.json")},
        {"evaluate", "--partition", at("fg.json"), "--against", at("gt.json"), "--out", at("evaluation.json")},
        {"transfer", "--partition", at("fg.json"), "--input", at("tn.csv"), "--refit", "--out", at("transfer.json")},
        {"report", "--partition", at("fg.json"), "--input", at("uniform.csv"), "--out", at("report.json")},
        {"partition", "--input", at("planted.csv"), "--target", "y_hat", "--k", "5", "--out", at("pp.json")},
        {"report", "--partition", at("pp.json"), "--input", at("planted.csv"), "--out", at("report_planted.json")},
        {"debias", "--partition", at("pp.json"), "--input", at("planted.csv"), "--alphas", "1,0.5,0.25,0", "--seed",
         "14", "--out", at("debias.json")},
        {"debias", "--partition", at("pp.json"), "--input", at("planted.csv"), "--fit-alpha", "0.25", "--out",
         at("transport.json")},
        {"debias", "--partition", at("pp.json"), "--input", at("planted.csv"), "--apply", at("transport.json"),
         "--out", at("debiased.csv")},
    };

    auto run_once = [&](std::string& failure) {
        fs::remove_all(dir);
        fs::create_directories(dir);
        std::map<std::string, std::string> files;
        for (std::size_t step = 0; step < pipeline.size(); ++step) {
            std::vector<const char*> argv{"fairgroups"};
            for (const auto& a : pipeline[step]) argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
            if (code != 0 && failure.empty()) failure = "step " + std::to_string(step + 1) + " exited " +
                                                        std::to_string(code) + ": " + err.str();
            files["<stdout " + std::to_string(step + 1) + ">"] = out.str();
        }
        for (const auto& e : fs::directory_iterator(dir)) {
            std::istringstream in(read_text_file(e.path().string()));
            std::string line, kept;
            while (std::getline(in, line))
                if (line.find("\"timestamp\"") == std::string::npos) kept += line + '\n';
            files[e.path().filename().string()] = kept;
        }
        return files;
    };

    std::string failure;
    const auto first = run_once(failure);
    const auto second = run_once(failure);
    fs::remove_all(dir);
    if (!failure.empty()) return {false, failure};
    std::vector<std::string> differing;
    for (const auto& [name, content] : first) {
        auto it = second.find(name);
        if (it == second.end() || it->second != content) differing.push_back(name);
    }
    if (first.size() != second.size()) differing.push_back("<file set>");
    std::string detail = fmt("%zu pipeline steps, %zu artifacts compared, %zu differ", pipeline.size(), first.size(),
                             differing.size());
    for (const auto& n : differing) detail += " " + n;
    return {differing.empty(), detail};
}

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all{
        {1, "uniform step recovery", 10, c1_uniform},
        {2, "truncated-normal step recovery", 10, c2_truncnormal},
        {3, "binary variance identity", 5, c3_binary_identity},
        {4, "exhaustive and fast path vs brute force", 60, c4_exhaustive_vs_oracle},
        {5, "range-sum and psi tables vs naive", 10, c5_range_tables},
        {6, "K-Means contiguity diagnostic", 30, c6_contiguity},
        {7, "delta-method CI coverage", 120, c7_ci_coverage},
        {8, "post-processing repair", 60, c8_debias},
        {9, "transfer stability", 10, c9_transfer},
        {10, "exhaustive search performance", 0, c10_performance},
        {11, "CLI determinism", 0, c11_determinism},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--only" && i + 1 < argc) {
            only = std::stoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: acceptance [--only N]\n");
            return 64;
        }
    }
    int failures = 0, ran = 0;
    for (const Criterion& c : criteria()) {
        if (only != 0 && c.id != only) continue;
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::string timing = fmt("%.2f s", secs);
        if (c.budget_s > 0) {
            timing += fmt(" (budget %.0f s)", c.budget_s);
            if (secs > c.budget_s) {
                v.pass = false;
                timing += " over budget";
            }
        }
        std::printf("criterion %d: %s  %s: %s [%s]\n", c.id, v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str(),
                    timing.c_str());
        std::fflush(stdout);
        failures += !v.pass;
    }
    if (ran == 0) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 64;
    }
    return failures == 0 ? 0 : 1;
}
