#pragma once
// Batch front end: generate -> partition -> evaluate -> transfer -> debias -> report.
//
// Exit codes: 0 success, 1 validation/parse/io error, 2 infeasible search.
// Errors go to stderr as "error[<kind>]: <message>", progress lines to stderr,
// and a one-line JSON summary to stdout. Every run writes
// <primary output>.manifest.json next to its primary output.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fairgroups/fairgroups.hpp"

namespace fairgroups::cli {

using Json = nlohmann::json;

// Flag values; unset ones fall back to the config file, then to defaults.
struct Flags {
    std::optional<std::string> input, output, method, target, scheme;
    std::optional<std::vector<double>> thresholds, thresholds_y, alphas;
    std::optional<std::size_t> k, m, m_y, min_group_count, resolution, hgr_bins;
    std::optional<double> lo, hi, lo_y, hi_y, level, train_fraction;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;

    void apply(RunConfig& c) const {
        auto put = [](auto& dst, const auto& src) {
            if (src) dst = *src;
        };
        put(c.input, input);
        put(c.output, output);
        put(c.method, method);
        put(c.target, target);
        put(c.scheme, scheme);
        put(c.thresholds, thresholds);
        put(c.thresholds_y, thresholds_y);
        put(c.alphas, alphas);
        put(c.k, k);
        put(c.m_y, m_y);
        put(c.min_group_count, min_group_count);
        put(c.resolution, resolution);
        put(c.hgr_bins, hgr_bins);
        if (m) c.m = m;
        if (lo) c.lo = lo;
        if (hi) c.hi = hi;
        if (lo_y) c.lo_y = lo_y;
        if (hi_y) c.hi_y = hi_y;
        put(c.level, level);
        put(c.train_fraction, train_fraction);
        put(c.seed, seed);
        put(c.threads, threads);
    }
};

struct Manifest {
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
};

inline Json file_entry(const std::string& path) {
    const std::string bytes = read_text_file(path);
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(bytes);
    return Json{{"path", path}, {"bytes", bytes.size()}, {"fnv1a64", hex.str()}};
}

class Runner {
public:
    Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

    int run(int argc, const char* const* argv);

private:
    std::string path_in_output(const std::string& name) const {
        return (std::filesystem::path(cfg_.output) / name).string();
    }

    std::string primary(const std::optional<std::string>& explicit_out, const std::string& name) const {
        return explicit_out ? *explicit_out : path_in_output(name);
    }

    void progress(const std::string& msg) { err_ << "fairgroups: " << msg << '\n'; }

    void report_warnings(const Warnings& w) {
        for (const auto& m : w) err_ << "warning: " << m << '\n';
    }

    Dataset load(const std::string& path) {
        if (path.empty()) throw ValidationError("an input dataset is required (--input)");
        Warnings w;
        Dataset d = read_dataset(path, &w);
        report_warnings(w);
        manifest_.inputs.push_back(path);
        progress("read " + std::to_string(d.size()) + " samples from " + path);
        return d;
    }

    Partition load_partition(const std::string& path) {
        if (path.empty()) throw ValidationError("a partition file is required (--partition)");
        Partition p = read_partition(path);
        manifest_.inputs.push_back(path);
        return p;
    }

    void emit(const std::string& path, const std::string& content) {
        const auto parent = std::filesystem::path(path).parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent);
        write_text_file(path, content);
        manifest_.outputs.push_back(path);
    }

    void finish(const std::string& primary_path, Json summary) {
        Json m;
        m["subcommand"] = subcommand_;
        m["argv"] = args_;
        Json inputs = Json::array(), outputs = Json::array();
        for (const auto& p : manifest_.inputs) inputs.push_back(file_entry(p));
        for (const auto& p : manifest_.outputs) outputs.push_back(file_entry(p));
        m["inputs"] = inputs;
        m["outputs"] = outputs;
        m["seed"] = cfg_.seed;
        m["version"] = std::string(kVersion);
        m["timestamp"] = current_timestamp();
        const std::string manifest_path = primary_path + ".manifest.json";
        write_text_file(manifest_path, m.dump(2) + "\n");
        summary["subcommand"] = subcommand_;
        summary["output"] = primary_path;
        summary["manifest"] = manifest_path;
        out_ << summary.dump() << '\n';
    }

    Provenance stamp(const Dataset& data, Provenance p) const {
        p.n = data.size();
        p.seed = cfg_.seed;
        p.timestamp = current_timestamp();
        p.input = cfg_.input;
        return p;
    }

    void cmd_generate();
    void cmd_partition();
    void cmd_evaluate();
    void cmd_transfer();
    void cmd_debias();
    void cmd_report();

    SearchConfig search_config(std::size_t dimension) const {
        SearchConfig s;
        s.k = cfg_.k;
        s.method = parse_method(cfg_.method);
        s.target = parse_target(cfg_.target);
        s.min_group_count = cfg_.min_group_count;
        s.threads = cfg_.threads;
        s.level = cfg_.level;
        s.fast_path = !exhaustive_;
        s.axis_x = AxisSpec{.bins = cfg_.m.value_or(dimension == 1 ? 100 : 20), .lo = cfg_.lo, .hi = cfg_.hi,
                            .edges = {}};
        s.axis_y = AxisSpec{.bins = cfg_.m_y, .lo = cfg_.lo_y, .hi = cfg_.hi_y, .edges = {}};
        return s;
    }

    std::ostream& out_;
    std::ostream& err_;
    RunConfig cfg_;
    Flags flags_;
    Manifest manifest_;
    std::string subcommand_;
    std::vector<std::string> args_;
    bool exhaustive_ = false;
    std::optional<std::string> out_path_;
    std::string preset_ = "step-uniform", scorer_ = "none", partition_path_, against_path_, apply_path_;
    std::size_t n_ = 50000;
    std::optional<double> fit_alpha_;
    bool refit_ = false;
};

inline Dataset generate_preset(const std::string& preset, const std::string& scorer, std::size_t n,
                               std::uint64_t seed) {
    Dataset d = [&] {
        if (preset == "step-uniform")
            return generate_step_dataset(reference_step_spec(), SensitiveDistribution::uniform(0.0, 100.0), n, seed);
        if (preset == "step-truncnormal")
            return generate_step_dataset(reference_step_spec(),
                                         SensitiveDistribution::truncated_normal(50.0, 20.0, 0.0, 100.0), n, seed);
        if (preset == "planted-bias")
            return generate_step_dataset(StepSpec({0.0, 100.0}, {0.5}), SensitiveDistribution::uniform(0.0, 100.0), n,
                                         seed);
        throw ValidationError("unknown preset '" + preset +
                              "' (expected step-uniform, step-truncnormal or planted-bias)");
    }();
    const bool planted = scorer == "planted" || (preset == "planted-bias" && scorer == "none");
    if (scorer != "none" && scorer != "planted")
        throw ValidationError("unknown scorer '" + scorer + "' (expected none or planted)");
    if (planted) d = generate_biased_scores(d, planted_bias_scorer(), seed + 1);
    return d;
}

inline void Runner::cmd_generate() {
    const std::string path = primary(out_path_, "data.csv");
    progress("generating " + std::to_string(n_) + " samples (" + preset_ + ", seed " + std::to_string(cfg_.seed) + ")");
    const Dataset d = generate_preset(preset_, scorer_, n_, cfg_.seed);
    emit(path, format_dataset(d));
    finish(path, Json{{"n", d.size()}, {"preset", preset_}});
}

inline void Runner::cmd_partition() {
    const std::string path = primary(out_path_, "partition.json");
    const Method method = parse_method(cfg_.method);
    std::optional<Dataset> data;
    if (!cfg_.input.empty() || method != Method::Fixed) data = load(cfg_.input);

    Json summary;
    if (method == Method::Fixed) {
        std::optional<Partition> p;
        if (!cfg_.scheme.empty()) {
            FixedRanges r;
            if (cfg_.lo) r.lo_x = *cfg_.lo;
            if (cfg_.hi) r.hi_x = *cfg_.hi;
            if (cfg_.lo_y) r.lo_y = *cfg_.lo_y;
            if (cfg_.hi_y) r.hi_y = *cfg_.hi_y;
            p = fixed_partition(parse_fixed_scheme(cfg_.scheme), r);
        } else {
            auto bound = [&](const std::optional<double>& v, std::size_t axis, bool upper) {
                if (v) return *v;
                if (!data) throw ValidationError("fixed thresholds need --lo/--hi or an input dataset");
                const auto c = data->coordinate(axis);
                return upper ? *std::max_element(c.begin(), c.end()) : *std::min_element(c.begin(), c.end());
            };
            if (cfg_.thresholds_y.empty()) {
                p = fixed_partition(cfg_.thresholds, bound(cfg_.lo, 0, false), bound(cfg_.hi, 0, true));
            } else {
                p = fixed_partition_2d(cfg_.thresholds, cfg_.thresholds_y, bound(cfg_.lo, 0, false),
                                       bound(cfg_.hi, 0, true), bound(cfg_.lo_y, 1, false), bound(cfg_.hi_y, 1, true));
            }
        }
        p->provenance.target = cfg_.target;
        if (data) {
            Warnings w;
            const GroupAssignment a =
                assign_groups(*data, *p, parse_target(cfg_.target), OutOfRange::Clamp, &w);
            report_warnings(w);
            p->provenance = stamp(*data, p->provenance);
            p->provenance.objective = partition_variance(a, FairnessMeasure::OneVsAllDI, EmptyGroups::Skip);
        } else {
            p->provenance.seed = cfg_.seed;
            p->provenance.timestamp = current_timestamp();
        }
        emit(path, format_partition(*p));
        summary["k"] = p->group_count();
        summary["objective"] = p->provenance.objective ? Json(*p->provenance.objective) : Json(nullptr);
        finish(path, summary);
        return;
    }

    const SearchConfig sc = search_config(data->dimension());
    progress("searching " + std::string(to_string(method)) + " partition with K=" + std::to_string(sc.k));
    SearchResult r = search(*data, sc);
    report_warnings(r.diagnostics.warnings);
    r.partition.provenance = stamp(*data, r.partition.provenance);
    emit(path, format_partition(r.partition));
    summary["k"] = r.partition.group_count();
    summary["objective"] = r.objective;
    summary["candidates"] = r.diagnostics.candidates;
    summary["disconnected"] = r.diagnostics.disconnected;
    finish(path, summary);
}

inline void Runner::cmd_evaluate() {
    const std::string path = primary(out_path_, "evaluation.json");
    const Partition a = load_partition(partition_path_);
    const Partition b = load_partition(against_path_);
    const std::string input = !cfg_.input.empty() ? cfg_.input : a.provenance.input;
    if (input.empty()) throw ValidationError("no dataset: pass --input or use a partition that records its input");
    const Dataset data = load(input);
    const Target target = parse_target(cfg_.target);
    Warnings w;
    const GroupAssignment ga = assign_groups(data, a, target, OutOfRange::Clamp, &w);
    const GroupAssignment gb = assign_groups(data, b, target, OutOfRange::Clamp, &w);
    report_warnings(w);
    Json j;
    j["n"] = data.size();
    j["input"] = input;
    j["rand_index"] = rand_index(ga, gb);
    j["variance_partition"] = partition_variance(ga, FairnessMeasure::OneVsAllDI, EmptyGroups::Skip);
    j["variance_against"] = partition_variance(gb, FairnessMeasure::OneVsAllDI, EmptyGroups::Skip);
    emit(path, j.dump(2) + "\n");
    finish(path, Json{{"rand_index", j["rand_index"]}});
}

inline Json stats_json(const GroupStats& s) {
    Json groups = Json::array();
    for (std::size_t k = 0; k < s.groups.size(); ++k) {
        const GroupStat& g = s.groups[k];
        groups.push_back({{"group", k + 1},
                          {"count", g.count},
                          {"positives", g.positives},
                          {"weight", g.weight},
                          {"rate", g.rate},
                          {"phi", g.phi},
                          {"ci_low", g.ci_low},
                          {"ci_high", g.ci_high}});
    }
    return groups;
}

inline void Runner::cmd_transfer() {
    const std::string path = primary(out_path_, "transfer.json");
    const Partition p = load_partition(partition_path_);
    const Dataset data = load(cfg_.input);
    const Target target = parse_target(cfg_.target);
    TransferResult t = transfer_evaluate(p, data, target, cfg_.level);
    report_warnings(t.warnings);
    Json j;
    j["n"] = data.size();
    j["variance"] = t.variance;
    j["overall_rate"] = t.stats.overall_rate;
    j["groups"] = stats_json(t.stats);
    Json empty = Json::array();
    for (std::size_t k : t.empty_groups) empty.push_back(k + 1);
    j["empty_groups"] = empty;
    j["clamped"] = t.assignment.clamped;
    Json summary{{"variance", t.variance}};
    if (refit_) {
        if (!p.is_segmented() && p.dimension() == 1)
            throw ValidationError("refit needs a segment partition");
        SearchConfig sc = search_config(data.dimension());
        sc.k = p.group_count();
        if (!cfg_.m) {
            sc.axis_x.bins = p.axis(0).bins();
            if (p.dimension() == 2) sc.axis_y.bins = p.axis(1).bins();
        }
        progress("refitting on " + cfg_.input);
        const SearchResult r = search(data, sc);
        const GroupAssignment refit = assign_groups(data, r.partition, target);
        j["refit_variance"] = r.objective;
        j["variance_ratio"] = t.variance / r.objective;
        j["rand_index_refit"] = rand_index(t.assignment, refit);
        summary["refit_variance"] = r.objective;
        summary["rand_index_refit"] = j["rand_index_refit"];
    }
    emit(path, j.dump(2) + "\n");
    finish(path, summary);
}

inline void Runner::cmd_debias() {
    const Dataset data = load(cfg_.input);
    if (!apply_path_.empty()) {
        const std::string path = primary(out_path_, "debiased.csv");
        const Partition p = load_partition(partition_path_);
        const TransportMap map = read_transport(apply_path_);
        manifest_.inputs.push_back(apply_path_);
        if (!data.has_score()) throw ValidationError("applying a transport map needs a score column");
        Warnings w;
        const GroupAssignment a = assign_groups(data, p, Target::Y, OutOfRange::Clamp, &w);
        const std::vector<double> scores = data.scores();
        const std::vector<double> repaired = transform_scores(map, scores, a.labels, &w);
        report_warnings(w);
        std::vector<Sample> samples(data.samples().begin(), data.samples().end());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            samples[i].score = repaired[i];
            samples[i].y_hat = repaired[i] > kScoreThreshold ? 1 : 0;
        }
        emit(path, format_dataset(Dataset(std::move(samples), data.dimension())));
        finish(path, Json{{"n", data.size()}, {"alpha", map.alpha}});
        return;
    }
    const Partition p = load_partition(partition_path_);
    if (fit_alpha_) {
        const std::string path = primary(out_path_, "transport.json");
        if (!data.has_score()) throw ValidationError("fitting a transport map needs a score column");
        const GroupAssignment a = assign_groups(data, p, Target::Y, OutOfRange::Clamp);
        const TransportMap map = fit_postprocessor(data.scores(), a, *fit_alpha_, BarycenterSpec{cfg_.resolution});
        emit(path, format_transport(map));
        finish(path, Json{{"alpha", map.alpha}, {"t", map.t}, {"max_gap", map.max_gap}});
        return;
    }
    const std::string path = primary(out_path_, "debias.json");
    DebiasOptions opt;
    opt.spec.resolution = cfg_.resolution;
    opt.seed = cfg_.seed;
    opt.train_fraction = cfg_.train_fraction;
    opt.hgr_bins = cfg_.hgr_bins;
    progress("fitting transport maps for " + std::to_string(cfg_.alphas.size()) + " alpha value(s)");
    const DebiasReport rep = debias_report(data, p, cfg_.alphas, opt);
    report_warnings(rep.warnings);
    Json rows = Json::array();
    std::string csv = "alpha,t,accuracy,pr_auc,hgr\n";
    for (const DebiasRow& r : rep.rows) {
        rows.push_back({{"alpha", r.alpha ? Json(*r.alpha) : Json(nullptr)},
                        {"t", r.t},
                        {"accuracy", r.accuracy},
                        {"pr_auc", r.pr_auc},
                        {"hgr", r.hgr}});
        csv += (r.alpha ? format_double(*r.alpha) : std::string("baseline")) + "," + format_double(r.t) + "," +
               format_double(r.accuracy) + "," + format_double(r.pr_auc) + "," + format_double(r.hgr) + "\n";
    }
    Json j{{"train_size", rep.train_size}, {"test_size", rep.test_size}, {"rows", rows}};
    emit(path, j.dump(2) + "\n");
    emit(path.substr(0, path.size() - (path.ends_with(".json") ? 5 : 0)) + ".csv", csv);
    finish(path, Json{{"rows", rep.rows.size()}});
}

inline void Runner::cmd_report() {
    const std::string path = primary(out_path_, "report.json");
    const Partition p = load_partition(partition_path_);
    const Dataset data = load(cfg_.input);
    const Target target = parse_target(cfg_.target);
    Warnings w;
    const GroupAssignment a = assign_groups(data, p, target, OutOfRange::Clamp, &w);
    const GroupStats stats = group_stats(a, cfg_.level, &w);
    const double variance = partition_variance(a, FairnessMeasure::OneVsAllDI, EmptyGroups::Skip);
    std::optional<AmplificationReport> amp;
    if (data.has_y_hat() && target == Target::Y) amp = bias_amplification_report(data, p, cfg_.level);
    report_warnings(w);

    Json j;
    j["n"] = data.size();
    j["k"] = p.group_count();
    j["target"] = cfg_.target;
    j["level"] = cfg_.level;
    j["variance"] = variance;
    j["overall_rate"] = stats.overall_rate;
    j["groups"] = stats_json(stats);
    if (p.is_segmented()) {
        const auto edges = p.axis(0).edges();
        const auto b = p.boundaries();
        for (std::size_t k = 0; k < p.group_count(); ++k) {
            j["groups"][k]["lo"] = edges[b[k]];
            j["groups"][k]["hi"] = edges[b[k + 1]];
        }
    }
    std::string csv = "group,count,positives,weight,rate,phi,ci_low,ci_high";
    if (amp) csv += ",phi_y_hat,ci_y_hat_low,ci_y_hat_high,flagged";
    csv += '\n';
    for (std::size_t k = 0; k < stats.groups.size(); ++k) {
        const GroupStat& g = stats.groups[k];
        csv += std::to_string(k + 1) + "," + std::to_string(g.count) + "," + std::to_string(g.positives) + "," +
               format_double(g.weight) + "," + format_double(g.rate) + "," + format_double(g.phi) + "," +
               format_double(g.ci_low) + "," + format_double(g.ci_high);
        if (amp) {
            auto row = std::find_if(amp->rows.begin(), amp->rows.end(),
                                    [&](const AmplificationRow& r) { return r.group == k; });
            if (row == amp->rows.end()) {
                csv += ",,,,";
            } else {
                csv += "," + format_double(row->phi_y_hat) + "," + format_double(row->ci_y_hat.low) + "," +
                       format_double(row->ci_y_hat.high) + "," + (row->flagged ? "1" : "0");
            }
        }
        csv += '\n';
    }
    if (amp) {
        Json rows = Json::array();
        for (const AmplificationRow& r : amp->rows)
            rows.push_back({{"group", r.group + 1},
                            {"phi_y", r.phi_y},
                            {"phi_y_hat", r.phi_y_hat},
                            {"ci_y", {r.ci_y.low, r.ci_y.high}},
                            {"ci_y_hat", {r.ci_y_hat.low, r.ci_y_hat.high}},
                            {"flagged", r.flagged}});
        j["amplification"] = rows;
    }
    emit(path, j.dump(2) + "\n");
    emit(path.substr(0, path.size() - (path.ends_with(".json") ? 5 : 0)) + ".csv", csv);
    finish(path, Json{{"variance", variance}, {"k", p.group_count()}});
}

inline int Runner::run(int argc, const char* const* argv) {
    for (int i = 1; i < argc; ++i) args_.emplace_back(argv[i]);

    CLI::App app{"Fair partitions of a continuous sensitive attribute", "fairgroups"};
    app.require_subcommand(1);
    app.fallthrough();
    std::optional<std::string> config_path;
    app.add_option("--seed", flags_.seed, "random seed");
    app.add_option("--config", config_path, "JSON run configuration; flags override its values");
    app.add_option("--output", flags_.output, "output directory");
    app.add_option("--out", out_path_, "primary output file (overrides the default name in --output)");
    app.add_option("--threads", flags_.threads, "search workers");
    app.add_option("--input", flags_.input, "dataset CSV");
    app.add_option("--target", flags_.target, "outcome column: y, y_hat or score");
    app.add_option("--level", flags_.level, "confidence level");

    auto* gen = app.add_subcommand("generate", "write a synthetic dataset");
    gen->add_option("--preset", preset_, "step-uniform, step-truncnormal or planted-bias");
    gen->add_option("--n", n_, "sample count");
    gen->add_option("--scorer", scorer_, "none or planted");

    auto* part = app.add_subcommand("partition", "fit a partition");
    part->add_option("--method", flags_.method, "fairgroups, kmeans or fixed");
    part->add_option("--k", flags_.k, "number of groups");
    part->add_option("--m", flags_.m, "bins on the first axis");
    part->add_option("--lo", flags_.lo);
    part->add_option("--hi", flags_.hi);
    part->add_option("--m-y", flags_.m_y, "bins on the second axis (2D)");
    part->add_option("--lo-y", flags_.lo_y);
    part->add_option("--hi-y", flags_.hi_y);
    part->add_option("--min-count", flags_.min_group_count, "smallest allowed group");
    part->add_flag("--exhaustive", exhaustive_, "enumerate all cut placements instead of the dynamic program");
    part->add_option("--scheme", flags_.scheme, "fixed scheme: fitzpatrick, l60 or default2d");
    part->add_option("--thresholds", flags_.thresholds, "fixed thresholds on the first axis")->delimiter(',');
    part->add_option("--thresholds-y", flags_.thresholds_y, "fixed thresholds on the second axis")->delimiter(',');

    auto* eval = app.add_subcommand("evaluate", "compare two partitions on a dataset");
    eval->add_option("--partition", partition_path_)->required();
    eval->add_option("--against", against_path_)->required();

    auto* tr = app.add_subcommand("transfer", "evaluate a fitted partition on another dataset");
    tr->add_option("--partition", partition_path_)->required();
    tr->add_flag("--refit", refit_, "also refit on the new dataset and compare");
    tr->add_option("--m", flags_.m, "bins for the refit");

    auto* deb = app.add_subcommand("debias", "post-process scores toward group parity");
    deb->add_option("--partition", partition_path_)->required();
    deb->add_option("--alphas", flags_.alphas)->delimiter(',');
    deb->add_option("--fit-alpha", fit_alpha_, "fit one transport map on the whole input and save it");
    deb->add_option("--apply", apply_path_, "apply a saved transport map to the input scores");
    deb->add_option("--resolution", flags_.resolution, "quantile grid size");
    deb->add_option("--train-fraction", flags_.train_fraction);
    deb->add_option("--hgr-bins", flags_.hgr_bins);

    auto* rep = app.add_subcommand("report", "per-group statistics and confidence intervals");
    rep->add_option("--partition", partition_path_)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success&) {
        out_ << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err_ << "error[usage]: " << e.what() << '\n';
        return 1;
    }

    try {
        if (config_path) {
            cfg_ = read_run_config(*config_path);
            manifest_.inputs.push_back(*config_path);
        }
        flags_.apply(cfg_);
        subcommand_ = app.get_subcommands().front()->get_name();
        if (subcommand_ == "generate") cmd_generate();
        else if (subcommand_ == "partition") cmd_partition();
        else if (subcommand_ == "evaluate") cmd_evaluate();
        else if (subcommand_ == "transfer") cmd_transfer();
        else if (subcommand_ == "debias") cmd_debias();
        else cmd_report();
        return 0;
    } catch (const InfeasibleError& e) {
        err_ << "error[infeasible]: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        err_ << "error[parse]: " << e.what() << '\n';
    } catch (const IoError& e) {
        err_ << "error[io]: " << e.what() << '\n';
    } catch (const OutOfRangeError& e) {
        err_ << "error[out_of_range]: " << e.what() << '\n';
    } catch (const DomainError& e) {
        err_ << "error[domain]: " << e.what() << '\n';
    } catch (const Error& e) {
        err_ << "error[validation]: " << e.what() << '\n';
    } catch (const std::filesystem::filesystem_error& e) {
        err_ << "error[io]: " << e.what() << '\n';
    }
    return 1;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Runner r(out, err);
    return r.run(argc, argv);
}

}  // namespace fairgroups::cli
