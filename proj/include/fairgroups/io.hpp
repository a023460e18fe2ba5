#pragma once
// File formats: CSV datasets, JSON partitions and transport maps, JSON run
// configurations.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairgroups/core.hpp"
#include "fairgroups/debias.hpp"

namespace fairgroups {

class IoError : public Error {
public:
    using Error::Error;
};

inline constexpr int kPartitionSchemaVersion = 1;
inline constexpr int kTransportSchemaVersion = 1;
inline constexpr std::string_view kPartitionSchema = "fairgroups.partition";
inline constexpr std::string_view kTransportSchema = "fairgroups.transport";

// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// UTC ISO-8601; SOURCE_DATE_EPOCH, when set, replaces the clock.
inline std::string current_timestamp() {
    std::time_t t;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    } else {
        t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("failed writing '" + path + "'");
}

inline std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// ---------------------------------------------------------------------------
// CSV datasets

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline double parse_real(std::string_view field, std::size_t line, std::string_view column) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v))
        throw ParseError(line, "line " + std::to_string(line) + ": column '" + std::string(column) +
                                   "' is not a finite number: '" + std::string(field) + "'");
    return v;
}

inline int parse_binary(std::string_view field, std::size_t line, std::string_view column) {
    const double v = parse_real(field, line, column);
    if (v != 0.0 && v != 1.0)
        throw ParseError(line, "line " + std::to_string(line) + ": column '" + std::string(column) +
                                   "' must be 0 or 1, got '" + std::string(field) + "'");
    return v == 1.0 ? 1 : 0;
}

}  // namespace detail

// Columns: l (1D) or l1,l2 (2D); y; optional score and y_hat; any order.
// Line numbers in errors are 1-based with the header on line 1.
inline Dataset parse_dataset(std::istream& in, Warnings* warnings = nullptr) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        if (detail::trim(view).empty()) continue;
        for (auto f : detail::split_commas(view)) header.emplace_back(f);
        break;
    }
    if (header.empty()) throw ParseError(line_no == 0 ? 1 : line_no, "missing header row");

    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::size_t col_l = none, col_l1 = none, col_l2 = none, col_y = none, col_score = none, col_yhat = none;
    for (std::size_t c = 0; c < header.size(); ++c) {
        std::size_t* slot = nullptr;
        if (header[c] == "l") slot = &col_l;
        else if (header[c] == "l1") slot = &col_l1;
        else if (header[c] == "l2") slot = &col_l2;
        else if (header[c] == "y") slot = &col_y;
        else if (header[c] == "score") slot = &col_score;
        else if (header[c] == "y_hat") slot = &col_yhat;
        if (!slot) {
            warn(warnings, "ignoring unknown column '" + header[c] + "'");
            continue;
        }
        if (*slot != none) throw ParseError(line_no, "duplicate column '" + header[c] + "'");
        *slot = c;
    }
    if (col_y == none) throw ParseError(line_no, "missing column 'y'");
    std::size_t dimension;
    if (col_l != none) {
        if (col_l1 != none || col_l2 != none) throw ParseError(line_no, "use either 'l' or 'l1,l2', not both");
        dimension = 1;
    } else if (col_l1 != none && col_l2 != none) {
        dimension = 2;
    } else {
        throw ParseError(line_no, "missing sensitive column: expected 'l' or 'l1,l2'");
    }

    std::vector<Sample> samples;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_commas(line);
        if (fields.size() != header.size())
            throw ParseError(line_no, "line " + std::to_string(line_no) + ": expected " +
                                          std::to_string(header.size()) + " fields, found " +
                                          std::to_string(fields.size()));
        Sample s;
        if (dimension == 1) {
            s.l[0] = detail::parse_real(fields[col_l], line_no, "l");
        } else {
            s.l[0] = detail::parse_real(fields[col_l1], line_no, "l1");
            s.l[1] = detail::parse_real(fields[col_l2], line_no, "l2");
        }
        s.y = detail::parse_binary(fields[col_y], line_no, "y");
        if (col_score != none) {
            const double v = detail::parse_real(fields[col_score], line_no, "score");
            if (!(v >= 0.0 && v <= 1.0))
                throw ParseError(line_no, "line " + std::to_string(line_no) + ": score must lie in [0,1]");
            s.score = v;
        }
        if (col_yhat != none) s.y_hat = detail::parse_binary(fields[col_yhat], line_no, "y_hat");
        samples.push_back(s);
    }
    if (samples.empty()) throw ParseError(line_no, "dataset has no rows");
    return Dataset(std::move(samples), dimension);
}

inline Dataset read_dataset(const std::string& path, Warnings* warnings = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return parse_dataset(in, warnings);
}

inline std::string format_dataset(const Dataset& data) {
    std::string out = data.dimension() == 1 ? "l" : "l1,l2";
    out += ",y";
    if (data.has_score()) out += ",score";
    if (data.has_y_hat()) out += ",y_hat";
    out += '\n';
    for (const Sample& s : data.samples()) {
        out += format_double(s.l[0]);
        if (data.dimension() == 2) {
            out += ',';
            out += format_double(s.l[1]);
        }
        out += s.y ? ",1" : ",0";
        if (data.has_score()) {
            out += ',';
            out += format_double(*s.score);
        }
        if (data.has_y_hat()) out += *s.y_hat ? ",1" : ",0";
        out += '\n';
    }
    return out;
}

inline void write_dataset(const Dataset& data, const std::string& path) { write_text_file(path, format_dataset(data)); }

// ---------------------------------------------------------------------------
// JSON artifacts

using Json = nlohmann::json;

namespace detail {

inline Json parse_json(std::string_view text, std::string_view what) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n')) + 1;
        throw ParseError(line, std::string(what) + ": malformed JSON at line " + std::to_string(line));
    }
}

// Typed field access that reports schema problems as parse errors.
template <typename T>
T field(const Json& j, const char* key, std::string_view what) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(0, std::string(what) + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception&) {
        throw ParseError(0, std::string(what) + ": field '" + key + "' has the wrong type");
    }
}

inline void check_schema(const Json& j, std::string_view schema, int version, std::string_view what) {
    if (!j.is_object()) throw ParseError(0, std::string(what) + ": top level must be an object");
    if (field<std::string>(j, "schema", what) != schema)
        throw ParseError(0, std::string(what) + ": schema is not '" + std::string(schema) + "'");
    const int v = field<int>(j, "schema_version", what);
    if (v != version)
        throw ParseError(0, std::string(what) + ": unsupported schema_version " + std::to_string(v) + " (expected " +
                                std::to_string(version) + ")");
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace detail

inline Json partition_to_json(const Partition& p) {
    Json j;
    j["schema"] = kPartitionSchema;
    j["schema_version"] = kPartitionSchemaVersion;
    j["dimension"] = p.dimension();
    j["k"] = p.group_count();
    Json grid = Json::array();
    for (const Grid& g : p.axes()) grid.push_back(std::vector<double>(g.edges().begin(), g.edges().end()));
    j["grid"] = grid;
    if (p.dimension() == 2) {
        Json rects = Json::array();
        for (const Rect& r : p.rects()) rects.push_back({r.x0, r.x1, r.y0, r.y1});
        j["rectangles"] = rects;
    } else if (p.is_segmented()) {
        j["boundaries"] = std::vector<std::size_t>(p.boundaries().begin(), p.boundaries().end());
    } else {
        j["bin_labels"] = std::vector<std::size_t>(p.bin_labels().begin(), p.bin_labels().end());
    }
    const Provenance& pv = p.provenance;
    j["method"] = pv.method;
    j["measure"] = pv.measure;
    j["target"] = pv.target;
    j["objective"] = pv.objective ? Json(*pv.objective) : Json(nullptr);
    j["fit"] = {{"n", pv.n}, {"seed", pv.seed}, {"timestamp", pv.timestamp}, {"input", pv.input}};
    return j;
}

inline Partition partition_from_json(const Json& j) {
    constexpr std::string_view what = "partition";
    detail::check_schema(j, kPartitionSchema, kPartitionSchemaVersion, what);
    const auto dim = detail::field<std::size_t>(j, "dimension", what);
    const auto k = detail::field<std::size_t>(j, "k", what);
    const auto edges = detail::field<std::vector<std::vector<double>>>(j, "grid", what);
    if (dim != 1 && dim != 2) throw ParseError(0, "partition: dimension must be 1 or 2");
    if (edges.size() != dim) throw ParseError(0, "partition: grid must list one edge array per dimension");

    std::optional<Partition> p;
    try {
        if (dim == 2) {
            std::vector<Rect> rects;
            for (const auto& r : detail::field<std::vector<std::array<std::size_t, 4>>>(j, "rectangles", what))
                rects.push_back(Rect{r[0], r[1], r[2], r[3]});
            p = Partition::rectangles(Grid(edges[0]), Grid(edges[1]), std::move(rects));
        } else if (j.contains("boundaries")) {
            p = Partition::segments(Grid(edges[0]), detail::field<std::vector<std::size_t>>(j, "boundaries", what));
        } else {
            p = Partition::labelled_bins(Grid(edges[0]), detail::field<std::vector<std::size_t>>(j, "bin_labels", what));
        }
    } catch (const ValidationError& e) {
        throw ParseError(0, std::string("partition: ") + e.what());
    }
    if (p->group_count() != k) throw ParseError(0, "partition: k does not match the listed groups");

    Provenance& pv = p->provenance;
    pv.method = detail::field<std::string>(j, "method", what);
    pv.measure = detail::field<std::string>(j, "measure", what);
    pv.target = detail::field<std::string>(j, "target", what);
    if (!j.contains("objective")) throw ParseError(0, "partition: missing field 'objective'");
    if (!j["objective"].is_null()) pv.objective = detail::field<double>(j, "objective", what);
    const Json fit = detail::field<Json>(j, "fit", what);
    pv.n = detail::field<std::uint64_t>(fit, "n", what);
    pv.seed = detail::field<std::uint64_t>(fit, "seed", what);
    pv.timestamp = detail::field<std::string>(fit, "timestamp", what);
    pv.input = detail::field<std::string>(fit, "input", what);
    return std::move(*p);
}

inline std::string format_partition(const Partition& p) { return detail::dump(partition_to_json(p)); }

inline Partition parse_partition(std::string_view text) {
    return partition_from_json(detail::parse_json(text, "partition"));
}

inline void write_partition(const Partition& p, const std::string& path) { write_text_file(path, format_partition(p)); }

inline Partition read_partition(const std::string& path) { return parse_partition(read_text_file(path)); }

inline Json transport_to_json(const TransportMap& m) {
    Json j;
    j["schema"] = kTransportSchema;
    j["schema_version"] = kTransportSchemaVersion;
    j["alpha"] = m.alpha;
    j["t"] = m.t;
    j["max_gap"] = m.max_gap;
    j["resolution"] = m.resolution;
    j["barycenter"] = m.barycenter;
    Json groups = Json::array();
    for (const GroupTransport& g : m.groups)
        groups.push_back({{"count", g.count}, {"weight", g.weight}, {"source", g.source}, {"target", g.target}});
    j["groups"] = groups;
    return j;
}

inline TransportMap transport_from_json(const Json& j) {
    constexpr std::string_view what = "transport";
    detail::check_schema(j, kTransportSchema, kTransportSchemaVersion, what);
    TransportMap m;
    m.alpha = detail::field<double>(j, "alpha", what);
    m.t = detail::field<double>(j, "t", what);
    m.max_gap = detail::field<double>(j, "max_gap", what);
    m.resolution = detail::field<std::size_t>(j, "resolution", what);
    m.barycenter = detail::field<std::vector<double>>(j, "barycenter", what);
    if (m.resolution < 16 || m.barycenter.size() != m.resolution)
        throw ParseError(0, "transport: barycenter length does not match resolution");
    for (const Json& g : detail::field<Json>(j, "groups", what)) {
        GroupTransport t;
        t.count = detail::field<std::size_t>(g, "count", what);
        t.weight = detail::field<double>(g, "weight", what);
        t.source = detail::field<std::vector<double>>(g, "source", what);
        t.target = detail::field<std::vector<double>>(g, "target", what);
        if (t.source.size() != m.resolution || t.target.size() != m.resolution)
            throw ParseError(0, "transport: quantile arrays do not match resolution");
        m.groups.push_back(std::move(t));
    }
    if (m.groups.empty()) throw ParseError(0, "transport: no groups");
    return m;
}

inline std::string format_transport(const TransportMap& m) { return detail::dump(transport_to_json(m)); }

inline TransportMap parse_transport(std::string_view text) {
    return transport_from_json(detail::parse_json(text, "transport"));
}

inline void write_transport(const TransportMap& m, const std::string& path) {
    write_text_file(path, format_transport(m));
}

inline TransportMap read_transport(const std::string& path) { return parse_transport(read_text_file(path)); }

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
    std::string input;  // required by every subcommand that reads data
    std::string output = ".";
    std::string method = "fairgroups";
    std::string target = "y";
    std::string scheme;
    std::vector<double> thresholds;
    std::vector<double> thresholds_y;
    std::size_t k = 5;
    std::optional<std::size_t> m;  // bins on the first axis: 100 in 1D, 20 in 2D when unset
    std::optional<double> lo, hi;
    std::size_t m_y = 20;
    std::optional<double> lo_y, hi_y;
    std::size_t min_group_count = 1;
    std::vector<double> alphas{1.0, 0.5, 0.25, 0.0};
    std::uint64_t seed = 0;
    unsigned threads = 1;
    double level = 0.95;
    std::size_t resolution = 512;
    double train_fraction = 0.5;
    std::size_t hgr_bins = 20;
};

// Flat JSON object whose keys are the RunConfig field names. Unknown keys are
// rejected; absent keys keep their defaults.
inline RunConfig run_config_from_json(const Json& j) {
    if (!j.is_object()) throw ValidationError("config: top level must be an object");
    RunConfig c;
    for (const auto& [key, value] : j.items()) {
        auto get = [&]<typename T>(T& dst) {
            try {
                dst = value.get<T>();
            } catch (const Json::exception&) {
                throw ValidationError("config: key '" + key + "' has the wrong type");
            }
        };
        auto get_opt = [&](std::optional<double>& dst) {
            double v = 0.0;
            get(v);
            dst = v;
        };
        if (key == "input") get(c.input);
        else if (key == "output") get(c.output);
        else if (key == "method") get(c.method);
        else if (key == "target") get(c.target);
        else if (key == "scheme") get(c.scheme);
        else if (key == "thresholds") get(c.thresholds);
        else if (key == "thresholds_y") get(c.thresholds_y);
        else if (key == "k") get(c.k);
        else if (key == "m") {
            std::size_t v = 0;
            get(v);
            c.m = v;
        }
        else if (key == "lo") get_opt(c.lo);
        else if (key == "hi") get_opt(c.hi);
        else if (key == "m_y") get(c.m_y);
        else if (key == "lo_y") get_opt(c.lo_y);
        else if (key == "hi_y") get_opt(c.hi_y);
        else if (key == "min_group_count") get(c.min_group_count);
        else if (key == "alphas") get(c.alphas);
        else if (key == "seed") get(c.seed);
        else if (key == "threads") get(c.threads);
        else if (key == "level") get(c.level);
        else if (key == "resolution") get(c.resolution);
        else if (key == "train_fraction") get(c.train_fraction);
        else if (key == "hgr_bins") get(c.hgr_bins);
        else throw ValidationError("config: unknown key '" + key + "'");
    }
    return c;
}

inline RunConfig read_run_config(const std::string& path) {
    const std::string text = read_text_file(path);
    return run_config_from_json(detail::parse_json(text, "config"));
}

}  // namespace fairgroups
