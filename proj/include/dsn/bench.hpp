#pragma once

// Experiment harness: scenario and instance files, per-run orchestration,
// CSV output and a static convergence chart.
//
// Seeding. Run r (1-based) of an experiment uses seed_r = derive_seed(master, r).
// Inside a run, three child streams are derived from seed_r:
//   derive_seed(seed_r, 0)  instance generation
//   derive_seed(seed_r, 1)  the optimizer
//   derive_seed(seed_r, 2)  the random initial deployment
// With a fixed instance, the instance comes from derive_seed(master, 0).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dsn/baselines.hpp"
#include "dsn/daaso.hpp"
#include "dsn/sensing.hpp"
#include "dsn/stochastic.hpp"

namespace dsn::bench {

using sensing::Assignment;
using sensing::CoverageTable;
using sensing::Instance;
using stochastic::RandomStream;

/// Thrown for malformed files and configurations.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Scenario {
    std::string name;
    double length = 500.0;
    double width = 500.0;
    std::size_t target_count = 500;
    std::size_t sensor_count = 100;
    double radius = 60.0;
    double theta = std::numbers::pi / 2.0;
    std::size_t directions = 8;
    std::size_t population = 50;
    std::size_t iterations = 100;
    std::size_t runs = 50;
    std::uint64_t master_seed = 1;

    void validate() const {
        if (!(length > 0.0) || !(width > 0.0)) throw InputError("scenario: field dimensions must be positive");
        if (target_count == 0 || sensor_count == 0) throw InputError("scenario: need at least one sensor and target");
        if (!(radius > 0.0)) throw InputError("scenario: radius must be positive");
        if (!(theta > 0.0) || theta > 2.0 * std::numbers::pi) throw InputError("scenario: theta must lie in (0, 2pi]");
        if (directions == 0) throw InputError("scenario: directions must be positive");
        if (population < daaso::max_prey) throw InputError("scenario: population must be at least 4");
        if (iterations == 0) throw InputError("scenario: iterations must be positive");
        if (runs == 0) throw InputError("scenario: runs must be at least 1");
    }

    /// Name used in summary rows; falls back to the key parameters.
    std::string label() const {
        if (!name.empty()) return name;
        char buf[128];
        std::snprintf(buf, sizeof buf, "M%zu_R%g_D%zu_theta%.4f", target_count, radius, sensor_count, theta);
        return buf;
    }
};

/// The scenario from Table-2 row one of the reference experiments:
/// 500 x 500 m, 500 targets, 100 sensors, R = 60 m, theta = pi/2, p = 8.
inline Scenario reference_scenario() { return Scenario{}; }

namespace detail {

template <class T>
T required(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw InputError(std::string("missing key '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad value for '") + key + "': " + e.what());
    }
}

template <class T>
T optional_or(const nlohmann::json& j, const char* key, T fallback) {
    return j.contains(key) ? required<T>(j, key) : fallback;
}

inline nlohmann::json required_array(const nlohmann::json& j, const char* key) {
    auto v = required<nlohmann::json>(j, key);
    if (!v.is_array()) throw InputError(std::string("'") + key + "' must be an array");
    return v;
}

inline nlohmann::json parse_json(std::istream& in, const std::string& what) {
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(what + ": " + e.what());
    }
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    return out;
}

}  // namespace detail

/// Scenario document:
///   { "name": "...", "area": {"length": L, "width": W}, "targets": M,
///     "sensors": D, "radius": R, "theta": radians | "theta_deg": degrees,
///     "directions": p, "population": N, "iterations": T, "runs": k, "seed": s }
/// Every key except area, targets and sensors has a default.
inline Scenario scenario_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("scenario: expected an object");
    Scenario s;
    s.name = detail::optional_or<std::string>(j, "name", "");
    const auto area = detail::required<nlohmann::json>(j, "area");
    s.length = detail::required<double>(area, "length");
    s.width = detail::required<double>(area, "width");
    s.target_count = detail::required<std::size_t>(j, "targets");
    s.sensor_count = detail::required<std::size_t>(j, "sensors");
    s.radius = detail::optional_or<double>(j, "radius", s.radius);
    if (j.contains("theta_deg"))
        s.theta = detail::required<double>(j, "theta_deg") * std::numbers::pi / 180.0;
    else
        s.theta = detail::optional_or<double>(j, "theta", s.theta);
    s.directions = detail::optional_or<std::size_t>(j, "directions", s.directions);
    s.population = detail::optional_or<std::size_t>(j, "population", s.population);
    s.iterations = detail::optional_or<std::size_t>(j, "iterations", s.iterations);
    s.runs = detail::optional_or<std::size_t>(j, "runs", s.runs);
    s.master_seed = detail::optional_or<std::uint64_t>(j, "seed", s.master_seed);
    s.validate();
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    auto in = detail::open_input(path);
    return scenario_from_json(detail::parse_json(in, path));
}

/// Rounds to 9 significant digits, the precision instance files carry.
inline double round_sig9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

/// Uniform random deployment. Sensors are drawn first, then targets, x before
/// y; all values are rounded to 9 significant digits so the instance survives
/// a file round trip unchanged.
template <stochastic::random_source S>
Instance generate_instance(const Scenario& scenario, S& stream) {
    scenario.validate();
    Instance inst;
    inst.length = round_sig9(scenario.length);
    inst.width = round_sig9(scenario.width);
    auto point = [&] {
        sensing::Point2D p;
        p.x = std::min(inst.length, round_sig9(inst.length * stream.uniform()));
        p.y = std::min(inst.width, round_sig9(inst.width * stream.uniform()));
        return p;
    };
    inst.sensors.reserve(scenario.sensor_count);
    for (std::size_t i = 0; i < scenario.sensor_count; ++i) {
        sensing::SensorConfig s;
        s.position = point();
        s.radius = round_sig9(scenario.radius);
        s.view_angle = std::min(2.0 * std::numbers::pi, round_sig9(scenario.theta));
        s.direction_count = scenario.directions;
        inst.sensors.push_back(s);
    }
    inst.targets.reserve(scenario.target_count);
    for (std::size_t k = 0; k < scenario.target_count; ++k) inst.targets.push_back(point());
    inst.validate();
    return inst;
}

/// Instance document: { "area": {"length", "width"},
///   "sensors": [{"x", "y", "r", "theta", "p"}], "targets": [{"x", "y"}] }
inline nlohmann::json instance_to_json(const Instance& inst) {
    nlohmann::json j;
    j["area"] = {{"length", round_sig9(inst.length)}, {"width", round_sig9(inst.width)}};
    auto& sensors = j["sensors"] = nlohmann::json::array();
    for (const auto& s : inst.sensors)
        sensors.push_back({{"x", round_sig9(s.position.x)},
                           {"y", round_sig9(s.position.y)},
                           {"r", round_sig9(s.radius)},
                           {"theta", round_sig9(s.view_angle)},
                           {"p", s.direction_count}});
    auto& targets = j["targets"] = nlohmann::json::array();
    for (const auto& t : inst.targets) targets.push_back({{"x", round_sig9(t.x)}, {"y", round_sig9(t.y)}});
    return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("instance: expected an object");
    Instance inst;
    const auto area = detail::required<nlohmann::json>(j, "area");
    inst.length = detail::required<double>(area, "length");
    inst.width = detail::required<double>(area, "width");
    for (const auto& s : detail::required_array(j, "sensors")) {
        sensing::SensorConfig cfg;
        cfg.position = {detail::required<double>(s, "x"), detail::required<double>(s, "y")};
        cfg.radius = detail::required<double>(s, "r");
        cfg.view_angle = std::min(2.0 * std::numbers::pi, detail::required<double>(s, "theta"));
        cfg.direction_count = detail::required<std::size_t>(s, "p");
        inst.sensors.push_back(cfg);
    }
    for (const auto& t : detail::required_array(j, "targets"))
        inst.targets.push_back({detail::required<double>(t, "x"), detail::required<double>(t, "y")});
    try {
        inst.validate();
    } catch (const std::domain_error& e) {
        throw InputError(std::string("instance: ") + e.what());
    }
    return inst;
}

inline std::string serialize_instance(const Instance& inst) { return instance_to_json(inst).dump(2) + "\n"; }

inline void write_instance(const Instance& inst, const std::string& path) {
    auto out = detail::open_output(path);
    out << serialize_instance(inst);
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

inline Instance read_instance(const std::string& path) {
    auto in = detail::open_input(path);
    return instance_from_json(detail::parse_json(in, path));
}

/// A uniformly random direction per sensor and its NCT: the starting
/// coverage of an unoptimised deployment.
template <stochastic::random_source S>
std::pair<Assignment, std::size_t> initial_coverage(const CoverageTable& table, S& stream) {
    Assignment a(table.sensor_count());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<std::size_t>(stream.index(table.direction_count(i)));
    const std::size_t nct = table.fitness(a);
    return {std::move(a), nct};
}

template <stochastic::random_source S>
std::pair<Assignment, std::size_t> initial_coverage(const Instance& instance, S& stream) {
    return initial_coverage(CoverageTable(instance), stream);
}

enum class Algorithm { daaso, random, greedy, exhaustive };

inline Algorithm parse_algorithm(std::string_view name) {
    if (name == "daaso") return Algorithm::daaso;
    if (name == "random") return Algorithm::random;
    if (name == "greedy") return Algorithm::greedy;
    if (name == "exhaustive") return Algorithm::exhaustive;
    throw InputError("unknown algorithm '" + std::string(name) + "' (expected daaso, random, greedy or exhaustive)");
}

inline std::string_view algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::daaso: return "daaso";
        case Algorithm::random: return "random";
        case Algorithm::greedy: return "greedy";
        case Algorithm::exhaustive: return "exhaustive";
    }
    return "?";
}

struct RunRecord {
    std::size_t run_id = 0;
    std::uint64_t seed = 0;
    std::size_t initial_nct = 0;
    std::size_t final_nct = 0;
    std::vector<std::size_t> history;  // best NCT per iteration, index 0 = initialisation
    Assignment best_assignment;
    double wall_time = 0.0;  // seconds

    // Compares what a run CSV carries; wall time and the assignment are not
    // part of the file.
    bool same_trajectory(const RunRecord& o) const {
        return run_id == o.run_id && seed == o.seed && initial_nct == o.initial_nct && final_nct == o.final_nct &&
               history == o.history;
    }
};

struct SummaryRow {
    std::string scenario;
    std::string algorithm;
    std::size_t runs = 0;
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation; 0 for a single run
    std::size_t min = 0;
    std::size_t max = 0;
};

struct RunSettings {
    std::size_t population = 50;
    std::size_t iterations = 100;
};

/// Runs one algorithm on a prepared table. Random search gets the same
/// evaluation budget as the optimizer, N (T + 1), and its history is sampled
/// every N evaluations so both curves share an x-axis. Greedy and exhaustive
/// report a single-point history.
template <stochastic::random_source S>
RunRecord run_algorithm(const CoverageTable& table, Algorithm algorithm, const RunSettings& settings, S& stream) {
    const auto start = std::chrono::steady_clock::now();
    RunRecord record;
    switch (algorithm) {
        case Algorithm::daaso: {
            daaso::OptimizerParams params;
            params.population = settings.population;
            params.levels = table.direction_counts();
            params.max_iterations = settings.iterations;
            auto fitness = [&table](std::span<const std::size_t> a) { return table.fitness(a); };
            auto result = daaso::optimize(fitness, params, stream);
            record.history = std::move(result.history);
            record.best_assignment = std::move(result.assignment);
            break;
        }
        case Algorithm::random: {
            const std::size_t budget = settings.population * (settings.iterations + 1);
            auto result = baselines::random_search(table, budget, stream);
            for (std::size_t t = 0; t <= settings.iterations; ++t)
                record.history.push_back(result.trace[(t + 1) * settings.population - 1]);
            record.best_assignment = std::move(result.assignment);
            break;
        }
        case Algorithm::greedy: {
            auto result = baselines::greedy_assign(table);
            record.history = {result.fitness};
            record.best_assignment = std::move(result.assignment);
            break;
        }
        case Algorithm::exhaustive: {
            auto result = baselines::exhaustive(table);
            record.history = {result.fitness};
            record.best_assignment = std::move(result.assignment);
            break;
        }
    }
    record.initial_nct = record.history.front();
    record.final_nct = record.history.back();
    record.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return record;
}

inline SummaryRow summarize(const std::vector<RunRecord>& records, std::string scenario, std::string algorithm) {
    if (records.empty()) throw InputError("summarize: no runs");
    SummaryRow row;
    row.scenario = std::move(scenario);
    row.algorithm = std::move(algorithm);
    row.runs = records.size();
    row.min = records.front().final_nct;
    row.max = records.front().final_nct;
    double sum = 0.0;
    for (const auto& r : records) {
        sum += static_cast<double>(r.final_nct);
        row.min = std::min(row.min, r.final_nct);
        row.max = std::max(row.max, r.final_nct);
    }
    row.mean = sum / static_cast<double>(records.size());
    if (records.size() > 1) {
        double ss = 0.0;
        for (const auto& r : records) ss += std::pow(static_cast<double>(r.final_nct) - row.mean, 2);
        row.std = std::sqrt(ss / static_cast<double>(records.size() - 1));
    }
    return row;
}

struct ExperimentOptions {
    bool fixed_instance = false;
};

struct ExperimentResult {
    std::vector<RunRecord> records;
    SummaryRow summary;
    /// NCT of each run's random initial deployment, in run order.
    std::vector<std::size_t> deployment_nct;
};

inline std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_id) {
    return stochastic::derive_seed(master_seed, run_id);
}

/// The instance run `run_id` of `scenario` is solved on.
inline Instance experiment_instance(const Scenario& scenario, std::size_t run_id, const ExperimentOptions& options = {}) {
    RandomStream stream(options.fixed_instance ? stochastic::derive_seed(scenario.master_seed, 0)
                                               : stochastic::derive_seed(run_seed(scenario.master_seed, run_id), 0));
    return generate_instance(scenario, stream);
}

inline ExperimentResult run_experiment(const Scenario& scenario, Algorithm algorithm,
                                       const ExperimentOptions& options = {}) {
    scenario.validate();
    ExperimentResult out;
    const RunSettings settings{scenario.population, scenario.iterations};

    std::optional<CoverageTable> shared_table;
    if (options.fixed_instance) shared_table.emplace(experiment_instance(scenario, 1, options));

    for (std::size_t r = 1; r <= scenario.runs; ++r) {
        const std::uint64_t seed = run_seed(scenario.master_seed, r);
        const CoverageTable table = shared_table ? *shared_table : CoverageTable(experiment_instance(scenario, r, options));

        RandomStream deployment(stochastic::derive_seed(seed, 2));
        out.deployment_nct.push_back(initial_coverage(table, deployment).second);

        RandomStream stream(stochastic::derive_seed(seed, 1));
        RunRecord record = run_algorithm(table, algorithm, settings, stream);
        record.run_id = r;
        record.seed = seed;
        out.records.push_back(std::move(record));
    }
    out.summary = summarize(out.records, scenario.label(), std::string(algorithm_name(algorithm)));
    return out;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

inline constexpr std::string_view runs_csv_header = "run_id,seed,iteration,best_nct";
inline constexpr std::string_view summary_csv_header = "scenario,algorithm,runs,mean,std,min,max";

inline void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    out << runs_csv_header << '\n';
    for (const auto& r : records)
        for (std::size_t t = 0; t < r.history.size(); ++t)
            out << r.run_id << ',' << r.seed << ',' << t << ',' << r.history[t] << '\n';
}

inline std::string runs_csv(const std::vector<RunRecord>& records) {
    std::ostringstream os;
    write_runs_csv(os, records);
    return os.str();
}

inline std::vector<RunRecord> read_runs_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != runs_csv_header) throw InputError("runs csv: bad or missing header");
    std::vector<RunRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cells[4];
        for (auto& cell : cells)
            if (!std::getline(row, cell, ',')) throw InputError("runs csv: short row at line " + std::to_string(line_no));
        std::size_t run_id = 0, iteration = 0, nct = 0;
        std::uint64_t seed = 0;
        try {
            run_id = std::stoull(cells[0]);
            seed = std::stoull(cells[1]);
            iteration = std::stoull(cells[2]);
            nct = std::stoull(cells[3]);
        } catch (const std::exception&) {
            throw InputError("runs csv: non-numeric value at line " + std::to_string(line_no));
        }
        if (records.empty() || records.back().run_id != run_id) {
            records.push_back({});
            records.back().run_id = run_id;
            records.back().seed = seed;
        }
        auto& rec = records.back();
        if (rec.seed != seed || iteration != rec.history.size())
            throw InputError("runs csv: inconsistent row at line " + std::to_string(line_no));
        rec.history.push_back(nct);
    }
    for (auto& rec : records) {
        rec.initial_nct = rec.history.front();
        rec.final_nct = rec.history.back();
    }
    return records;
}

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << summary_csv_header << '\n';
    char buf[64];
    for (const auto& row : rows) {
        out << csv_field(row.scenario) << ',' << csv_field(row.algorithm) << ',' << row.runs << ',';
        std::snprintf(buf, sizeof buf, "%.4f,%.4f", row.mean, row.std);
        out << buf << ',' << row.min << ',' << row.max << '\n';
    }
}

/// Maps iterations and NCT values into the chart's pixel space.
struct ChartFrame {
    double width = 800.0;
    double height = 480.0;
    double left = 70.0, right = 20.0, top = 40.0, bottom = 50.0;
    double x_max = 1.0;  // last iteration
    double y_min = 0.0, y_max = 1.0;

    double x_of(double iteration) const { return left + iteration / x_max * (width - left - right); }
    double y_of(double value) const {
        return height - bottom - (value - y_min) / (y_max - y_min) * (height - top - bottom);
    }
};

inline ChartFrame convergence_frame(const std::vector<RunRecord>& records) {
    ChartFrame f;
    std::size_t longest = 0;
    bool any = false;
    std::size_t lo = 0, hi = 0;
    for (const auto& r : records) {
        longest = std::max(longest, r.history.size());
        for (std::size_t v : r.history) {
            lo = any ? std::min(lo, v) : v;
            hi = any ? std::max(hi, v) : v;
            any = true;
        }
    }
    f.x_max = longest > 1 ? static_cast<double>(longest - 1) : 1.0;
    f.y_min = static_cast<double>(lo);
    f.y_max = static_cast<double>(hi);
    if (f.y_max <= f.y_min) {
        f.y_min -= 1.0;
        f.y_max += 1.0;
    }
    return f;
}

/// Self-contained SVG: one thin polyline per run and a thick mean line.
inline std::string render_convergence_svg(const std::vector<RunRecord>& records) {
    if (records.empty()) throw InputError("convergence chart: no runs to plot");
    const ChartFrame f = convergence_frame(records);
    char buf[160];
    std::ostringstream svg;
    std::snprintf(buf, sizeof buf,
                  R"(<svg xmlns="http://www.w3.org/2000/svg" width="%.0f" height="%.0f" viewBox="0 0 %.0f %.0f">)",
                  f.width, f.height, f.width, f.height);
    svg << buf << '\n';
    svg << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n';

    const double x0 = f.left, x1 = f.width - f.right, y0 = f.height - f.bottom, y1 = f.top;
    std::snprintf(buf, sizeof buf, R"(<path d="M%.2f %.2f V%.2f H%.2f" fill="none" stroke="black"/>)", x0, y1, y0, x1);
    svg << buf << '\n';
    for (int i = 0; i <= 4; ++i) {
        const double xv = f.x_max * i / 4.0;
        const double yv = f.y_min + (f.y_max - f.y_min) * i / 4.0;
        std::snprintf(buf, sizeof buf, R"(<text x="%.2f" y="%.2f" font-size="11" text-anchor="middle">%.0f</text>)",
                      f.x_of(xv), y0 + 16, xv);
        svg << buf << '\n';
        std::snprintf(buf, sizeof buf, R"(<text x="%.2f" y="%.2f" font-size="11" text-anchor="end">%.1f</text>)",
                      x0 - 6, f.y_of(yv) + 4, yv);
        svg << buf << '\n';
    }
    std::snprintf(buf, sizeof buf, R"(<text x="%.2f" y="%.2f" font-size="13" text-anchor="middle">iteration</text>)",
                  (x0 + x1) / 2, f.height - 12);
    svg << buf << '\n';
    std::snprintf(buf, sizeof buf,
                  R"svg(<text x="16" y="%.2f" font-size="13" text-anchor="middle" transform="rotate(-90 16 %.2f)">best NCT</text>)svg",
                  (y0 + y1) / 2, (y0 + y1) / 2);
    svg << buf << '\n';

    auto polyline = [&](const std::vector<double>& values, const char* style) {
        svg << "<polyline " << style << " points=\"";
        for (std::size_t t = 0; t < values.size(); ++t) {
            std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", t ? " " : "", f.x_of(static_cast<double>(t)), f.y_of(values[t]));
            svg << buf;
        }
        svg << "\"/>\n";
    };

    std::size_t longest = 0;
    for (const auto& r : records) {
        longest = std::max(longest, r.history.size());
        polyline(std::vector<double>(r.history.begin(), r.history.end()),
                 R"(class="run" fill="none" stroke="#7f9fbf" stroke-opacity="0.6" stroke-width="1")");
    }
    std::vector<double> mean(longest, 0.0);
    for (std::size_t t = 0; t < longest; ++t) {
        std::size_t n = 0;
        for (const auto& r : records)
            if (t < r.history.size()) {
                mean[t] += static_cast<double>(r.history[t]);
                ++n;
            }
        mean[t] /= static_cast<double>(n);
    }
    polyline(mean, R"(class="mean" fill="none" stroke="#c0392b" stroke-width="2.5")");
    svg << "</svg>\n";
    return svg.str();
}

inline void emit_convergence_svg(const std::vector<RunRecord>& records, const std::string& path) {
    const std::string svg = render_convergence_svg(records);
    auto out = detail::open_output(path);
    out << svg;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace dsn::bench
