#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mobicache/network.hpp"
#include "mobicache/simulator.hpp"

namespace mobicache {

/// Raised for unreadable or inconsistent experiment specs; the message names
/// the offending field.
class SpecError : public std::runtime_error {
public:
    explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

enum class Engine { Analytic, Numeric, Simulate };

struct ExperimentSpec {
    std::string preset = "custom";
    std::vector<double> alphas;
    std::vector<std::string> area_tags;  // "log_n_over_n", "pow:M^0.8/n", "0.01", optionally "*<factor>"
    std::vector<std::size_t> Ms;
    std::size_t K = 1;
    std::size_t n = 2;
    std::optional<std::size_t> S;  // defaults to K
    double delta = 1.0;
    std::vector<Strategy> strategies;
    std::vector<Engine> engines;
    std::size_t trials = 1;
    std::size_t slots = 200;
    std::size_t warmup = 20;
    SimMode sim_mode = SimMode::DelayOnly;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::size_t threads = 1;
    std::vector<std::string> notes;  // emitted as deterministic comment lines

    /// Throws SpecError on an empty sweep or missing engine parameters.
    void validate() const;
};

/// Built-in sweeps: fig3, fig4, fig5, fig6. Throws SpecError on unknown names.
ExperimentSpec preset_spec(const std::string& name);

/// Parses a flat `key = value` file (`#` starts a comment, lists are
/// comma separated). A `preset` key seeds the remaining fields.
ExperimentSpec parse_spec(std::istream& is);
ExperimentSpec parse_spec_file(const std::string& path);

/// Resolves an area tag for the given n and M. Throws SpecError when the tag
/// is malformed or the result lies outside (0, 1].
double resolve_area(const std::string& tag, std::size_t n, std::size_t M);

std::string strategy_name(Strategy s);
std::string engine_name(Engine e);

struct ResultRow {
    std::string preset;
    double alpha = 0.0;
    double area = 0.0;
    std::size_t M = 0, K = 0, n = 0, S = 0;
    Strategy strategy = Strategy::UncodedSeq;
    Engine engine = Engine::Analytic;
    std::size_t m1 = 0;
    std::optional<std::size_t> m2;
    std::optional<double> d_avg_order;
    double d_avg_exact = 0.0;
    double throughput = 0.0;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    std::string alloc_file;  // companion file name, empty for simulate rows
    std::vector<double> alloc_values;
};

struct RunSummary {
    std::vector<ResultRow> rows;
    std::vector<std::string> infeasible;  // one message per infeasible sweep point
    int exit_code = 0;                    // 0 ok, 2 infeasible
};

/// Evaluates every (sweep point, strategy, engine) combination. Rows come back
/// in sweep order regardless of the worker count. Nothing is written.
RunSummary evaluate(const ExperimentSpec& spec);

/// evaluate() plus results.csv and alloc_<point>.csv files under spec.out_dir.
RunSummary run_experiment(const ExperimentSpec& spec, std::ostream& log);

/// CSV writer for the result rows (first line is a timestamped comment when
/// `timestamp` is non-empty).
void write_results_csv(std::ostream& os, const ExperimentSpec& spec, const std::vector<ResultRow>& rows,
                       const std::string& timestamp);

/// RFC 4180 quoting of one field.
std::string csv_field(const std::string& s);

}  // namespace mobicache
