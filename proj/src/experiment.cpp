#include "mobicache/experiment.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "mobicache/allocation.hpp"
#include "mobicache/delay_model.hpp"
#include "mobicache/errors.hpp"
#include "mobicache/placement.hpp"
#include "mobicache/solver.hpp"

namespace mobicache {

namespace {

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& field, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw SpecError("field '" + field + "': expected a number, got '" + v + "'");
    }
}

std::uint64_t parse_uint(const std::string& field, const std::string& v) {
    try {
        std::size_t pos = 0;
        if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw SpecError("field '" + field + "': expected a nonnegative integer, got '" + v + "'");
    }
}

Strategy parse_strategy(const std::string& v) {
    if (v == "uncoded") return Strategy::UncodedSeq;
    if (v == "mds") return Strategy::MdsRandom;
    throw SpecError("field 'strategies': unknown strategy '" + v + "' (uncoded|mds)");
}

Engine parse_engine(const std::string& v) {
    if (v == "analytic") return Engine::Analytic;
    if (v == "numeric") return Engine::Numeric;
    if (v == "simulate") return Engine::Simulate;
    throw SpecError("field 'engines': unknown engine '" + v + "' (analytic|numeric|simulate)");
}

struct Point {
    double alpha;
    std::size_t area_index;
    double area;
    std::size_t M;
};

struct Task {
    std::size_t point;
    Strategy strategy;
    Engine engine;
};

ResultRow evaluate_task(const ExperimentSpec& spec, const Point& pt, std::size_t point_index, const Task& task) {
    NetworkConfig cfg = NetworkConfig::make(spec.n, pt.area, spec.K);
    cfg.S = spec.S.value_or(spec.K);
    cfg.delta = spec.delta;
    const PopularityModel pop(pt.M, pt.alpha);
    const bool coded = task.strategy == Strategy::MdsRandom;

    ResultRow row;
    row.preset = spec.preset;
    row.alpha = pt.alpha;
    row.area = pt.area;
    row.M = pt.M;
    row.K = cfg.K;
    row.n = cfg.n;
    row.S = cfg.S;
    row.strategy = task.strategy;
    row.engine = task.engine;
    row.seed = spec.seed;

    Allocation alloc;
    if (task.engine == Engine::Numeric) {
        const SolverReport rep = coded ? solve_mds(pop, cfg) : solve_uncoded(pop, cfg);
        if (rep.status == SolverStatus::Infeasible) throw InfeasibleError("numeric solver reported infeasible");
        alloc = rep.allocation;
    } else {
        alloc = coded ? mds_allocation(cfg, pop) : uncoded_allocation(cfg, pop);
    }
    row.m1 = alloc.m1;
    if (coded) row.m2 = alloc.m2;

    if (task.engine == Engine::Simulate) {
        const CacheAssignment caches = place(alloc, cfg, derive_seed(spec.seed, point_index));
        SimOptions opts;
        opts.mode = spec.sim_mode;
        opts.strategy = task.strategy;
        opts.slots = spec.slots;
        opts.warmup = spec.warmup;
        opts.seed = derive_seed(spec.seed, 1000003 + point_index);
        const auto trials = run_trials(cfg, pop, caches, opts, spec.trials, 1);
        row.d_avg_exact = pooled_delay(trials).first;
        row.trials = spec.trials;
    } else {
        const auto errs = check_allocation(alloc, cfg);
        if (!errs.empty()) throw std::runtime_error("allocation failed validation: " + errs.front());
        const DelayEstimate est =
            coded ? expected_delay_mds(cfg, pop, alloc.values) : expected_delay_uncoded(cfg, pop, alloc.values);
        row.d_avg_order = est.order_slots;
        row.d_avg_exact = est.exact_slots;
        row.alloc_values = alloc.values;
        row.alloc_file = "alloc_" + spec.preset + "_p" + std::to_string(point_index) + "_" +
                         strategy_name(task.strategy) + "_" + engine_name(task.engine) + ".csv";
    }
    row.throughput = row.d_avg_exact > 0.0 ? per_node_throughput(cfg, row.d_avg_order.value_or(row.d_avg_exact)) : 0.0;
    return row;
}

}  // namespace

std::string strategy_name(Strategy s) { return s == Strategy::UncodedSeq ? "uncoded" : "mds"; }

std::string engine_name(Engine e) {
    switch (e) {
        case Engine::Analytic: return "analytic";
        case Engine::Numeric: return "numeric";
        case Engine::Simulate: return "simulate";
    }
    return "?";
}

void ExperimentSpec::validate() const {
    if (alphas.empty()) throw SpecError("field 'alpha': empty sweep");
    if (area_tags.empty()) throw SpecError("field 'area': empty sweep");
    if (Ms.empty()) throw SpecError("field 'M': empty sweep");
    if (strategies.empty()) throw SpecError("field 'strategies': empty");
    if (engines.empty()) throw SpecError("field 'engines': empty");
    for (double a : alphas)
        if (!(a > 0.0)) throw SpecError("field 'alpha': values must be > 0");
    for (std::size_t M : Ms)
        if (M == 0) throw SpecError("field 'M': values must be >= 1");
    if (K == 0) throw SpecError("field 'K': must be >= 1");
    if (n < 2) throw SpecError("field 'n': must be >= 2");
    if (S && *S == 0) throw SpecError("field 'S': must be >= 1");
    if (!(delta >= 0.0)) throw SpecError("field 'delta': must be >= 0");
    for (Engine e : engines) {
        if (e != Engine::Simulate) continue;
        if (trials == 0) throw SpecError("field 'trials': simulate engine needs trials >= 1");
        if (slots <= warmup) throw SpecError("field 'slots': simulate engine needs slots > warmup");
    }
}

ExperimentSpec preset_spec(const std::string& name) {
    ExperimentSpec s;
    s.preset = name;
    s.n = 30000;
    s.Ms = {250};
    s.engines = {Engine::Analytic, Engine::Numeric};
    if (name == "fig3" || name == "fig4") {
        s.alphas = {0.5, 2.0};
        s.area_tags = {"log_n_over_n", "pow:M^0.8/n"};
        s.K = name == "fig3" ? 20 : 3;
        s.strategies = {name == "fig3" ? Strategy::UncodedSeq : Strategy::MdsRandom};
    } else if (name == "fig5") {
        s.alphas = {0.5, 1.5, 3.0};
        for (int i = 0; i < 8; ++i) s.area_tags.push_back("log_n_over_n*" + std::to_string(1 << i));
        s.K = 20;
        s.strategies = {Strategy::UncodedSeq, Strategy::MdsRandom};
    } else if (name == "fig6") {
        s.alphas = {0.5, 1.25, 3.0};
        s.area_tags = {"log_n_over_n"};
        s.Ms = {10, 20, 50, 100, 200, 500, 1000, 2000};
        s.K = 5;
        s.strategies = {Strategy::UncodedSeq, Strategy::MdsRandom};
        s.notes.push_back(
            "area log(n)/n; the reciprocal n/log(n) would exceed 1 at n=30000");
    } else {
        throw SpecError("field 'preset': unknown preset '" + name + "' (fig3|fig4|fig5|fig6)");
    }
    return s;
}

ExperimentSpec parse_spec(std::istream& is) {
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw SpecError("line " + std::to_string(lineno) + ": expected key = value");
        kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }

    ExperimentSpec s;
    for (const auto& [k, v] : kv)
        if (k == "preset" && v != "custom") s = preset_spec(v);

    for (const auto& [k, v] : kv) {
        if (k == "preset") {
            continue;
        } else if (k == "alpha" || k == "alphas") {
            s.alphas.clear();
            for (const auto& x : split_list(v)) s.alphas.push_back(parse_double("alpha", x));
        } else if (k == "area" || k == "areas") {
            s.area_tags = split_list(v);
        } else if (k == "M") {
            s.Ms.clear();
            for (const auto& x : split_list(v)) s.Ms.push_back(parse_uint("M", x));
        } else if (k == "K") {
            s.K = parse_uint("K", v);
        } else if (k == "n") {
            s.n = parse_uint("n", v);
        } else if (k == "S") {
            s.S = parse_uint("S", v);
        } else if (k == "delta") {
            s.delta = parse_double("delta", v);
        } else if (k == "strategies" || k == "strategy") {
            s.strategies.clear();
            for (const auto& x : split_list(v)) s.strategies.push_back(parse_strategy(x));
        } else if (k == "engines" || k == "engine") {
            s.engines.clear();
            for (const auto& x : split_list(v)) s.engines.push_back(parse_engine(x));
        } else if (k == "trials") {
            s.trials = parse_uint("trials", v);
        } else if (k == "slots") {
            s.slots = parse_uint("slots", v);
        } else if (k == "warmup") {
            s.warmup = parse_uint("warmup", v);
        } else if (k == "sim_mode") {
            if (v == "delay_only")
                s.sim_mode = SimMode::DelayOnly;
            else if (v == "scheduled")
                s.sim_mode = SimMode::Scheduled;
            else
                throw SpecError("field 'sim_mode': expected delay_only or scheduled, got '" + v + "'");
        } else if (k == "seed") {
            s.seed = parse_uint("seed", v);
        } else if (k == "out") {
            s.out_dir = v;
        } else if (k == "threads") {
            s.threads = parse_uint("threads", v);
        } else {
            throw SpecError("unknown field '" + k + "'");
        }
    }
    s.validate();
    return s;
}

ExperimentSpec parse_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("field 'spec': cannot open '" + path + "'");
    return parse_spec(in);
}

double resolve_area(const std::string& tag, std::size_t n, std::size_t M) {
    std::string base = tag;
    double factor = 1.0;
    if (const auto star = tag.find('*'); star != std::string::npos) {
        base = trim(tag.substr(0, star));
        factor = parse_double("area", trim(tag.substr(star + 1)));
    }
    const double nd = static_cast<double>(n);
    double a;
    if (base == "log_n_over_n") {
        a = std::log(nd) / nd;
    } else if (base.rfind("pow:M^", 0) == 0) {
        const auto slash = base.find("/n");
        if (slash == std::string::npos || slash + 2 != base.size())
            throw SpecError("field 'area': malformed tag '" + tag + "' (expected pow:M^<e>/n)");
        const double e = parse_double("area", base.substr(6, slash - 6));
        a = std::pow(static_cast<double>(M), e) / nd;
    } else {
        a = parse_double("area", base);
    }
    a *= factor;
    if (!(a > 0.0 && a <= 1.0))
        throw SpecError("field 'area': tag '" + tag + "' resolves to " + num(a) + ", outside (0, 1]");
    return a;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

RunSummary evaluate(const ExperimentSpec& spec) {
    spec.validate();
    RunSummary summary;
    std::vector<Point> points;
    for (double alpha : spec.alphas)
        for (std::size_t ai = 0; ai < spec.area_tags.size(); ++ai)
            for (std::size_t M : spec.Ms) {
                const double area = resolve_area(spec.area_tags[ai], spec.n, M);
                const std::size_t S = spec.S.value_or(spec.K);
                if (static_cast<double>(S) * static_cast<double>(spec.n) <
                    static_cast<double>(spec.K) * static_cast<double>(M)) {
                    summary.infeasible.push_back("alpha=" + num(alpha) + " area=" + spec.area_tags[ai] +
                                                 " M=" + std::to_string(M) + ": S*n < K*M");
                    continue;
                }
                points.push_back({alpha, ai, area, M});
            }

    std::vector<Task> tasks;
    for (std::size_t p = 0; p < points.size(); ++p)
        for (Strategy s : spec.strategies)
            for (Engine e : spec.engines) tasks.push_back({p, s, e});

    std::vector<ResultRow> rows(tasks.size());
    std::vector<std::string> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                rows[i] = evaluate_task(spec, points[tasks[i].point], tasks[i].point, tasks[i]);
            } catch (const InfeasibleError& e) {
                errors[i] = e.what();
            }
        }
    };
    const std::size_t k = std::max<std::size_t>(1, std::min(spec.threads, tasks.size()));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < k; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (errors[i].empty())
            summary.rows.push_back(std::move(rows[i]));
        else
            summary.infeasible.push_back(errors[i]);
    }
    summary.exit_code = summary.infeasible.empty() ? 0 : 2;
    return summary;
}

void write_results_csv(std::ostream& os, const ExperimentSpec& spec, const std::vector<ResultRow>& rows,
                       const std::string& timestamp) {
    if (!timestamp.empty()) os << "# generated " << timestamp << '\n';
    os << "# log base for log(n): natural\n";
    for (const auto& note : spec.notes) os << "# " << note << '\n';
    os << "preset,alpha,area,M,K,n,S,strategy,engine,m1,m2,d_avg_order,d_avg_exact,throughput,seed,trials\n";
    for (const auto& r : rows) {
        os << csv_field(r.preset) << ',' << num(r.alpha) << ',' << num(r.area) << ',' << r.M << ',' << r.K << ','
           << r.n << ',' << r.S << ',' << strategy_name(r.strategy) << ',' << engine_name(r.engine) << ',' << r.m1
           << ',' << (r.m2 ? std::to_string(*r.m2) : "") << ',' << (r.d_avg_order ? num(*r.d_avg_order) : "") << ','
           << num(r.d_avg_exact) << ',' << num(r.throughput) << ',' << r.seed << ',' << r.trials << '\n';
    }
}

RunSummary run_experiment(const ExperimentSpec& spec, std::ostream& log) {
    RunSummary summary = evaluate(spec);
    for (const auto& msg : summary.infeasible) log << "infeasible: " << msg << '\n';

    namespace fs = std::filesystem;
    const fs::path dir(spec.out_dir);
    fs::create_directories(dir);
    for (const auto& r : summary.rows) {
        if (r.alloc_file.empty()) continue;
        std::ofstream f(dir / r.alloc_file);
        if (!f) throw std::runtime_error("cannot write " + (dir / r.alloc_file).string());
        f << "m,value\n";
        char buf[64];
        for (std::size_t m = 0; m < r.alloc_values.size(); ++m) {
            std::snprintf(buf, sizeof buf, "%.12g", r.alloc_values[m]);
            f << m + 1 << ',' << buf << '\n';
        }
    }

    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char stamp[64];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    std::ofstream out(dir / "results.csv");
    if (!out) throw std::runtime_error("cannot write " + (dir / "results.csv").string());
    write_results_csv(out, spec, summary.rows, stamp);
    log << "wrote " << summary.rows.size() << " rows to " << (dir / "results.csv").string() << '\n';
    return summary;
}

}  // namespace mobicache
