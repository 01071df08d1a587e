// Command-line front end; one subcommand per library entry point.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "mobicache/allocation.hpp"
#include "mobicache/delay_model.hpp"
#include "mobicache/errors.hpp"
#include "mobicache/experiment.hpp"
#include "mobicache/mds_codec.hpp"
#include "mobicache/placement.hpp"
#include "mobicache/selftest.hpp"
#include "mobicache/simulator.hpp"
#include "mobicache/solver.hpp"

using namespace mobicache;

namespace {

struct Globals {
    std::string spec;
    std::uint64_t seed = 1;
    bool seed_set = false;
    std::string out;
    std::size_t threads = 1;
};

struct NetOpts {
    std::size_t M = 10;
    double alpha = 1.0;
    std::size_t n = 1000;
    std::size_t K = 4;
    std::size_t S = 0;
    std::string area = "log_n_over_n";
    double delta = 1.0;
    std::string strategy = "uncoded";
    std::string engine = "analytic";
    std::string mobility = "reshuffle";
    double flight = 0.0;

    void add(CLI::App* app, bool with_engine = true) {
        app->add_option("--M", M, "library size")->check(CLI::PositiveNumber);
        app->add_option("--alpha", alpha, "Zipf exponent")->check(CLI::PositiveNumber);
        app->add_option("--n", n, "number of nodes");
        app->add_option("--K", K, "subpackets per content")->check(CLI::PositiveNumber);
        app->add_option("--S", S, "cache slots per node (0 selects K)");
        app->add_option("--area", area, "area tag: log_n_over_n, pow:M^<e>/n or a number, optional *<factor>");
        app->add_option("--delta", delta, "guard factor");
        app->add_option("--strategy", strategy, "uncoded or mds")->check(CLI::IsMember({"uncoded", "mds"}));
        app->add_option("--mobility", mobility, "reshuffle or random_walk")
            ->check(CLI::IsMember({"reshuffle", "random_walk"}));
        app->add_option("--flight", flight, "random-walk flight length L");
        if (with_engine)
            app->add_option("--engine", engine, "analytic or numeric")->check(CLI::IsMember({"analytic", "numeric"}));
    }

    NetworkConfig config() const {
        NetworkConfig cfg = NetworkConfig::make(n, resolve_area(area, n, M), K);
        if (S) cfg.S = S;
        cfg.delta = delta;
        cfg.mobility = mobility == "random_walk" ? Mobility::RandomWalk : Mobility::Reshuffle;
        cfg.flight_length = flight;
        cfg.validate();
        return cfg;
    }
    Strategy strat() const { return strategy == "mds" ? Strategy::MdsRandom : Strategy::UncodedSeq; }

    Allocation allocation(const NetworkConfig& cfg, const PopularityModel& pop) const {
        const bool coded = strat() == Strategy::MdsRandom;
        if (engine == "numeric") {
            const SolverReport rep = coded ? solve_mds(pop, cfg) : solve_uncoded(pop, cfg);
            if (rep.status == SolverStatus::Infeasible) throw InfeasibleError("solver: S*n < K*M");
            return rep.allocation;
        }
        return coded ? mds_allocation(cfg, pop) : uncoded_allocation(cfg, pop);
    }
};

std::string g(double x) {
    std::ostringstream os;
    os << std::setprecision(10) << x;
    return os.str();
}

std::ostream& output(const Globals& gl, const std::string& file, std::ofstream& holder) {
    if (gl.out.empty()) return std::cout;
    std::filesystem::create_directories(gl.out);
    holder.open(std::filesystem::path(gl.out) / file);
    if (!holder) throw std::runtime_error("cannot write " + (std::filesystem::path(gl.out) / file).string());
    return holder;
}

std::vector<std::uint8_t> parse_hex(const std::string& s) {
    if (s.size() % 2 != 0) throw std::invalid_argument("hex payload '" + s + "' has odd length");
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < s.size(); i += 2) out.push_back(static_cast<std::uint8_t>(std::stoul(s.substr(i, 2), nullptr, 16)));
    return out;
}

std::string to_hex(const std::vector<std::uint8_t>& v) {
    std::ostringstream os;
    for (auto b : v) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(b);
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cache allocation and delay analysis for subpacketized content in mobile ad hoc networks"};
    app.require_subcommand(1);
    Globals gl;
    app.add_option("--spec", gl.spec, "experiment spec file (run)");
    app.add_option("--seed", gl.seed, "root RNG seed")->each([&](const std::string&) { gl.seed_set = true; });
    app.add_option("--out", gl.out, "output directory");
    app.add_option("--threads", gl.threads, "worker threads")->check(CLI::PositiveNumber);

    NetOpts net;
    auto* alloc_cmd = app.add_subcommand("alloc", "print a cache allocation as m,value rows");
    net.add(alloc_cmd);

    auto* delay_cmd = app.add_subcommand("delay", "expected delay, throughput and scaling class of an allocation");
    net.add(delay_cmd);
    double log_factor = 0.0;
    delay_cmd->add_option("--log-factor", log_factor, "random-walk log factor (default ln n)");

    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo delivery-phase trials, one CSV row per trial");
    net.add(sim_cmd);
    SimOptions sim;
    std::size_t trials = 1;
    std::string mode = "delay_only", caches_in, caches_out;
    sim_cmd->add_option("--slots", sim.slots, "slots in the measurement horizon");
    sim_cmd->add_option("--warmup", sim.warmup, "slots discarded before measuring");
    sim_cmd->add_option("--trials", trials, "independent trials");
    sim_cmd->add_option("--mode", mode, "delay_only or scheduled")->check(CLI::IsMember({"delay_only", "scheduled"}));
    sim_cmd->add_option("--requester-fraction", sim.requester_fraction, "fraction of nodes issuing requests");
    sim_cmd->add_option("--caches", caches_in, "read the cache assignment from this file");
    sim_cmd->add_option("--write-caches", caches_out, "write the cache assignment to this file");

    auto* hit_cmd = app.add_subcommand("hitting-time", "mean first hitting time of two random walkers");
    double R = 0.05, L = 0.05;
    std::size_t pairs = 2000, max_slots = 1000000;
    hit_cmd->add_option("--R", R, "contact radius")->check(CLI::PositiveNumber);
    hit_cmd->add_option("--L", L, "flight length")->check(CLI::PositiveNumber);
    hit_cmd->add_option("--pairs", pairs, "independent pairs");
    hit_cmd->add_option("--max-slots", max_slots, "censoring horizon");

    auto* codec_cmd = app.add_subcommand("codec", "encode hex subpackets and decode them back");
    std::size_t code_r = 0;
    std::vector<std::string> data_hex;
    std::vector<unsigned> use_points;
    codec_cmd->add_option("--r", code_r, "number of coded subpackets")->required();
    codec_cmd->add_option("--data", data_hex, "original subpackets as hex strings")->required()->delimiter(',');
    codec_cmd->add_option("--use", use_points, "encoding points used for decoding (default: first K)")->delimiter(',');

    auto* run_cmd = app.add_subcommand("run", "run an experiment sweep and write results.csv");
    std::string preset;
    run_cmd->add_option("--preset", preset, "fig3, fig4, fig5 or fig6");

    auto* self_cmd = app.add_subcommand("selftest", "run the embedded oracle checks");
    SelfTestOptions st;
    self_cmd->add_flag("--inject-codec-fault", st.inject_codec_fault, "corrupt one field table entry");
    self_cmd->add_option("--brute-force-M", st.brute_force_M, "library size of the oracle instances");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (alloc_cmd->parsed()) {
            const auto cfg = net.config();
            const PopularityModel pop(net.M, net.alpha);
            const Allocation a = net.allocation(cfg, pop);
            std::ofstream f;
            std::ostream& os = output(gl, "alloc.csv", f);
            os << "# m1=" << a.m1;
            if (a.m2) os << " m2=" << *a.m2;
            os << " budget_used=" << g(a.budget_used) << " area=" << g(cfg.area) << '\n';
            os << "m,value\n";
            for (std::size_t m = 0; m < a.values.size(); ++m) os << m + 1 << ',' << g(a.values[m]) << '\n';
        } else if (delay_cmd->parsed()) {
            const auto cfg = net.config();
            const PopularityModel pop(net.M, net.alpha);
            const Allocation a = net.allocation(cfg, pop);
            const auto est = expected_delay_random_walk(cfg, pop, a.values, net.strat(),
                                                        log_factor > 0.0 ? std::optional<double>(log_factor)
                                                                         : std::nullopt);
            const auto sc = delay_scaling(cfg, pop, net.strat());
            std::ofstream f;
            std::ostream& os = output(gl, "delay.csv", f);
            os << "key,value\n"
               << "area," << g(cfg.area) << '\n'
               << "d_avg_exact," << g(est.exact_slots) << '\n'
               << "d_avg_order," << g(est.order_slots) << '\n'
               << "random_walk_lower," << g(est.bounds->first) << '\n'
               << "random_walk_upper," << g(est.bounds->second) << '\n'
               << "throughput," << g(per_node_throughput(cfg, est.order_slots)) << '\n'
               << "scaling_value," << g(sc.value) << '\n'
               << "scaling_class," << csv_field(sc.symbolic_class) << '\n'
               << "throughput_class," << csv_field(sc.throughput_class) << '\n'
               << "log_base,natural\n"
               << "connected_regime," << (cfg.connected_regime() ? "yes" : "no") << '\n';
        } else if (sim_cmd->parsed()) {
            const auto cfg = net.config();
            const PopularityModel pop(net.M, net.alpha);
            CacheAssignment caches;
            if (!caches_in.empty()) {
                std::ifstream in(caches_in);
                if (!in) throw std::runtime_error("cannot open " + caches_in);
                caches = read_assignment(in, cfg.n);
            } else {
                caches = place(net.allocation(cfg, pop), cfg, derive_seed(gl.seed, 0));
            }
            if (!caches_out.empty()) {
                std::ofstream o(caches_out);
                write_assignment(o, caches);
            }
            sim.mode = mode == "scheduled" ? SimMode::Scheduled : SimMode::DelayOnly;
            sim.strategy = net.strat();
            sim.seed = gl.seed;
            const auto res = run_trials(cfg, pop, caches, sim, trials, gl.threads);
            std::ofstream f;
            std::ostream& os = output(gl, "trials.csv", f);
            os << "trial,seed,d_avg_empirical,d_avg_stderr,throughput_empirical,completed,censored,"
                  "protocol_violations,slots_run\n";
            for (std::size_t i = 0; i < res.size(); ++i) {
                const auto& t = res[i];
                os << i << ',' << t.seed << ',' << g(t.d_avg_empirical) << ',' << g(t.d_avg_stderr) << ','
                   << g(t.throughput_empirical) << ',' << t.completed << ',' << t.censored << ','
                   << t.protocol_violations << ',' << t.slots_run << '\n';
            }
        } else if (hit_cmd->parsed()) {
            const auto est = estimate_hitting_time(R, L, pairs, max_slots, gl.seed, gl.threads);
            std::cout << "mean,stderr,censored_fraction,pairs\n"
                      << g(est.mean) << ',' << g(est.stderr_) << ',' << g(est.censored_fraction) << ',' << est.pairs
                      << '\n';
        } else if (codec_cmd->parsed()) {
            std::vector<std::vector<std::uint8_t>> data;
            for (const auto& h : data_hex) data.push_back(parse_hex(h));
            const MdsCodec codec;
            const auto coded = codec.encode(data, code_r);
            std::cout << "point,payload\n";
            for (const auto& c : coded) std::cout << static_cast<int>(c.encoding_point) << ',' << to_hex(c.payload) << '\n';
            std::vector<CodedSubpacket> pick;
            if (use_points.empty()) {
                pick.assign(coded.begin(), coded.begin() + static_cast<std::ptrdiff_t>(data.size()));
            } else {
                for (unsigned p : use_points) {
                    if (p < 1 || p > code_r) throw std::invalid_argument("--use point out of range");
                    pick.push_back(coded[p - 1]);
                }
            }
            const auto back = codec.decode(pick, data.size());
            std::cout << "decoded";
            for (const auto& b : back) std::cout << ',' << to_hex(b);
            std::cout << '\n' << (back == data ? "roundtrip ok" : "roundtrip MISMATCH") << '\n';
            return back == data ? 0 : 1;
        } else if (run_cmd->parsed()) {
            ExperimentSpec spec;
            if (!gl.spec.empty())
                spec = parse_spec_file(gl.spec);
            else if (!preset.empty())
                spec = preset_spec(preset);
            else
                throw SpecError("field 'spec': give --spec <file> or --preset <name>");
            if (!gl.out.empty()) spec.out_dir = gl.out;
            if (gl.seed_set) spec.seed = gl.seed;
            if (gl.threads > 1) spec.threads = gl.threads;
            const RunSummary sum = run_experiment(spec, std::cerr);
            return sum.exit_code;
        } else if (self_cmd->parsed()) {
            st.seed = gl.seed;
            const auto results = run_selftest(st);
            for (const auto& r : results) {
                const char* s = r.status == CheckStatus::Pass ? "PASS" : r.status == CheckStatus::Fail ? "FAIL" : "SKIP";
                std::cout << std::left << std::setw(6) << s << std::setw(26) << r.name << r.detail << '\n';
            }
            return selftest_passed(results) ? 0 : 1;
        }
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return 2;
    } catch (const SpecError& e) {
        std::cerr << "spec error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
