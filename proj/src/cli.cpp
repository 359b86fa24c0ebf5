#include "adl/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "adl/branching.hpp"
#include "adl/competition.hpp"
#include "adl/errors.hpp"
#include "adl/fitness.hpp"
#include "adl/limit_process.hpp"
#include "adl/meanfield.hpp"
#include "adl/output.hpp"
#include "adl/parallel.hpp"
#include "adl/ssa.hpp"

namespace adl {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kExample21First = 0.22;
constexpr double kExample21Second = 0.29;
constexpr double kExample21Tolerance = 0.005;

TraitIndex parse_trait(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw ConfigError("trait: expected \"m,n\", got \"" + text + "\"");
    try {
        std::size_t used_m = 0, used_n = 0;
        const std::string m_text = text.substr(0, comma), n_text = text.substr(comma + 1);
        TraitIndex trait{std::stoi(m_text, &used_m), std::stoi(n_text, &used_n)};
        if (used_m != m_text.size() || used_n != n_text.size()) throw std::invalid_argument("");
        return trait;
    } catch (const std::logic_error&) {
        throw ConfigError("trait: expected \"m,n\", got \"" + text + "\"");
    }
}

TraitIndex trait_arg(const json& args, const char* key) {
    if (!args.contains(key)) throw ConfigError(std::string(key) + ": required");
    return parse_trait(args[key].get<std::string>());
}

void require_trait(const ModelParams& params, TraitIndex trait, const char* field) {
    if (!TraitGrid(params).contains(trait)) {
        throw ConfigError(std::string(field) + ": trait " + to_string(trait) + " outside the lattice");
    }
}

FitnessMode fitness_mode(LimitMode mode) {
    return mode == LimitMode::standard ? FitnessMode::resident_relative : FitnessMode::extended;
}

std::string k_label(double K) { return format_number(K); }

struct Outputs {
    fs::path dir;
    json files = json::array();

    void text(const std::string& name, const std::string& content) {
        write_text_file(dir / name, content);
        files.push_back(name);
    }
    void csv(const std::string& name, const std::vector<CsvRow>& rows) {
        std::ostringstream buffer;
        write_csv(buffer, rows);
        text(name, buffer.str());
    }
};

json phases_json(const LimitTrajectory& trajectory) {
    json phases = json::array();
    for (const Phase& phase : trajectory.phases) {
        phases.push_back({{"start", phase.start},
                          {"end", phase.end},
                          {"resident", to_string(phase.resident)},
                          {"regime", to_string(phase.regime)}});
    }
    return phases;
}

json run_limit_command(const Scenario& s, Outputs& files, std::ostream& out) {
    if (s.mode == LimitMode::standard) check_nonzero_fitness(s.params);
    const LimitTrajectory trajectory = run_limit(s.params, s.horizon, s.mode);
    const auto rows = limit_rows(trajectory, s.points);
    files.csv("limit.csv", rows);
    if (s.svg) files.text("limit.svg", render_svg(rows, SeriesKind::beta_limit, s.name + " limit"));

    json result = {{"termination", to_string(trajectory.termination)},
                   {"end_time", trajectory.end_time()},
                   {"phases", phases_json(trajectory)}};
    out << "termination: " << to_string(trajectory.termination) << "\n";
    out << "phases: " << trajectory.phases.size() << ", end time " << trajectory.end_time() << "\n";
    if (trajectory.accumulation) {
        const Accumulation& acc = *trajectory.accumulation;
        json traits = json::array();
        for (TraitIndex t : acc.cycle_traits) traits.push_back(to_string(t));
        result["accumulation"] = {{"time", acc.time},
                                  {"ratio", acc.ratio},
                                  {"period", acc.period},
                                  {"cycle_traits", traits},
                                  {"cycle_durations", acc.cycle_durations}};
        out << "accumulation point " << acc.time << ", contraction ratio " << acc.ratio << "\n";
    }
    return result;
}

json run_simulate_command(const Scenario& s, Outputs& files, std::ostream& out) {
    SamplingSpec sampling;
    sampling.points = s.points;
    json runs = json::array();
    for (double K : s.K) {
        ModelParams params = s.params;
        params.K = K;
        for (std::uint64_t seed : s.seeds) {
            const auto replicates = simulate_replicates(params, s.horizon, seed, s.replicates, sampling);
            for (std::size_t r = 0; r < replicates.size(); ++r) {
                const SimTrajectory& traj = replicates[r];
                const std::string stem = "simulate_K" + k_label(K) + "_seed" + std::to_string(seed) +
                                         "_r" + std::to_string(r);
                const auto rows = simulation_rows(traj);
                files.csv(stem + ".csv", rows);
                if (s.svg) files.text(stem + ".svg", render_svg(rows, SeriesKind::beta_K, stem));
                runs.push_back({{"K", K},
                                {"seed", seed},
                                {"replicate", r},
                                {"replicate_seed", traj.seed},
                                {"events", traj.events.empty() ? 0 : traj.events.back()},
                                {"extinct", traj.extinct}});
            }
        }
        out << "K=" << k_label(K) << ": " << s.seeds.size() * s.replicates << " run(s)\n";
    }
    return {{"runs", runs}};
}

json run_meanfield_command(const Scenario& s, Outputs& files, std::ostream& out) {
    EulerOptions options;
    options.clamp = s.clamp;
    options.with_mutation = s.with_mutation;
    options.samples = s.points;
    json runs = json::array();
    for (double K : s.K) {
        ModelParams params = s.params;
        params.K = K;
        const MeanFieldPath path = integrate_euler(initial_densities(params), params, s.horizon, options);
        const std::string stem = "meanfield_K" + k_label(K);
        const auto rows = meanfield_rows(path);
        files.csv(stem + ".csv", rows);
        if (s.svg) files.text(stem + ".svg", render_svg(rows, SeriesKind::gamma_K, stem));
        runs.push_back({{"K", K}, {"dt", path.dt}, {"steps", path.steps}});
        out << "K=" << k_label(K) << ": " << path.steps << " Euler steps, dt " << path.dt << "\n";
    }
    return {{"runs", runs}};
}

json run_fitness_command(const Scenario& s, const json& args, Outputs& files, std::ostream& out) {
    const FitnessMode mode = fitness_mode(s.mode);
    if (args.contains("invader") || args.contains("resident")) {
        const TraitIndex invader = trait_arg(args, "invader");
        const TraitIndex resident = trait_arg(args, "resident");
        require_trait(s.params, invader, "invader");
        require_trait(s.params, resident, "resident");
        const auto value = invasion_fitness(invader, resident, s.params, mode);
        out << "S(" << to_string(invader) << "," << to_string(resident) << ") = "
            << (value ? format_number(*value) : std::string("undefined")) << "\n";
        return {{"value", value ? json(*value) : json(nullptr)}};
    }
    const FitnessMatrix matrix(s.params, mode);
    const TraitGrid grid(s.params);
    std::ostringstream csv;
    csv << "invader_m,invader_n,resident_m,resident_n,value\n";
    for (TraitIndex invader : grid.traits()) {
        for (TraitIndex resident : grid.traits()) {
            const auto& value = matrix.at(invader, resident);
            csv << invader.m << ',' << invader.n << ',' << resident.m << ',' << resident.n << ','
                << (value ? format_number(*value) : std::string()) << '\n';
        }
    }
    files.text("fitness.csv", csv.str());
    out << "fitness matrix for " << grid.size() << " traits written\n";
    return json::object();
}

json run_compete_command(const Scenario& s, const json& args, Outputs& files, std::ostream& out) {
    const TraitIndex invader = trait_arg(args, "invader");
    const TraitIndex resident = trait_arg(args, "resident");
    require_trait(s.params, invader, "invader");
    require_trait(s.params, resident, "resident");
    const TraitCompetition setup = competition_from_traits(invader, resident, s.params);
    const CompetitionParams& c = setup.params;
    const InvasionCriteria crit = invasion_criteria(c, setup.system);
    const bool hold = criteria_hold(crit, setup.role);

    json result = {
        {"system", setup.system == CompetitionSystem::four_d ? "4d" : "3d"},
        {"role", setup.role == CompetitionRole::forward ? "forward" : "reverse"},
        {"params",
         {{"a1", c.a1}, {"b1", c.b1}, {"d1", c.d1}, {"d2", c.d2}, {"sigma2", c.sigma2}, {"p", c.p},
          {"q", c.q}, {"C", c.C}, {"tau", c.tau}, {"transfer_sign", c.transfer_sign()}}},
        {"criteria",
         {{"y_growth", crit.y_growth}, {"y_ratio", crit.y_ratio},
          {"invader_supercritical", crit.invader_supercritical},
          {"invader_subcritical", crit.invader_subcritical}, {"x_growth", crit.x_growth},
          {"x_ratio", crit.x_ratio}, {"resident_subcritical", crit.resident_subcritical},
          {"resident_supercritical", crit.resident_supercritical}, {"hold", hold}}}};
    out << "system " << result["system"].get<std::string>() << ", role "
        << result["role"].get<std::string>() << ", criteria " << (hold ? "hold" : "fail") << "\n";

    if (args.value("scan", false)) {
        const RootScan scan = scan_equilibria(c, setup.system);
        json roots = json::array();
        for (const auto& root : scan.roots) roots.push_back(std::vector<double>(root.begin(), root.end()));
        result["roots"] = roots;
        out << scan.roots.size() << " nonnegative equilibria from " << scan.seeds << " seeds\n";
    }
    if (hold) {
        const CompetitionOutcome outcome =
            competition_time(c, setup.system, setup.role, args.value("eps", 1e-3),
                             args.value("eps_prime", 1e-6), args.value("m", 0.1));
        result["time"] = outcome.time;
        result["final_state"] = std::vector<double>(outcome.state.begin(), outcome.state.end());
        out << "competition time " << outcome.time << "\n";
    }
    files.text("compete.json", result.dump(2) + "\n");
    return result;
}

BBPIParams bbpi_params(const json& args, double K) {
    BBPIParams p;
    p.b1 = args.value("b1", 1.0);
    p.b2 = args.value("b2", 0.0);
    p.d1 = args.value("d1", 0.5);
    p.d2 = args.value("d2", 0.1);
    p.sigma1 = args.value("sigma1", 0.5);
    p.sigma2 = args.value("sigma2", 0.5);
    p.a = args.value("a", 0.0);
    p.c = args.contains("c") && !args["c"].is_null() ? args["c"].get<double>() : kNoImmigration;
    p.beta = args.value("beta", 0.3);
    p.gamma = args.value("gamma", 0.0);
    p.K = K;
    p.validate();
    return p;
}

json run_bbpi_command(const Scenario& s, const json& args, Outputs& files, std::ostream& out) {
    const double K = s.K.front();
    const BBPIParams p = bbpi_params(args, K);
    const double log_K = std::log(K);
    const auto grid = uniform_grid(0.0, s.horizon, s.points);
    std::vector<double> raw(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) raw[j] = grid[j] * log_K;
    raw.back() = s.horizon * log_K;
    const PiecewiseLinear limit = bbpi_limit_beta(p, s.horizon);
    const auto paths = bbpi_simulate_replicates(p, s.horizon * log_K, s.seeds.front(), s.replicates, raw);

    std::ostringstream csv;
    csv << "t,mean_x,mean_y,mc_mean_x,mc_mean_y,beta_bar,beta_empirical\n";
    double sup = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const auto mean = bbpi_mean(p, raw[j]);
        double mx = 0.0, my = 0.0, exponent = 0.0;
        for (const auto& path : paths) {
            mx += static_cast<double>(path.x[j]);
            my += static_cast<double>(path.y[j]);
            exponent += std::log1p(static_cast<double>(path.x[j] + path.y[j])) / log_K;
        }
        const double count = static_cast<double>(paths.size());
        mx /= count;
        my /= count;
        exponent /= count;
        sup = std::max(sup, std::abs(exponent - limit(grid[j])));
        csv << format_number(grid[j]) << ',' << format_number(mean[0]) << ',' << format_number(mean[1])
            << ',' << format_number(mx) << ',' << format_number(my) << ','
            << format_number(limit(grid[j])) << ',' << format_number(exponent) << '\n';
    }
    files.text("oracle_bbpi.csv", csv.str());
    out << "lambda " << p.lambda() << ", sup |mean exponent - limit| = " << sup << "\n";
    return {{"lambda", p.lambda()}, {"sup_distance", sup}};
}

json run_reproduce_command(const Scenario& s, const json& args, Outputs& files, std::ostream& out) {
    const std::string id = args.at("example").get<std::string>();
    if (id != "example-2.1") {
        Scenario with_svg = s;
        with_svg.svg = true;
        return run_limit_command(with_svg, files, out);
    }
    const auto first = invasion_fitness({2, 4}, {0, 2}, s.params, FitnessMode::resident_relative);
    const auto second = invasion_fitness({0, 2}, {2, 4}, s.params, FitnessMode::resident_relative);
    if (!first || !second) throw NumericalError("example-2.1: fitness undefined");
    const bool pass_first = std::abs(*first - kExample21First) <= kExample21Tolerance;
    const bool pass_second = std::abs(*second - kExample21Second) <= kExample21Tolerance;
    out << "S((2d,4d),(0,2d)) = " << *first << " expected " << kExample21First << " +- "
        << kExample21Tolerance << ": " << (pass_first ? "pass" : "fail") << "\n";
    out << "S((0,2d),(2d,4d)) = " << *second << " expected " << kExample21Second << " +- "
        << kExample21Tolerance << ": " << (pass_second ? "pass" : "fail") << "\n";
    std::ostringstream csv;
    csv << "invader,resident,value,expected,pass\n"
        << "\"2,4\",\"0,2\"," << format_number(*first) << ',' << kExample21First << ','
        << pass_first << '\n'
        << "\"0,2\",\"2,4\"," << format_number(*second) << ',' << kExample21Second << ','
        << pass_second << '\n';
    files.text("example-2.1.csv", csv.str());
    return {{"values", {*first, *second}}, {"pass", pass_first && pass_second}};
}

struct Flags {
    std::string preset, config, out, mode;
    std::optional<std::uint64_t> seed;
    std::vector<double> K;
    std::optional<double> horizon;
    std::optional<int> replicates, points;
    bool svg = false, clamp = false, no_mutation = false, scan = false;
    std::string invader, resident, example, manifest;
    double eps = 1e-3, eps_prime = 1e-6, m = 0.1;
    std::map<std::string, double> bbpi;
};

Scenario build_scenario(const Flags& f, bool params_optional) {
    Scenario s;
    if (!f.config.empty()) {
        s = parse_config(read_text_file(f.config));
    } else if (!f.preset.empty()) {
        s = preset(f.preset);
    } else if (!params_optional) {
        throw ConfigError("missing params: pass --preset or --config");
    }
    if (!f.config.empty() && !f.preset.empty()) throw ConfigError("preset: use either --preset or --config");
    if (!f.out.empty()) s.out = f.out;
    if (!f.mode.empty()) s.mode = f.mode == "extended" ? LimitMode::extended : LimitMode::standard;
    if (f.seed) s.seeds = {*f.seed};
    if (!f.K.empty()) s.K = f.K;
    if (f.horizon) s.horizon = *f.horizon;
    if (f.replicates) s.replicates = *f.replicates;
    if (f.points) s.points = *f.points;
    if (f.svg) s.svg = true;
    if (f.clamp) s.clamp = true;
    if (f.no_mutation) s.with_mutation = false;
    s.validate();
    return s;
}

void add_common(CLI::App* app, Flags& f) {
    app->add_option("--preset", f.preset, "scenario preset (example-2.1, example-3.1 ... example-3.7)");
    app->add_option("--config", f.config, "JSON scenario file");
    app->add_option("--out", f.out, "output directory");
    app->add_option("--seed", f.seed, "base seed");
    app->add_option("--k", f.K, "carrying capacities");
    app->add_option("--horizon", f.horizon, "horizon in log K time units");
    app->add_option("--mode", f.mode, "limit mode")->check(CLI::IsMember({"standard", "extended"}));
    app->add_option("--replicates", f.replicates, "replicates per seed");
    app->add_option("--points", f.points, "output samples per trajectory");
    app->add_flag("--svg", f.svg, "also write SVG charts");
}

void write_error(std::ostream& err, const std::string& type, const std::string& message) {
    err << json{{"error", {{"type", type}, {"message", message}}}}.dump() << "\n";
}

}  // namespace

json execute(const std::string& command, const Scenario& scenario, const json& args,
             std::ostream& out) {
    scenario.validate();
    Outputs files{scenario.out};
    fs::create_directories(files.dir);
    json result;
    if (command == "limit") {
        result = run_limit_command(scenario, files, out);
    } else if (command == "simulate") {
        result = run_simulate_command(scenario, files, out);
    } else if (command == "meanfield") {
        result = run_meanfield_command(scenario, files, out);
    } else if (command == "fitness") {
        result = run_fitness_command(scenario, args, files, out);
    } else if (command == "compete") {
        result = run_compete_command(scenario, args, files, out);
    } else if (command == "oracle-bbpi") {
        result = run_bbpi_command(scenario, args, files, out);
    } else if (command == "reproduce") {
        result = run_reproduce_command(scenario, args, files, out);
    } else {
        throw ConfigError("command: unknown \"" + command + "\"");
    }
    json manifest = {{"tool", "adl"},
                     {"version", kVersion},
                     {"command", command},
                     {"args", args},
                     {"scenario", to_json(scenario)},
                     {"threads", worker_threads()},
                     {"result", result},
                     {"outputs", files.files}};
    if (result.contains("termination")) manifest["termination"] = result["termination"];
    write_text_file(files.dir / (command + ".manifest.json"), manifest.dump(2) + "\n");
    return manifest;
}

json replay(const json& manifest, const std::string& out_dir, std::ostream& out) {
    if (!manifest.contains("command") || !manifest.contains("scenario")) {
        throw ConfigError("manifest: missing command or scenario");
    }
    Scenario s = parse_config(manifest["scenario"].dump());
    if (!out_dir.empty()) s.out = out_dir;
    return execute(manifest["command"].get<std::string>(), s, manifest.value("args", json::object()),
                   out);
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adaptive dynamics with dormancy and transfer: limit, simulation and oracles", "adl"};
    app.require_subcommand(1);
    Flags f;

    auto* limit = app.add_subcommand("limit", "piecewise affine limit of the exponents");
    auto* simulate = app.add_subcommand("simulate", "exact stochastic simulation");
    auto* meanfield = app.add_subcommand("meanfield", "Euler scheme of the mean-field system");
    auto* fitness = app.add_subcommand("fitness", "invasion fitness values");
    auto* compete = app.add_subcommand("compete", "two-trait competition systems");
    auto* bbpi = app.add_subcommand("oracle-bbpi", "bi-type branching process with immigration");
    auto* reproduce = app.add_subcommand("reproduce", "rerun a worked example");
    auto* replay_cmd = app.add_subcommand("replay", "rerun a manifest");
    for (auto* sub : {limit, simulate, meanfield, fitness, compete, bbpi, reproduce}) add_common(sub, f);
    for (auto* sub : {meanfield}) {
        sub->add_flag("--clamp", f.clamp, "snap densities below 1/K to zero");
        sub->add_flag("--no-mutation", f.no_mutation, "drop the mutation inflow");
    }
    for (auto* sub : {fitness, compete}) {
        sub->add_option("--invader", f.invader, "invader trait m,n");
        sub->add_option("--resident", f.resident, "resident trait m,n");
    }
    compete->add_option("--eps", f.eps, "resident neighbourhood and invader unit size");
    compete->add_option("--eps-prime", f.eps_prime, "arrival tolerance");
    compete->add_option("--m", f.m, "invader size in units of eps");
    compete->add_flag("--scan", f.scan, "grid and Newton equilibrium scan");
    for (const char* key : {"b1", "b2", "d1", "d2", "sigma1", "sigma2", "a", "c", "beta", "gamma"}) {
        bbpi->add_option(std::string("--") + key, f.bbpi[key]);
    }
    reproduce->add_option("example", f.example, "example id")->required();
    replay_cmd->add_option("manifest", f.manifest, "manifest file")->required();
    replay_cmd->add_option("--out", f.out, "output directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        CLI::App* chosen = app.get_subcommands().front();
        const std::string command = chosen->get_name();
        if (command == "replay") {
            replay(json::parse(read_text_file(f.manifest)), f.out, out);
            return 0;
        }
        json extra = json::object();
        if (!f.invader.empty()) extra["invader"] = f.invader;
        if (!f.resident.empty()) extra["resident"] = f.resident;
        if (command == "compete") {
            extra["eps"] = f.eps;
            extra["eps_prime"] = f.eps_prime;
            extra["m"] = f.m;
            extra["scan"] = f.scan;
        }
        if (command == "oracle-bbpi") {
            for (const auto& [key, opt] : f.bbpi) {
                if (bbpi->count("--" + key)) extra[key] = opt;
            }
        }
        Scenario scenario;
        if (command == "reproduce") {
            extra["example"] = f.example;
            Flags with_preset = f;
            with_preset.preset = f.example;
            scenario = build_scenario(with_preset, false);
        } else if (command == "oracle-bbpi") {
            Flags defaults = f;
            if (!defaults.horizon) defaults.horizon = 2.0;
            if (defaults.K.empty()) defaults.K = {1e6};
            scenario = build_scenario(defaults, true);
        } else {
            scenario = build_scenario(f, false);
        }
        execute(command, scenario, extra, out);
        return 0;
    } catch (const ConfigError& e) {
        write_error(err, "ConfigError", e.what());
    } catch (const NumericalError& e) {
        write_error(err, "NumericalError", e.what());
    } catch (const OverflowError& e) {
        write_error(err, "OverflowError", e.what());
    } catch (const std::exception& e) {
        write_error(err, "Error", e.what());
    }
    return 1;
}

}  // namespace adl
