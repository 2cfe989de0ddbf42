#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "safeguard/bench.hpp"
#include "safeguard/config_io.hpp"
#include "safeguard/errors.hpp"

namespace fs = std::filesystem;
using namespace safeguard;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOpts {
    std::string task;
    std::string algo = "ssa";
    double param = -1.0;  // <0 = use the tuned table
    int episodes = 10;
    std::uint64_t seed = 1;
    double dt = 0.01;
    int max_steps = -1;
    std::string out = "results";
    std::string format = "json";  // csv|json|svg (svg implies json too)
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_algo) {
    cmd->add_option("--task", o.task, "benchmark task name (see list-tasks)")->required();
    if (needs_algo)
        cmd->add_option("--algo", o.algo, "safety filter: ssa|cbf|sss|pfm|sma");
    cmd->add_option("--param", o.param, "filter gain override (default: tuned table)");
    cmd->add_option("--episodes", o.episodes, "episodes (seeds) per configuration");
    cmd->add_option("--seed", o.seed, "first seed");
    cmd->add_option("--dt", o.dt, "integration step (s)");
    cmd->add_option("--max-steps", o.max_steps, "episode step budget");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--format", o.format, "csv|json|svg");
}

BundleOverrides to_overrides(const CommonOpts& o, bool with_algo) {
    BundleOverrides ov;
    if (with_algo) ov.algorithm = o.algo;
    if (o.param >= 0.0) ov.param = o.param;
    ov.dt = o.dt;
    if (o.max_steps > 0) ov.max_steps = o.max_steps;
    ov.episodes = o.episodes;
    ov.seed = o.seed;
    return ov;
}

TaskMetricsRow summarize(const RunBundle& bundle, const std::vector<EpisodeLog>& logs) {
    TaskMetricsRow row;
    row.task = bundle.task.name;
    row.algorithm = algorithm_name(bundle.filter.algorithm);
    row.param = bundle.filter.gain;
    row.episodes = static_cast<int>(logs.size());
    double j_arm = 0, j_base = 0, m_self = 0, m_env = 0, loop = 0;
    int base_n = 0, wins = 0;
    long steps = 0;
    for (const auto& log : logs) {
        const MetricReport mr = compute_metrics(log, bundle.index, bundle.sigmas);
        j_arm += mr.j_arm;
        if (mr.j_base) {
            j_base += *mr.j_base;
            ++base_n;
        }
        m_self += mr.m_self;
        m_env += mr.m_env;
        if (episode_success(log)) ++wins;
        for (const auto& r : log.records) {
            loop += r.loop_time;
            ++steps;
        }
    }
    const double n = static_cast<double>(logs.size());
    row.mean.j_arm = j_arm / n;
    if (base_n > 0) row.mean.j_base = j_base / base_n;
    row.mean.m_self = m_self / n;
    row.mean.m_env = m_env / n;
    row.mean.sigmas = bundle.sigmas;
    row.success_rate = wins / n;
    row.mean_loop_time = steps > 0 ? loop / steps : 0.0;
    return row;
}

void emit_rows(const std::vector<TaskMetricsRow>& rows, const CommonOpts& o,
               const std::string& stem) {
    fs::create_directories(o.out);
    if (o.format == "csv") {
        write_metrics_csv(rows, o.out + "/" + stem + ".csv");
    } else {
        write_text_file(metrics_json(rows), o.out + "/" + stem + ".json");
        if (o.format == "svg")
            write_text_file(svg_radar(rows, stem), o.out + "/" + stem + "_radar.svg");
    }
}

int cmd_run(const CommonOpts& o, const std::string& trace_path) {
    const RunBundle bundle = load_bundle(o.task, to_overrides(o, true));
    std::vector<EpisodeSetup> items;
    for (const auto s : bundle.seeds) items.push_back(bundle.episode(s));
    const std::vector<EpisodeLog> logs = run_batch(items);
    for (const auto& log : logs)
        if (log.termination == Termination::Error)
            throw Error("episode seed " + std::to_string(log.seed) +
                        " failed: " + log.error_message);
    if (!trace_path.empty() && !logs.empty()) write_trace(logs.front(), trace_path);
    emit_rows({summarize(bundle, logs)}, o, "metrics_" + o.task + "_" + o.algo);
    std::cout << "wrote " << o.out << "/metrics_" << o.task << "_" << o.algo << "."
              << (o.format == "csv" ? "csv" : "json") << "\n";
    return kExitOk;
}

int cmd_matrix(const CommonOpts& o) {
    std::map<std::string, std::vector<EpisodeLog>> by_algo;
    std::vector<TaskMetricsRow> rows;
    for (const std::string algo : {"ssa", "cbf", "sss", "pfm", "sma"}) {
        CommonOpts oa = o;
        oa.algo = algo;
        const RunBundle bundle = load_bundle(o.task, to_overrides(oa, true));
        std::vector<EpisodeSetup> items;
        for (const auto s : bundle.seeds) items.push_back(bundle.episode(s));
        auto logs = run_batch(items);
        rows.push_back(summarize(bundle, logs));
        by_algo.emplace(algo, std::move(logs));
    }
    const SuccessMatrix m = success_stats(by_algo);
    fs::create_directories(o.out);
    if (o.format == "csv") {
        write_matrix_csv(m, o.out + "/matrix_" + o.task + ".csv");
        write_metrics_csv(rows, o.out + "/metrics_" + o.task + ".csv");
    } else {
        write_text_file(matrix_json(m), o.out + "/matrix_" + o.task + ".json");
        write_text_file(metrics_json(rows), o.out + "/metrics_" + o.task + ".json");
        if (o.format == "svg") {
            write_text_file(svg_heatmap(m, o.task), o.out + "/matrix_" + o.task + ".svg");
            write_text_file(svg_radar(rows, o.task), o.out + "/metrics_" + o.task + "_radar.svg");
        }
    }
    std::cout << "wrote matrix + metrics for " << o.task << " under " << o.out << "\n";
    return kExitOk;
}

int cmd_sweep(const CommonOpts& o, const std::vector<double>& grid_override) {
    const RunBundle bundle = load_bundle(o.task, to_overrides(o, true));
    SweepRequest req;
    req.task = bundle.task;
    req.model = bundle.model;
    req.dyn = bundle.dyn;
    req.policy = bundle.policy;
    req.index = bundle.index;
    req.algorithm = bundle.filter.algorithm;
    req.grid = grid_override.empty() ? default_param_grid() : grid_override;
    req.seeds = bundle.seeds;
    req.dt = bundle.dt;
    const SweepResult res = parameter_sweep(req);
    fs::create_directories(o.out);
    const std::string stem = "sweep_" + o.task + "_" + o.algo;
    if (o.format == "csv") {
        write_sweep_csv(res, o.out + "/" + stem + ".csv");
    } else {
        write_text_file(sweep_json(res, o.task, o.algo), o.out + "/" + stem + ".json");
        if (o.format == "svg")
            write_text_file(svg_tradeoff_scatter(res, stem), o.out + "/" + stem + ".svg");
    }
    std::cout << "wrote " << o.out << "/" << stem << "\n";
    return kExitOk;
}

int cmd_plot(const std::string& input, const std::string& out_dir) {
    std::ifstream in(input);
    if (!in) throw ValidationError("in", "cannot open " + input);
    nlohmann::json j;
    in >> j;
    fs::create_directories(out_dir);
    const std::string kind = j.value("kind", "");
    const std::string stem = fs::path(input).stem().string();
    if (kind == "sweep") {
        SweepResult s;
        for (const auto& p : j["points"])
            s.points.push_back({p["param"], p["efficiency"], p["safety"], p["failed"]});
        for (const auto& p : j["hull"])
            s.hull.push_back({p["param"], p["efficiency"], p["safety"], false});
        write_text_file(svg_tradeoff_scatter(s, stem), out_dir + "/" + stem + ".svg");
    } else if (kind == "success_matrix") {
        SuccessMatrix m;
        m.algorithms = j["algorithms"].get<std::vector<std::string>>();
        m.conditional = j["conditional"].get<std::vector<std::vector<double>>>();
        m.marginal = j["marginal"].get<std::vector<double>>();
        m.seed_count = j["seed_count"];
        write_text_file(svg_heatmap(m, stem), out_dir + "/" + stem + ".svg");
    } else if (kind == "metrics") {
        std::vector<TaskMetricsRow> rows;
        for (const auto& rj : j["rows"]) {
            TaskMetricsRow r;
            r.task = rj["task"];
            r.algorithm = rj["algorithm"];
            r.param = rj["param"];
            r.mean.j_arm = rj["j_arm"];
            if (!rj["j_base"].is_null()) r.mean.j_base = rj["j_base"].get<double>();
            r.mean.m_self = rj["m_self"];
            r.mean.m_env = rj["m_env"];
            rows.push_back(r);
        }
        write_text_file(svg_radar(rows, stem), out_dir + "/" + stem + "_radar.svg");
    } else {
        throw ValidationError("in", "unrecognized result kind '" + kind + "'");
    }
    std::cout << "wrote plot(s) for " << input << " under " << out_dir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"safe-control toolkit and benchmark harness"};
    app.require_subcommand(1);

    CommonOpts run_o, sweep_o, matrix_o;
    std::string trace_path;
    std::vector<double> grid_override;
    std::string plot_in, plot_out = "results";

    auto* run = app.add_subcommand("run", "run one task/algorithm/parameter configuration");
    add_common(run, run_o, true);
    run->add_option("--trace", trace_path, "write the first episode's step trace here");

    auto* sweep = app.add_subcommand("sweep", "parameter sweep with trade-off hull");
    add_common(sweep, sweep_o, true);
    sweep->add_option("--grid", grid_override, "explicit grid values (default: built-in schedule)");

    auto* matrix = app.add_subcommand("matrix", "success matrix over all five algorithms");
    add_common(matrix, matrix_o, false);

    auto* plot = app.add_subcommand("plot", "render SVG plots from a result JSON file");
    plot->add_option("--in", plot_in, "result JSON (metrics/matrix/sweep)")->required();
    plot->add_option("--out", plot_out, "output directory");

    auto* list = app.add_subcommand("list-tasks", "list bundled benchmark tasks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(run_o, trace_path);
        if (sweep->parsed()) return cmd_sweep(sweep_o, grid_override);
        if (matrix->parsed()) return cmd_matrix(matrix_o);
        if (plot->parsed()) return cmd_plot(plot_in, plot_out);
        if (list->parsed()) {
            for (const auto& n : task_names()) {
                const auto& t = builtin_tasks().at(n);
                std::cout << n << "  obstacles=" << t.num_obstacles
                          << " obstacle_velocity=" << t.obstacle_velocity
                          << " max_steps=" << t.max_steps << "\n";
            }
            return kExitOk;
        }
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
