#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "safeguard/sim.hpp"

namespace safeguard {

// Gaussian distance-to-score map: exp(-dd^2 / sigma), in (0, 1].
double score(double dd, double sigma);

struct ScoreSigmas {
    double arm = 0.002;
    double base = 0.05;
    double env = 0.0002;
    double self = 0.0002;
};

struct MetricReport {
    double j_arm = 1.0;
    std::optional<double> j_base;  // absent for arm-goal-only tasks
    double m_self = 1.0;
    double m_env = 1.0;
    ScoreSigmas sigmas;
    int steps = 0;

    double efficiency() const { return j_base ? 0.5 * (j_arm + *j_base) : j_arm; }
    double safety() const { return 0.5 * (m_self + m_env); }
};

// Step-wise average scores. Goal scores apply the Gaussian to per-hand goal
// distances (averaged over hands) and the base distance; safety scores use
// the violated distance min(0, min_pair_d - d_min) per step.
MetricReport compute_metrics(const EpisodeLog& log, const SafetyIndexSpec& spec,
                             const ScoreSigmas& sigmas = {});

bool episode_success(const EpisodeLog& log);

struct SuccessMatrix {
    std::vector<std::string> algorithms;
    std::vector<std::vector<std::uint64_t>> success_seeds;  // per algorithm, sorted
    std::vector<double> marginal;                           // success rate per algorithm
    std::vector<std::vector<double>> conditional;           // P(col | row)
    std::vector<std::vector<int>> joint_counts;             // #(row & col)
    int seed_count = 0;
};

// Conditional success P(B|A) = #(A and B)/#A over a common seed set; throws
// MismatchedSeedSets when the per-algorithm batches disagree on seeds.
SuccessMatrix success_stats(const std::map<std::string, std::vector<EpisodeLog>>& by_algo);

struct TradeoffPoint {
    double param = 0.0;
    double efficiency = 0.0;
    double safety = 0.0;
    bool failed = false;  // episode errors at this grid value
};

// Upper-right frontier of the point cloud: keeps every point not dominated
// (>= in both coordinates, > in at least the ordering sense) by another;
// ties in efficiency keep only the best safety, ties in safety keep all.
// Returned in increasing efficiency order.
std::vector<TradeoffPoint> tradeoff_hull(const std::vector<TradeoffPoint>& points);

// The benchmark's published tuning schedule: 0..1 step 0.1, 1..10 step 1,
// 10..100 step 10, 100..1000 step 10 (each range half-open at the right).
std::vector<double> default_param_grid();

struct SweepResult {
    std::vector<TradeoffPoint> points;
    std::vector<TradeoffPoint> hull;
};

struct SweepRequest {
    TaskConfig task;
    const RobotModel* model = nullptr;
    DynamicsModel dyn;
    PolicyConfig policy;
    SafetyIndexSpec index;
    Algorithm algorithm = Algorithm::Ssa;
    std::vector<double> grid;
    std::vector<std::uint64_t> seeds;
    double dt = 0.01;
    int threads = 0;
};

SweepResult parameter_sweep(const SweepRequest& req);

// ---- emission ----------------------------------------------------------

struct TaskMetricsRow {
    std::string task, algorithm;
    double param = 0.0;
    MetricReport mean;       // averaged over seeds
    double success_rate = 0.0;
    double mean_loop_time = 0.0;
    int episodes = 0;
};

void write_metrics_csv(const std::vector<TaskMetricsRow>& rows, const std::string& path);
std::string metrics_json(const std::vector<TaskMetricsRow>& rows);
void write_matrix_csv(const SuccessMatrix& m, const std::string& path);
std::string matrix_json(const SuccessMatrix& m);
void write_sweep_csv(const SweepResult& s, const std::string& path);
std::string sweep_json(const SweepResult& s, const std::string& task,
                       const std::string& algorithm);
void write_text_file(const std::string& content, const std::string& path);

// self-contained SVG renderers
std::string svg_tradeoff_scatter(const SweepResult& s, const std::string& title);
std::string svg_radar(const std::vector<TaskMetricsRow>& rows, const std::string& title);
std::string svg_heatmap(const SuccessMatrix& m, const std::string& title);

}  // namespace safeguard
