#include "safeguard/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "safeguard/errors.hpp"

namespace safeguard {

double score(double dd, double sigma) { return std::exp(-(dd * dd) / sigma); }

MetricReport compute_metrics(const EpisodeLog& log, const SafetyIndexSpec& spec,
                             const ScoreSigmas& sigmas) {
    if (log.records.empty()) throw EmptyLog("episode has no records");
    MetricReport r;
    r.sigmas = sigmas;
    r.steps = static_cast<int>(log.records.size());

    double j_arm = 0.0, j_base = 0.0, m_self = 0.0, m_env = 0.0;
    bool any_base = false;
    for (const auto& rec : log.records) {
        double arm_score = 1.0;
        int hands = 0;
        double acc = 0.0;
        if (rec.arm_goal_dist_left) {
            acc += score(*rec.arm_goal_dist_left, sigmas.arm);
            ++hands;
        }
        if (rec.arm_goal_dist_right) {
            acc += score(*rec.arm_goal_dist_right, sigmas.arm);
            ++hands;
        }
        if (hands > 0) arm_score = acc / hands;
        j_arm += arm_score;

        if (rec.base_goal_dist) {
            j_base += score(*rec.base_goal_dist, sigmas.base);
            any_base = true;
        }

        const double dd_env = std::min(0.0, rec.min_env_d - spec.d_min_env);
        m_env += score(dd_env, sigmas.env);
        const double dd_self =
            rec.min_self_d ? std::min(0.0, *rec.min_self_d - spec.d_min_self) : 0.0;
        m_self += score(dd_self, sigmas.self);
    }
    const double T = static_cast<double>(r.steps);
    r.j_arm = j_arm / T;
    if (any_base) r.j_base = j_base / T;
    r.m_self = m_self / T;
    r.m_env = m_env / T;
    return r;
}

bool episode_success(const EpisodeLog& log) {
    if (log.termination != Termination::GoalReached) return false;
    for (const auto& rec : log.records) {
        if (rec.min_env_d < 0.0) return false;
        if (rec.min_self_d && *rec.min_self_d < 0.0) return false;
    }
    return true;
}

SuccessMatrix success_stats(const std::map<std::string, std::vector<EpisodeLog>>& by_algo) {
    SuccessMatrix m;
    std::vector<std::uint64_t> reference_seeds;
    for (const auto& [algo, logs] : by_algo) {
        std::vector<std::uint64_t> seeds;
        for (const auto& l : logs) seeds.push_back(l.seed);
        std::sort(seeds.begin(), seeds.end());
        if (reference_seeds.empty())
            reference_seeds = seeds;
        else if (seeds != reference_seeds)
            throw MismatchedSeedSets("algorithm " + algo + " ran a different seed set");
        m.algorithms.push_back(algo);
        std::vector<std::uint64_t> wins;
        for (const auto& l : logs)
            if (episode_success(l)) wins.push_back(l.seed);
        std::sort(wins.begin(), wins.end());
        m.success_seeds.push_back(std::move(wins));
    }
    m.seed_count = static_cast<int>(reference_seeds.size());

    const size_t k = m.algorithms.size();
    m.marginal.resize(k, 0.0);
    m.conditional.assign(k, std::vector<double>(k, 0.0));
    m.joint_counts.assign(k, std::vector<int>(k, 0));
    for (size_t a = 0; a < k; ++a) {
        m.marginal[a] = m.seed_count > 0
                            ? static_cast<double>(m.success_seeds[a].size()) / m.seed_count
                            : 0.0;
        for (size_t b = 0; b < k; ++b) {
            std::vector<std::uint64_t> inter;
            std::set_intersection(m.success_seeds[a].begin(), m.success_seeds[a].end(),
                                  m.success_seeds[b].begin(), m.success_seeds[b].end(),
                                  std::back_inserter(inter));
            m.joint_counts[a][b] = static_cast<int>(inter.size());
            const size_t na = m.success_seeds[a].size();
            m.conditional[a][b] =
                na > 0 ? static_cast<double>(inter.size()) / static_cast<double>(na) : 0.0;
        }
    }
    return m;
}

std::vector<TradeoffPoint> tradeoff_hull(const std::vector<TradeoffPoint>& points) {
    std::vector<TradeoffPoint> sorted;
    for (const auto& p : points)
        if (!p.failed) sorted.push_back(p);
    // sweep from high efficiency to low, safety descending within ties: a
    // point joins the frontier iff its safety matches or beats everything at
    // strictly higher efficiency; efficiency ties keep only their best safety
    std::sort(sorted.begin(), sorted.end(), [](const TradeoffPoint& a, const TradeoffPoint& b) {
        if (a.efficiency != b.efficiency) return a.efficiency > b.efficiency;
        return a.safety > b.safety;
    });
    std::vector<TradeoffPoint> hull;
    double best_safety = -std::numeric_limits<double>::infinity();
    double prev_eff = std::numeric_limits<double>::quiet_NaN();
    for (const auto& p : sorted) {
        if (p.efficiency != prev_eff && p.safety >= best_safety) hull.push_back(p);
        best_safety = std::max(best_safety, p.safety);
        prev_eff = p.efficiency;
    }
    std::reverse(hull.begin(), hull.end());  // increasing efficiency
    return hull;
}

std::vector<double> default_param_grid() {
    std::vector<double> g;
    for (int i = 0; i < 10; ++i) g.push_back(0.1 * i);
    for (int i = 1; i < 10; ++i) g.push_back(static_cast<double>(i));
    for (int i = 1; i < 10; ++i) g.push_back(10.0 * i);
    for (int i = 10; i < 100; ++i) g.push_back(10.0 * i);
    return g;  // 10 + 9 + 9 + 90 values
}

SweepResult parameter_sweep(const SweepRequest& req) {
    if (req.grid.empty()) throw ValidationError("grid", "must be non-empty");
    SweepResult out;
    std::vector<EpisodeSetup> items;
    for (const double param : req.grid) {
        for (const auto seed : req.seeds) {
            EpisodeSetup s;
            s.task = req.task;
            s.model = req.model;
            s.dyn = req.dyn;
            s.policy = req.policy;
            s.index = req.index;
            s.filter.algorithm = req.algorithm;
            s.filter.gain = param;
            s.dt = req.dt;
            s.seed = seed;
            items.push_back(std::move(s));
        }
    }
    const std::vector<EpisodeLog> logs = run_batch(items, req.threads);

    const size_t per = req.seeds.size();
    for (size_t gi = 0; gi < req.grid.size(); ++gi) {
        TradeoffPoint p;
        p.param = req.grid[gi];
        double eff = 0.0, saf = 0.0;
        int ok = 0;
        for (size_t si = 0; si < per; ++si) {
            const EpisodeLog& log = logs[gi * per + si];
            if (log.termination == Termination::Error) continue;
            const MetricReport mr = compute_metrics(log, req.index);
            eff += mr.efficiency();
            saf += mr.safety();
            ++ok;
        }
        if (ok == 0) {
            p.failed = true;  // flagged, sweep continues
        } else {
            p.efficiency = eff / ok;
            p.safety = saf / ok;
        }
        out.points.push_back(p);
    }
    out.hull = tradeoff_hull(out.points);
    return out;
}

}  // namespace safeguard
