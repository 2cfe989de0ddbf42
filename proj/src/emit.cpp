#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "safeguard/bench.hpp"
#include "safeguard/errors.hpp"

namespace safeguard {

using nlohmann::ordered_json;

namespace {

constexpr int kResultSchemaVersion = 1;

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

void write_or_throw(const std::string& content, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file " + path);
    out << content;
    if (!out) throw Error("write failed for " + path);
}

ordered_json row_json(const TaskMetricsRow& r) {
    ordered_json j;
    j["task"] = r.task;
    j["algorithm"] = r.algorithm;
    j["param"] = r.param;
    j["episodes"] = r.episodes;
    j["j_arm"] = r.mean.j_arm;
    if (r.mean.j_base)
        j["j_base"] = *r.mean.j_base;
    else
        j["j_base"] = nullptr;  // "NA" for arm-goal-only tasks
    j["m_self"] = r.mean.m_self;
    j["m_env"] = r.mean.m_env;
    j["success_rate"] = r.success_rate;
    return j;
}

}  // namespace

void write_text_file(const std::string& content, const std::string& path) {
    write_or_throw(content, path);
}

void write_metrics_csv(const std::vector<TaskMetricsRow>& rows, const std::string& path) {
    std::ostringstream os;
    os << "task,algorithm,param,episodes,j_arm,j_base,m_self,m_env,success_rate\n";
    for (const auto& r : rows) {
        os << r.task << ',' << r.algorithm << ',' << fmt(r.param) << ',' << r.episodes << ','
           << fmt(r.mean.j_arm) << ',' << (r.mean.j_base ? fmt(*r.mean.j_base) : "NA") << ','
           << fmt(r.mean.m_self) << ',' << fmt(r.mean.m_env) << ',' << fmt(r.success_rate)
           << '\n';
    }
    write_or_throw(os.str(), path);
}

std::string metrics_json(const std::vector<TaskMetricsRow>& rows) {
    ordered_json j;
    j["schema_version"] = kResultSchemaVersion;
    j["kind"] = "metrics";
    j["rows"] = ordered_json::array();
    for (const auto& r : rows) j["rows"].push_back(row_json(r));
    return j.dump(2) + "\n";
}

void write_matrix_csv(const SuccessMatrix& m, const std::string& path) {
    std::ostringstream os;
    os << "algorithm,marginal_success";
    for (const auto& b : m.algorithms) os << ",P(" << b << "|row)";
    os << '\n';
    for (size_t a = 0; a < m.algorithms.size(); ++a) {
        os << m.algorithms[a] << ',' << fmt(m.marginal[a]);
        for (size_t b = 0; b < m.algorithms.size(); ++b) os << ',' << fmt(m.conditional[a][b]);
        os << '\n';
    }
    write_or_throw(os.str(), path);
}

std::string matrix_json(const SuccessMatrix& m) {
    ordered_json j;
    j["schema_version"] = kResultSchemaVersion;
    j["kind"] = "success_matrix";
    j["algorithms"] = m.algorithms;
    j["seed_count"] = m.seed_count;
    j["marginal"] = m.marginal;
    j["success_counts"] = ordered_json::array();
    for (const auto& s : m.success_seeds) j["success_counts"].push_back(s.size());
    j["conditional"] = m.conditional;
    j["joint_counts"] = m.joint_counts;
    return j.dump(2) + "\n";
}

void write_sweep_csv(const SweepResult& s, const std::string& path) {
    std::ostringstream os;
    os << "param,efficiency,safety,on_hull,failed\n";
    for (const auto& p : s.points) {
        bool on_hull = false;
        for (const auto& h : s.hull)
            on_hull = on_hull || (h.param == p.param && h.efficiency == p.efficiency &&
                                  h.safety == p.safety);
        os << fmt(p.param) << ',' << fmt(p.efficiency) << ',' << fmt(p.safety) << ','
           << (on_hull ? 1 : 0) << ',' << (p.failed ? 1 : 0) << '\n';
    }
    write_or_throw(os.str(), path);
}

std::string sweep_json(const SweepResult& s, const std::string& task,
                       const std::string& algorithm) {
    ordered_json j;
    j["schema_version"] = kResultSchemaVersion;
    j["kind"] = "sweep";
    j["task"] = task;
    j["algorithm"] = algorithm;
    auto pts = ordered_json::array();
    for (const auto& p : s.points) {
        ordered_json pj;
        pj["param"] = p.param;
        pj["efficiency"] = p.efficiency;
        pj["safety"] = p.safety;
        pj["failed"] = p.failed;
        pts.push_back(pj);
    }
    j["points"] = pts;
    auto hull = ordered_json::array();
    for (const auto& p : s.hull) {
        ordered_json pj;
        pj["param"] = p.param;
        pj["efficiency"] = p.efficiency;
        pj["safety"] = p.safety;
        hull.push_back(pj);
    }
    j["hull"] = hull;
    return j.dump(2) + "\n";
}

// ---- SVG ---------------------------------------------------------------

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2"};

struct SvgCanvas {
    std::ostringstream os;
    int w, h;
    SvgCanvas(int w, int h) : w(w), h(h) {
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
           << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
           << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    }
    void title(const std::string& t) {
        os << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\" "
           << "font-family=\"sans-serif\">" << t << "</text>\n";
    }
    std::string finish() {
        os << "</svg>\n";
        return os.str();
    }
};

}  // namespace

std::string svg_tradeoff_scatter(const SweepResult& s, const std::string& title) {
    const int W = 480, H = 420, M = 50;
    SvgCanvas c(W, H);
    c.title(title);
    auto px = [&](double eff) { return M + eff * (W - 2 * M); };
    auto py = [&](double saf) { return H - M - saf * (H - 2 * M); };
    c.os << "<line x1=\"" << M << "\" y1=\"" << H - M << "\" x2=\"" << W - M << "\" y2=\""
         << H - M << "\" stroke=\"black\"/>\n";
    c.os << "<line x1=\"" << M << "\" y1=\"" << H - M << "\" x2=\"" << M << "\" y2=\"" << M
         << "\" stroke=\"black\"/>\n";
    c.os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
         << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
            "efficiency</text>\n";
    c.os << "<text x=\"14\" y=\"" << H / 2
         << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
            "transform=\"rotate(-90 14 "
         << H / 2 << ")\">safety</text>\n";
    for (const auto& p : s.points) {
        if (p.failed) continue;
        c.os << "<circle cx=\"" << px(p.efficiency) << "\" cy=\"" << py(p.safety)
             << "\" r=\"3\" fill=\"" << kPalette[0] << "\" fill-opacity=\"0.6\"/>\n";
    }
    if (!s.hull.empty()) {
        c.os << "<polyline fill=\"none\" stroke=\"" << kPalette[3]
             << "\" stroke-width=\"2\" points=\"";
        for (const auto& p : s.hull) c.os << px(p.efficiency) << ',' << py(p.safety) << ' ';
        c.os << "\"/>\n";
    }
    return c.finish();
}

std::string svg_radar(const std::vector<TaskMetricsRow>& rows, const std::string& title) {
    const int W = 480, H = 460;
    const double cx = W / 2.0, cy = H / 2.0 + 10, R = 150.0;
    const char* axes[] = {"J_arm", "J_base", "M_self", "M_env"};
    SvgCanvas c(W, H);
    c.title(title);
    for (int a = 0; a < 4; ++a) {
        const double ang = M_PI / 2 - a * M_PI / 2;  // 4 axes
        const double x = cx + R * std::cos(ang), y = cy - R * std::sin(ang);
        c.os << "<line x1=\"" << cx << "\" y1=\"" << cy << "\" x2=\"" << x << "\" y2=\"" << y
             << "\" stroke=\"#999\"/>\n";
        c.os << "<text x=\"" << cx + (R + 18) * std::cos(ang) << "\" y=\""
             << cy - (R + 18) * std::sin(ang)
             << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
             << axes[a] << "</text>\n";
    }
    int ci = 0;
    for (const auto& r : rows) {
        const double vals[4] = {r.mean.j_arm, r.mean.j_base.value_or(0.0), r.mean.m_self,
                                r.mean.m_env};
        c.os << "<polygon fill=\"" << kPalette[ci % 7] << "\" fill-opacity=\"0.15\" stroke=\""
             << kPalette[ci % 7] << "\" stroke-width=\"1.5\" points=\"";
        for (int a = 0; a < 4; ++a) {
            const double ang = M_PI / 2 - a * M_PI / 2;
            c.os << cx + R * vals[a] * std::cos(ang) << ',' << cy - R * vals[a] * std::sin(ang)
                 << ' ';
        }
        c.os << "\"/>\n";
        c.os << "<text x=\"20\" y=\"" << 40 + 16 * ci << "\" font-size=\"12\" fill=\""
             << kPalette[ci % 7] << "\" font-family=\"sans-serif\">" << r.algorithm
             << "</text>\n";
        ++ci;
    }
    return c.finish();
}

std::string svg_heatmap(const SuccessMatrix& m, const std::string& title) {
    const int n = static_cast<int>(m.algorithms.size());
    const int cell = 64, M = 90;
    const int W = M + n * cell + 30, H = M + n * cell + 30;
    SvgCanvas c(W, H);
    c.title(title);
    for (int a = 0; a < n; ++a) {
        c.os << "<text x=\"" << M - 8 << "\" y=\"" << M + a * cell + cell / 2 + 4
             << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
             << m.algorithms[a] << "</text>\n";
        c.os << "<text x=\"" << M + a * cell + cell / 2 << "\" y=\"" << M - 8
             << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
             << m.algorithms[a] << "</text>\n";
    }
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const double v = m.conditional[a][b];
            const int green = static_cast<int>(255 * v);
            const int red = static_cast<int>(255 * (1.0 - v) * 0.8 + 40);
            c.os << "<rect x=\"" << M + b * cell << "\" y=\"" << M + a * cell << "\" width=\""
                 << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << red << ',' << green
                 << ",80)\" stroke=\"white\"/>\n";
            std::ostringstream val;
            val << std::fixed << std::setprecision(2) << v;
            c.os << "<text x=\"" << M + b * cell + cell / 2 << "\" y=\""
                 << M + a * cell + cell / 2 + 4
                 << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
                 << val.str() << "</text>\n";
        }
    }
    return c.finish();
}

}  // namespace safeguard
