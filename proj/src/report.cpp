#include "colwave/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace colwave {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

namespace {

std::ofstream open(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

void write_probes(std::ostream& os, const std::vector<ProbeResult>& probes, const char* kind, int alpha_max) {
    for (const auto& p : probes) {
        os << kind << ',' << fmt(p.t) << ',' << fmt(p.x) << ',' << fmt(p.radius) << ',' << p.ray;
        for (int a = 0; a <= alpha_max; ++a) {
            if (a < static_cast<int>(p.fits.size()) && p.fits[a]) {
                const auto& f = *p.fits[a];
                os << ',' << fmt(f.slope) << ',' << fmt(f.r2) << ',' << f.n_points;
            } else {
                os << ",,,0";
            }
        }
        os << ',' << p.verdict.alpha_ref << ',' << fmt(p.verdict.excess) << ',' << (p.verdict.defined ? 1 : 0) << ','
           << (p.verdict.flagged ? 1 : 0) << ',' << fmt(p.ray_distance) << ',' << (p.in_tube ? 1 : 0) << '\n';
    }
}

/// (t, x) overlay: rays as lines, lattice probes as dots (red when flagged).
std::string overlay_svg(const RunResult& res) {
    const auto& d = *res.detection;
    const auto& g = res.scenario.grid;
    const double W = 640, H = 480, m = 50;
    double x_lo = g.x_min, x_hi = g.x_max;
    const double t_lo = 0.0, t_hi = g.t_end;
    auto px = [&](double x) { return m + (x - x_lo) / (x_hi - x_lo) * (W - 2 * m); };
    auto py = [&](double t) { return H - m - (t - t_lo) / (t_hi - t_lo) * (H - 2 * m); };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<rect x=\"" << m << "\" y=\"" << m << "\" width=\"" << W - 2 * m << "\" height=\"" << H - 2 * m
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"13\">x</text>\n";
    os << "<text x=\"14\" y=\"" << H / 2 << "\" font-size=\"13\">t</text>\n";
    os << "<text x=\"" << m << "\" y=\"" << m - 12 << "\" font-size=\"13\">" << res.scenario.id
       << ": flagged probes (red), rays (blue predicted, gray dashed not predicted)</text>\n";
    for (const auto& r : d.predicted) {
        os << "<polyline fill=\"none\" stroke=\"" << (r.predicted ? "#1f4fbf" : "#888888") << "\" stroke-width=\"1.5\""
           << (r.predicted ? "" : " stroke-dasharray=\"5,4\"") << " points=\"";
        for (std::size_t k = 0; k < r.vertices.size(); ++k)
            os << (k ? " " : "") << fmt(px(r.vertices[k][1])) << ',' << fmt(py(r.vertices[k][0]));
        os << "\"><title>" << r.label << "</title></polyline>\n";
    }
    for (const auto* set : {&d.lattice, &d.ray_probes})
        for (const auto& p : *set) {
            const bool f = p.verdict.flagged;
            os << "<circle cx=\"" << fmt(px(p.x)) << "\" cy=\"" << fmt(py(p.t)) << "\" r=\"" << (f ? 2.5 : 1.5)
               << "\" fill=\"" << (f ? "#d62728" : "#bbbbbb") << "\"/>\n";
        }
    os << "</svg>\n";
    return os.str();
}

}  // namespace

std::string verdict_text(const RunResult& res) {
    std::ostringstream os;
    os << "scenario " << res.scenario.id << " (" << to_string(res.scenario.problem) << "), " << res.family.records.size()
       << " ladder members, eps " << fmt(res.family.records.front().eps) << " .. "
       << fmt(res.family.records.back().eps) << "\n";
    if (res.detection) {
        const auto& d = *res.detection;
        os << "singular support: precision " << fmt(d.precision) << ", recall " << fmt(d.recall) << ", "
           << d.flagged_outside << " flagged lattice probes outside the tubes\n";
        for (const auto& st : d.rays)
            os << "  " << st.label << (st.predicted ? " (predicted)" : " (not predicted)") << ": " << st.flagged << "/"
               << st.probes << " probes flagged, excess min " << fmt(st.min_excess) << " mean " << fmt(st.mean_excess)
               << " max " << fmt(st.max_excess) << "\n";
    }
    for (std::size_t j = 0; j < res.association.size(); ++j) {
        const auto& a = res.association[j];
        os << "association psi" << j << ": final error " << fmt(a.final_error) << " (tol " << fmt(a.tol) << "), "
           << (a.pass ? "PASS" : "FAIL") << "\n";
    }
    for (const auto& [k, v] : res.metrics) os << k << " = " << fmt(v) << "\n";
    for (const auto& n : res.notes) os << "note: " << n << "\n";
    return os.str();
}

void write_report(const RunResult& res, const std::filesystem::path& dir, const ReportOptions& opt) {
    std::filesystem::create_directories(dir);
    {
        auto os = open(dir / "metrics.csv");
        os << "metric,value\n";
        for (const auto& [k, v] : res.metrics) os << k << ',' << fmt(v) << '\n';
    }
    {
        auto os = open(dir / "verdict.txt");
        os << verdict_text(res);
    }
    if (res.detection) {
        const auto& d = *res.detection;
        const int A = res.scenario.detect.alpha_max;
        {
            auto os = open(dir / "probes.csv");
            os << "kind,t,x,radius,ray";
            for (int a = 0; a <= A; ++a) os << ",slope" << a << ",r2_" << a << ",n" << a;
            os << ",alpha_ref,excess,defined,flagged,ray_distance,in_tube\n";
            write_probes(os, d.lattice, "lattice", A);
            write_probes(os, d.ray_probes, "ray", A);
        }
        {
            auto os = open(dir / "rays.csv");
            os << "label,predicted,t0,x0,t1,x1,probes,flagged,recall,min_excess,mean_excess,max_excess\n";
            for (std::size_t k = 0; k < d.rays.size(); ++k) {
                const auto& st = d.rays[k];
                const auto& r = d.predicted[k];
                os << st.label << ',' << (st.predicted ? 1 : 0) << ',' << fmt(r.vertices.front()[0]) << ','
                   << fmt(r.vertices.front()[1]) << ',' << fmt(r.vertices.back()[0]) << ','
                   << fmt(r.vertices.back()[1]) << ',' << st.probes << ',' << st.flagged << ',' << fmt(st.recall())
                   << ',' << fmt(st.min_excess) << ',' << fmt(st.mean_excess) << ',' << fmt(st.max_excess) << '\n';
            }
        }
        auto os = open(dir / "overlay.svg");
        os << overlay_svg(res);
    }
    if (!res.energy.empty()) {
        auto os = open(dir / "energy.csv");
        os << "eps,t,E,relative_drift\n";
        for (const auto& tr : res.energy)
            for (std::size_t k = 0; k < tr.E.size(); ++k)
                os << fmt(tr.eps) << ',' << fmt(tr.times[k]) << ',' << fmt(tr.E[k]) << ','
                   << fmt(tr.E.front() != 0.0 ? (tr.E[k] - tr.E.front()) / tr.E.front() : 0.0) << '\n';
    }
    if (!res.association.empty()) {
        auto os = open(dir / "association.csv");
        os << "psi,tc,xc,rt,rx,oracle,eps,error\n";
        for (std::size_t j = 0; j < res.association.size(); ++j) {
            const auto& a = res.association[j];
            const auto& p = res.scenario.psis[j];
            for (std::size_t k = 0; k < a.eps.size(); ++k)
                os << j << ',' << fmt(p.tc) << ',' << fmt(p.xc) << ',' << fmt(p.rt) << ',' << fmt(p.rx) << ','
                   << fmt(res.oracle_pairings[j]) << ',' << fmt(a.eps[k]) << ',' << fmt(a.errors[k]) << '\n';
        }
    }
    if (opt.write_fields) write_family(res.family, dir / "family");
}

}  // namespace colwave
