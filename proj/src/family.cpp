#include "colwave/family.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace colwave {

void Grid1D::validate() const {
    if (!(x_max > x_min)) throw std::invalid_argument("grid.x_max must exceed grid.x_min");
    if (nx < 8) throw std::invalid_argument("grid.nx must be at least 8");
    if (!(t_end > 0.0)) throw std::invalid_argument("grid.t_end must be positive");
    if (!(cfl > 0.0 && cfl < 1.0)) throw std::invalid_argument("grid.cfl must lie in (0,1)");
}

Grid1D Grid1D::with_spacing(double target) const {
    Grid1D g = *this;
    g.nx = std::max(8, static_cast<int>(std::ceil((x_max - x_min) / target - 1e-9)));
    return g;
}

Profile Profile::zero() {
    Profile p;
    p.f = [](double) { return 0.0; };
    p.df = [](double) { return 0.0; };
    p.support_lo = 0.0;
    p.support_hi = 0.0;
    p.label = "zero";
    return p;
}

Profile Profile::delta_like(const Mollifier& m, double h, double x0) {
    Profile p;
    p.f = [m, h, x0](double x) { return m.scaled(x - x0, h); };
    p.df = [m, h, x0](double x) { return m.scaled_deriv(x - x0, h, 1); };
    p.support_lo = x0 - h;
    p.support_hi = x0 + h;
    p.label = "delta_like";
    return p;
}

Profile Profile::step(const Mollifier& m, double h, double x0) {
    Profile p;
    p.f = [m, h, x0](double x) { return m.antideriv((x - x0) / h); };
    p.df = [m, h, x0](double x) { return m.scaled(x - x0, h); };
    p.label = "step";
    return p;
}

Profile Profile::polynomial(std::vector<double> coeffs) {
    Profile p;
    p.f = [coeffs](double x) {
        double acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
        return acc;
    };
    p.df = [coeffs](double x) {
        double acc = 0.0;
        for (std::size_t k = coeffs.size(); k-- > 1;) acc = acc * x + k * coeffs[k];
        return acc;
    };
    p.label = "polynomial";
    return p;
}

Profile Profile::gaussian(double x0, double width, double amplitude) {
    Profile p;
    p.f = [=](double x) {
        const double s = (x - x0) / width;
        return amplitude * std::exp(-s * s);
    };
    p.df = [=](double x) {
        const double s = (x - x0) / width;
        return -2.0 * s / width * amplitude * std::exp(-s * s);
    };
    p.label = "gaussian";
    return p;
}

Profile Profile::odd_gaussian() {
    Profile p;
    p.f = [](double x) { return x * std::exp(-x * x); };
    p.df = [](double x) { return (1.0 - 2.0 * x * x) * std::exp(-x * x); };
    p.label = "odd_gaussian";
    return p;
}

namespace {
const Mollifier& psi_kernel() {
    static const Mollifier m = Mollifier::polynomial(4);
    return m;
}
}  // namespace

double TestFunction::t_factor(double t) const { return psi_kernel().eval((t - tc) / rt); }
double TestFunction::x_factor(double x) const { return psi_kernel().eval((x - xc) / rx); }
double TestFunction::x_factor_antideriv(double x) const {
    return rx * psi_kernel().antideriv((x - xc) / rx);
}

int SolutionRecord::field_index(const std::string& name) const {
    const auto it = std::find(field_names.begin(), field_names.end(), name);
    return it == field_names.end() ? -1 : static_cast<int>(it - field_names.begin());
}

const std::vector<double>& SolutionRecord::field(std::size_t snap, const std::string& name) const {
    const int k = field_index(name);
    if (k < 0) throw std::out_of_range("record has no field '" + name + "'");
    return snaps.at(snap).fields.at(k);
}

std::size_t SolutionRecord::snapshot_near(double t) const {
    if (snaps.empty()) throw std::out_of_range("record has no snapshots");
    std::size_t best = 0;
    for (std::size_t i = 1; i < snaps.size(); ++i)
        if (std::abs(snaps[i].t - t) < std::abs(snaps[best].t - t)) best = i;
    return best;
}

std::vector<double> SolutionRecord::times() const {
    std::vector<double> t;
    for (const auto& s : snaps) t.push_back(s.t);
    return t;
}

std::vector<double> SolutionFamily::eps_values() const {
    std::vector<double> e;
    for (const auto& r : records) e.push_back(r.eps);
    return e;
}

namespace {

std::string join(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

std::vector<double> split_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

std::vector<std::string> split_names(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

void put_le(std::ofstream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    os.write(reinterpret_cast<const char*>(&bits), sizeof bits);
}

double get_le(std::ifstream& is) {
    std::uint64_t bits = 0;
    is.read(reinterpret_cast<char*>(&bits), sizeof bits);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

}  // namespace

void write_family(const SolutionFamily& fam, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream man(dir / "manifest.txt");
    man.precision(17);
    man << "format=colwave-family-1\n";
    man << "scenario_id=" << fam.scenario_id << "\n";
    man << "solver_id=" << fam.solver_id << "\n";
    man << "byte_order=little\n";
    man << "dtype=float64\n";
    man << "layout=row-major time x space\n";
    man << "eps=" << join(fam.eps_values()) << "\n";
    man << "records=" << fam.records.size() << "\n";
    for (std::size_t r = 0; r < fam.records.size(); ++r) {
        const auto& rec = fam.records[r];
        const std::string p = "record." + std::to_string(r) + ".";
        man << p << "eps=" << rec.eps << "\n";
        man << p << "h=" << rec.h << "\n";
        man << p << "ell=" << rec.ell << "\n";
        man << p << "grid.x_min=" << rec.grid.x_min << "\n";
        man << p << "grid.x_max=" << rec.grid.x_max << "\n";
        man << p << "grid.nx=" << rec.grid.nx << "\n";
        man << p << "grid.t_end=" << rec.grid.t_end << "\n";
        man << p << "grid.cfl=" << rec.grid.cfl << "\n";
        man << p << "times=" << join(rec.times()) << "\n";
        man << p << "pairings=" << join(rec.pairings) << "\n";
        std::string names;
        for (std::size_t k = 0; k < rec.field_names.size(); ++k)
            names += (k ? "," : "") + rec.field_names[k];
        man << p << "fields=" << names << "\n";
        for (std::size_t k = 0; k < rec.field_names.size(); ++k) {
            const std::string file = "r" + std::to_string(r) + "_" + rec.field_names[k] + ".f64";
            man << p << "file." << rec.field_names[k] << "=" << file << "\n";
            std::ofstream bin(dir / file, std::ios::binary);
            for (const auto& s : rec.snaps)
                for (double v : s.fields[k]) put_le(bin, v);
        }
    }
}

SolutionFamily read_family(const std::filesystem::path& dir) {
    std::ifstream man(dir / "manifest.txt");
    if (!man) throw std::runtime_error("cannot open " + (dir / "manifest.txt").string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(man, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto get = [&](const std::string& k) {
        const auto it = kv.find(k);
        if (it == kv.end()) throw std::runtime_error("manifest missing key " + k);
        return it->second;
    };
    SolutionFamily fam;
    fam.scenario_id = get("scenario_id");
    fam.solver_id = get("solver_id");
    const int n = std::stoi(get("records"));
    for (int r = 0; r < n; ++r) {
        const std::string p = "record." + std::to_string(r) + ".";
        SolutionRecord rec;
        rec.eps = std::stod(get(p + "eps"));
        rec.h = std::stod(get(p + "h"));
        rec.ell = std::stod(get(p + "ell"));
        rec.grid.x_min = std::stod(get(p + "grid.x_min"));
        rec.grid.x_max = std::stod(get(p + "grid.x_max"));
        rec.grid.nx = std::stoi(get(p + "grid.nx"));
        rec.grid.t_end = std::stod(get(p + "grid.t_end"));
        rec.grid.cfl = std::stod(get(p + "grid.cfl"));
        rec.pairings = split_doubles(get(p + "pairings"));
        rec.field_names = split_names(get(p + "fields"));
        const auto times = split_doubles(get(p + "times"));
        rec.snaps.resize(times.size());
        for (std::size_t s = 0; s < times.size(); ++s) {
            rec.snaps[s].t = times[s];
            rec.snaps[s].fields.resize(rec.field_names.size());
        }
        for (std::size_t k = 0; k < rec.field_names.size(); ++k) {
            std::ifstream bin(dir / get(p + "file." + rec.field_names[k]), std::ios::binary);
            if (!bin) throw std::runtime_error("missing field file for " + rec.field_names[k]);
            for (auto& s : rec.snaps) {
                s.fields[k].resize(rec.grid.nodes());
                for (auto& v : s.fields[k]) v = get_le(bin);
            }
        }
        fam.records.push_back(std::move(rec));
    }
    return fam;
}

}  // namespace colwave
