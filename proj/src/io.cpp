#include "entlab/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace entlab {
namespace io {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << std::setprecision(17);
    return out;
}

}  // namespace

void write_measure_csv(const GridMeasure& g, const std::string& path) {
    auto out = open_out(path);
    const int d = g.dimension();
    out << "# box_lo=";
    for (int a = 0; a < d; ++a) out << (a ? "," : "") << g.lo()[a];
    out << " box_hi=";
    for (int a = 0; a < d; ++a) out << (a ? "," : "") << g.hi()[a];
    out << " resolution=";
    for (int a = 0; a < d; ++a) out << (a ? "," : "") << g.resolution()[a];
    out << " leak=" << g.leak() << "\n";
    for (int a = 0; a < d; ++a) out << "center" << a << ",";
    out << "mass\n";
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
        const auto c = g.cell_center(i);
        for (int a = 0; a < d; ++a) out << c[a] << ",";
        out << g.masses()[i] << "\n";
    }
}

void write_ensemble_csv(const Ensemble& e, const std::string& path) {
    auto out = open_out(path);
    out << "path_index";
    for (std::size_t a = 0; a < e.samples[0].size(); ++a) out << ",x" << a;
    out << "\n";
    for (std::size_t i = 0; i < e.samples.size(); ++i) {
        out << i;
        for (double v : e.samples[i]) out << "," << v;
        out << "\n";
    }
}

void write_trajectory_csv(const Trajectory& tr, const std::string& path) {
    auto out = open_out(path);
    out << "time";
    for (std::size_t a = 0; a < tr.states[0].size(); ++a) out << ",x" << a;
    out << "\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        out << tr.times[i];
        for (double v : tr.states[i]) out << "," << v;
        out << "\n";
    }
}

void write_curve_csv(const std::vector<std::pair<double, double>>& curve,
                     const std::string& path) {
    auto out = open_out(path);
    out << "dt,rho\n";
    for (const auto& [dt, rho] : curve) out << dt << "," << rho << "\n";
}

std::vector<ScheduleEntry> read_schedule_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open schedule: " + path);
    std::vector<ScheduleEntry> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (lineno == 1 && line.find("t_hi") != std::string::npos) continue;
        std::stringstream ss(line);
        ScheduleEntry e;
        char comma;
        if (!(ss >> e.t_hi >> comma >> e.t_lo >> comma >> e.gamma >> comma >>
              e.bigK >> comma >> e.eta))
            throw std::runtime_error("schedule parse error at line " +
                                     std::to_string(lineno) + " of " + path);
        out.push_back(e);
    }
    return out;
}

void write_schedule_csv(const std::vector<ScheduleEntry>& schedule,
                        const std::string& path) {
    auto out = open_out(path);
    out << "t_hi,t_lo,gamma,K,eta\n";
    for (const auto& e : schedule)
        out << e.t_hi << "," << e.t_lo << "," << e.gamma << "," << e.bigK << ","
            << e.eta << "\n";
}

std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key=value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": empty key");
        out[key] = val;
    }
    return out;
}

void Report::kv(const std::string& key, double value) {
    std::ostringstream ss;
    ss << std::setprecision(17) << key << " = " << value << "\n";
    body_ += ss.str();
}

void Report::kv(const std::string& key, const std::string& value) {
    body_ += key + " = " + value + "\n";
}

void Report::check(const std::string& name, bool pass, const std::string& detail) {
    body_ += std::string(pass ? "[PASS] " : "[FAIL] ") + name;
    if (!detail.empty()) body_ += " (" + detail + ")";
    body_ += "\n";
    if (!pass) ++failures_;
}

void Report::write(const std::string& path) const {
    auto out = open_out(path);
    out << body_;
}

}  // namespace io
}  // namespace entlab
