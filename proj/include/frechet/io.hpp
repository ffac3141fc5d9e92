#ifndef FRECHET_IO_HPP
#define FRECHET_IO_HPP

#include <cstdio>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "frechet/pmean.hpp"
#include "frechet/tailbone.hpp"

namespace frechet {

// 17 significant digits: enough to round-trip any double exactly
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string curve_csv(const PMeanCurve& curve) {
    std::string out = "p,nu_p,H_p,dnu_dp,method,residual\n";
    for (const auto& pt : curve.points) {
        out += fmt17(pt.p);
        out += ',';
        out += fmt17(pt.nu_p);
        out += ',';
        out += fmt17(pt.h_p);
        out += ',';
        out += pt.dnu_dp ? fmt17(*pt.dnu_dp) : std::string();
        out += ',';
        out += deriv_method_name(pt.method);
        out += ',';
        out += fmt17(pt.residual);
        out += '\n';
    }
    return out;
}

inline std::string trajectory_csv(const TailboneTrajectory& traj, std::size_t d) {
    std::string out = "p";
    for (std::size_t j = 1; j <= d; ++j) out += ",nu_" + std::to_string(j);
    out += ",objective,iterations,converged\n";
    for (const auto& e : traj.entries) {
        out += fmt17(e.p);
        for (double v : e.nu) {
            out += ',';
            out += fmt17(v);
        }
        out += ',';
        out += fmt17(e.objective);
        out += ',';
        out += std::to_string(e.iterations);
        out += ',';
        out += e.converged ? "true" : "false";
        out += '\n';
    }
    if (traj.zeta) {
        out += "# zeta:";
        for (double v : *traj.zeta) {
            out += ' ';
            out += fmt17(v);
        }
        out += '\n';
    } else {
        out += "# zeta: unstable\n";
    }
    return out;
}

// one point per row, comma separated; blank lines and # comments skipped
inline SampleSet read_samples_csv(std::istream& in) {
    std::vector<std::vector<double>> pts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                double v = std::stod(cell, &used);
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
                    ++used;
                if (used != cell.size()) throw std::invalid_argument(cell);
                row.push_back(v);
            } catch (const std::exception&) {
                throw InvalidParams("sample CSV: cannot parse value '" + cell + "'");
            }
        }
        if (!row.empty()) pts.push_back(std::move(row));
    }
    return make_sample_set(std::move(pts));
}

} // namespace frechet

#endif
