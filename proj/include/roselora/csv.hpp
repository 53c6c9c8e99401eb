#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "roselora/sparsity_analysis.hpp"
#include "roselora/trainer.hpp"

namespace roselora {

// Shortest representation that round-trips the double exactly, so repeated
// runs produce byte-identical files.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double parsed = 0.0;
    std::sscanf(buf, "%lf", &parsed);
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[32];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        std::sscanf(shorter, "%lf", &parsed);
        if (parsed == v) {
            return std::string(shorter);
        }
    }
    return std::string(buf);
}

inline std::string step_reports_csv(const std::vector<StepReport>& reports) {
    std::ostringstream os;
    os << "step,loss,keep_fraction,delta_sparsity,a_frob_sq,b_frob_sq\n";
    for (const auto& r : reports) {
        os << r.step << ',' << format_double(r.loss) << ',' << format_double(r.keep_fraction)
           << ',' << format_double(r.delta_sparsity) << ',' << format_double(r.a_frob_sq)
           << ',' << format_double(r.b_frob_sq) << '\n';
    }
    return os.str();
}

inline std::string bound_sweep_csv(const std::vector<BoundSweepRow>& rows) {
    std::ostringstream os;
    os << "row_sparsity,col_sparsity,rank,trials,empirical_mean,bound\n";
    for (const auto& r : rows) {
        os << format_double(r.row_sparsity) << ',' << format_double(r.col_sparsity) << ','
           << r.rank << ',' << r.trials << ',' << format_double(r.empirical_product_sparsity)
           << ',' << format_double(r.theoretical_bound) << '\n';
    }
    return os.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    os << content;
}

} // namespace roselora
