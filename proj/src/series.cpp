#include "nsv/series.hpp"

#include "nsv/io_util.hpp"

namespace nsv {

namespace {
const char* kHeader =
    "t,E,D,Ecal,sup_nf,sup_jf,sup_ef,R_supp,w1_sur,gradu_l2,gradu_linf,u_linf,div_linf,rho_l32,gradrho_l2,mass_f,"
    "mom_x1,mom_x2,mom_x3,B1,B2,B3";

const char* kNames[col::count] = {"t",        "E",       "D",        "Ecal",       "sup_nf", "sup_jf", "sup_ef",
                                  "R_supp",   "w1_sur",  "gradu_l2", "gradu_linf", "u_linf", "div_linf", "rho_l32",
                                  "gradrho_l2", "mass_f", "mom_x1",   "mom_x2",     "mom_x3", "B1",     "B2",
                                  "B3"};
}  // namespace

const char* SeriesTable::header() { return kHeader; }

int series_column_index(const std::string& name) {
    for (int i = 0; i < col::count; ++i)
        if (name == kNames[i]) return i;
    return -1;
}

const char* series_column_name(int c) { return (c >= 0 && c < col::count) ? kNames[c] : "?"; }

std::string SeriesTable::to_csv() const {
    std::string out(kHeader);
    out += '\n';
    for (const Row& r : rows) {
        for (int c = 0; c < col::count; ++c) {
            if (c) out += ',';
            out += format_double(r[static_cast<std::size_t>(c)]);
        }
        out += '\n';
    }
    return out;
}

std::string solver_log_to_csv(const std::vector<SolverLogRow>& rows) {
    std::string out = "step,iters,residual\n";
    for (const SolverLogRow& r : rows) {
        out += std::to_string(r.step);
        out += ',';
        out += std::to_string(r.iters);
        out += ',';
        out += format_double(r.residual);
        out += '\n';
    }
    return out;
}

}  // namespace nsv
