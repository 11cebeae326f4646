// Diagnostic time series and solver log, with their on-disk CSV formats.
// The column set and order are part of the output contract; values are
// written with shortest round-trip formatting.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace nsv {

namespace col {
enum : int {
    t = 0,
    E,
    Dfun,
    Ecal,
    sup_nf,
    sup_jf,
    sup_ef,
    R_supp,
    w1_sur,
    gradu_l2,
    gradu_linf,
    u_linf,
    div_linf,
    rho_l32,
    gradrho_l2,
    mass_f,
    mom_x1,
    mom_x2,
    mom_x3,
    B1,
    B2,
    B3,
    count
};
}  // namespace col

struct SeriesTable {
    using Row = std::array<double, col::count>;
    std::vector<Row> rows;

    static const char* header();  // "t,E,D,Ecal,..."
    void append(const Row& r) { rows.push_back(r); }
    std::size_t size() const { return rows.size(); }

    std::vector<double> column(int c) const {
        std::vector<double> v(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) v[i] = rows[i][static_cast<std::size_t>(c)];
        return v;
    }

    std::string to_csv() const;
};

// Column index for a header name as written to disk ("D" maps to Dfun);
// -1 when unknown.
int series_column_index(const std::string& name);

// Header name for a column index.
const char* series_column_name(int c);

struct SolverLogRow {
    std::int64_t step = 0;
    int iters = 0;
    double residual = 0.0;
};

std::string solver_log_to_csv(const std::vector<SolverLogRow>& rows);

}  // namespace nsv
