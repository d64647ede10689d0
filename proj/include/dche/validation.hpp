#pragma once

#include <map>
#include <string>
#include <vector>

#include "dche/params.hpp"
#include "dche/types.hpp"

namespace dche::validation {

/// Closed-form solution z^(3/5) exp(-1/z - z/2) of the quasi-exactly-solvable
/// family at its bound state. Requires z > 0.
complex qes_exact_value(double z);

/// Laurent coefficients c-hat_n of the closed-form solution written as
/// sum_n c-hat_n z^(n+3/5); convergent double sums, summed until the terms
/// drop below 1e-18.
double qes_exact_coefficient(long n);

/// The exact connection factor -[sum_m 2^-m / (m! (m+1)!)]^-1.
double qes_exact_connection();

/// Parameter set of the quasi-exactly-solvable potential with free A_2.
DcheParams qes_params(const complex& a2);

struct OracleValue {
    complex y, dy, d2y;
};

/// Taylor solution of the Jaffe-Lay equation with y(0) = 1, y'(0) = 0,
/// evaluated inside the unit disc (|t| <= 0.6). Adaptive order up to 400;
/// throws SeriesNotConverged past the cap.
OracleValue jaffe_lay_series_eval(const JaffeLayParams& j, double t);
complex jaffe_lay_series_oracle(const JaffeLayParams& j, double t);

/// One reference table transcribed into data. Entries are
/// key -> ([re, im], flag) where the flag is "tol" (table tolerance),
/// "exact"/"re_exact"/"im_exact" (component known to be exactly zero),
/// "abs:<x>" or "rel:<x>" (per-entry override).
struct FixtureEntry {
    complex value;
    std::string flag;
};

struct FixtureRow {
    std::string id;
    bool has_a2 = false;
    double a2 = 0.0;
    bool has_jaffe_lay = false;
    std::array<double, 4> jaffe_lay{};
    std::map<std::string, FixtureEntry> entries;
};

struct ReferenceFixture {
    std::string table;
    double tolerance = 0.0;
    double zero_tolerance = 1e-10;
    bool has_base = false;
    std::array<double, 4> base_a{}; // A_-2 .. A_1 shared by the rows
    std::vector<FixtureRow> rows;
};

/// Where the table files live: explicit argument, else $DCHE_DATA_DIR, else
/// the build-time default.
std::string default_data_dir();
ReferenceFixture load_fixture(const std::string& table_id, const std::string& data_dir = "");

struct ReportEntry {
    std::string table, row, key;
    complex expected, computed;
    double deviation = 0.0;
    double tol = 0.0;
    bool pass = false;
};

struct Report {
    std::vector<ReportEntry> entries;

    bool all_pass() const;
    std::size_t failures() const;
    std::string text() const;
    std::string to_json() const;
};

/// Runs the full pipeline for every row of the requested tables and compares
/// against the fixtures. Valid ids: T2, T3, T4, T5, T6.
Report reproduce_tables(const std::vector<std::string>& tables, const Tolerances& tol,
                        const std::string& data_dir = "");

} // namespace dche::validation
