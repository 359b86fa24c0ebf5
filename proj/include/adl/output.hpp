#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "adl/limit_process.hpp"
#include "adl/meanfield.hpp"
#include "adl/ssa.hpp"

namespace adl {

enum class SeriesKind { beta_limit, beta_K, gamma_K, active, dormant };

std::string to_string(SeriesKind kind);
SeriesKind parse_series_kind(std::string_view text);
bool is_exponent(SeriesKind kind);

// One line of the trajectory CSV `t,m,n,kind,value`.
struct CsvRow {
    double t = 0.0;
    int m = 0;
    int n = 0;
    SeriesKind kind = SeriesKind::beta_limit;
    double value = 0.0;

    bool operator==(const CsvRow&) const = default;
};

// Shortest text that parses back to the same double.
std::string format_number(double value);
double parse_number(std::string_view text);

// Throws NumericalError on a non-finite value.
void write_csv(std::ostream& out, const std::vector<CsvRow>& rows);
std::vector<CsvRow> read_csv(std::istream& in);

std::vector<double> uniform_grid(double t0, double t1, int points);

// Limit exponents on a uniform grid over [0, end of trajectory].
std::vector<CsvRow> limit_rows(const LimitTrajectory& trajectory, int points);
// beta_K plus active and dormant counts at every stored sample; times in log K units.
std::vector<CsvRow> simulation_rows(const SimTrajectory& trajectory);
// gamma_K plus active and dormant densities at every stored sample; times in log K units.
std::vector<CsvRow> meanfield_rows(const MeanFieldPath& path);

// One chart per m, one polyline per n, for the rows of the given kind. The output depends
// only on the rows, so equal input gives byte-identical files.
std::string render_svg(const std::vector<CsvRow>& rows, SeriesKind kind, const std::string& title);

// Writes `content` to `path`; failures throw std::runtime_error carrying the OS message.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace adl
