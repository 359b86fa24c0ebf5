#include "adl/output.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "adl/errors.hpp"

namespace adl {

namespace {

constexpr const char* kHeader = "t,m,n,kind,value";
constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fixed(double value, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    return buf;
}

int parse_int(std::string_view text, std::size_t line) {
    int value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size()) {
        throw ConfigError("csv line " + std::to_string(line) + ": bad integer \"" +
                          std::string(text) + "\"");
    }
    return value;
}

}  // namespace

std::string to_string(SeriesKind kind) {
    switch (kind) {
        case SeriesKind::beta_limit: return "beta_limit";
        case SeriesKind::beta_K: return "beta_K";
        case SeriesKind::gamma_K: return "gamma_K";
        case SeriesKind::active: return "active";
        case SeriesKind::dormant: return "dormant";
    }
    return "unknown";
}

SeriesKind parse_series_kind(std::string_view text) {
    for (SeriesKind kind : {SeriesKind::beta_limit, SeriesKind::beta_K, SeriesKind::gamma_K,
                            SeriesKind::active, SeriesKind::dormant}) {
        if (text == to_string(kind)) return kind;
    }
    throw ConfigError("csv: unknown kind \"" + std::string(text) + "\"");
}

bool is_exponent(SeriesKind kind) {
    return kind == SeriesKind::beta_limit || kind == SeriesKind::beta_K ||
           kind == SeriesKind::gamma_K;
}

std::string format_number(double value) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw NumericalError("format_number: conversion failed");
    return std::string(buf, end);
}

double parse_number(std::string_view text) {
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size()) {
        throw ConfigError("bad number \"" + std::string(text) + "\"");
    }
    return value;
}

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
    out << kHeader << '\n';
    for (const CsvRow& row : rows) {
        if (!std::isfinite(row.t) || !std::isfinite(row.value)) {
            throw NumericalError("csv: non-finite value for trait (" + std::to_string(row.m) + "," +
                                 std::to_string(row.n) + ")");
        }
        out << format_number(row.t) << ',' << row.m << ',' << row.n << ',' << to_string(row.kind)
            << ',' << format_number(row.value) << '\n';
    }
}

std::vector<CsvRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kHeader) throw ConfigError("csv: missing header");
    std::vector<CsvRow> rows;
    std::size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
            fields.push_back(rest.substr(0, pos));
            rest.remove_prefix(pos + 1);
        }
        fields.push_back(rest);
        if (fields.size() != 5) {
            throw ConfigError("csv line " + std::to_string(number) + ": expected 5 fields");
        }
        rows.push_back({parse_number(fields[0]), parse_int(fields[1], number),
                        parse_int(fields[2], number), parse_series_kind(fields[3]),
                        parse_number(fields[4])});
    }
    return rows;
}

std::vector<double> uniform_grid(double t0, double t1, int points) {
    if (points < 2) throw ConfigError("points: must be >= 2");
    std::vector<double> grid(points);
    for (int j = 0; j < points; ++j) grid[j] = t0 + (t1 - t0) * j / (points - 1);
    grid.back() = t1;
    return grid;
}

std::vector<CsvRow> limit_rows(const LimitTrajectory& trajectory, int points) {
    const TraitGrid grid(trajectory.params);
    std::vector<CsvRow> rows;
    rows.reserve(static_cast<std::size_t>(points) * grid.size());
    for (double t : uniform_grid(0.0, trajectory.end_time(), points)) {
        for (int i = 0; i < grid.size(); ++i) {
            const TraitIndex trait = grid.trait(i);
            rows.push_back({t, trait.m, trait.n, SeriesKind::beta_limit, trajectory.betas[i](t)});
        }
    }
    return rows;
}

std::vector<CsvRow> simulation_rows(const SimTrajectory& trajectory) {
    const TraitGrid grid(trajectory.params);
    const auto betas = exponents(trajectory);
    const auto times = trajectory.times_logK();
    std::vector<CsvRow> rows;
    for (std::size_t j = 0; j < times.size(); ++j) {
        for (int i = 0; i < grid.size(); ++i) {
            const TraitIndex trait = grid.trait(i);
            rows.push_back({times[j], trait.m, trait.n, SeriesKind::beta_K, betas[i][j]});
            rows.push_back({times[j], trait.m, trait.n, SeriesKind::active,
                            static_cast<double>(trajectory.active[j][i])});
            rows.push_back({times[j], trait.m, trait.n, SeriesKind::dormant,
                            static_cast<double>(trajectory.dormant[j][i])});
        }
    }
    return rows;
}

std::vector<CsvRow> meanfield_rows(const MeanFieldPath& path) {
    const TraitGrid grid(path.params);
    const auto gammas = path.exponents();
    const auto times = path.times_logK();
    std::vector<CsvRow> rows;
    for (std::size_t j = 0; j < times.size(); ++j) {
        for (int i = 0; i < grid.size(); ++i) {
            const TraitIndex trait = grid.trait(i);
            rows.push_back({times[j], trait.m, trait.n, SeriesKind::gamma_K, gammas[i][j]});
            rows.push_back({times[j], trait.m, trait.n, SeriesKind::active, path.states[j].active[i]});
            rows.push_back({times[j], trait.m, trait.n, SeriesKind::dormant, path.states[j].dormant[i]});
        }
    }
    return rows;
}

std::string render_svg(const std::vector<CsvRow>& rows, SeriesKind kind, const std::string& title) {
    // series[m][n] -> points in input order
    std::map<int, std::map<int, std::vector<std::pair<double, double>>>> series;
    double t_max = 0.0, v_max = is_exponent(kind) ? 1.0 : 0.0;
    for (const CsvRow& row : rows) {
        if (row.kind != kind) continue;
        series[row.m][row.n].emplace_back(row.t, row.value);
        t_max = std::max(t_max, row.t);
        v_max = std::max(v_max, row.value);
    }
    if (t_max <= 0.0) t_max = 1.0;
    if (v_max <= 0.0) v_max = 1.0;

    const double width = 640, chart_h = 200, left = 60, right = 120, top = 40, gap = 50;
    const double plot_w = width - left - right;
    const double height = top + series.size() * (chart_h + gap) + 10;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width, 0) << "\" height=\""
        << fixed(height, 0) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << fixed(width / 2, 0) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << title << "</text>\n";

    double y0 = top;
    for (const auto& [m, by_n] : series) {
        const auto px = [&](double t) { return left + plot_w * t / t_max; };
        const auto py = [&](double v) { return y0 + chart_h * (1.0 - v / v_max); };
        svg << "<g>\n";
        svg << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(y0) << "\" width=\"" << fixed(plot_w)
            << "\" height=\"" << fixed(chart_h) << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int k = 0; k <= 4; ++k) {
            const double t = t_max * k / 4.0, v = v_max * k / 4.0;
            svg << "<text x=\"" << fixed(px(t)) << "\" y=\"" << fixed(y0 + chart_h + 15)
                << "\" text-anchor=\"middle\">" << fixed(t, 1) << "</text>\n";
            svg << "<text x=\"" << fixed(left - 5) << "\" y=\"" << fixed(py(v) + 4)
                << "\" text-anchor=\"end\">" << fixed(v, 2) << "</text>\n";
        }
        svg << "<text x=\"" << fixed(left + plot_w / 2) << "\" y=\"" << fixed(y0 + chart_h + 32)
            << "\" text-anchor=\"middle\">t (log K units)</text>\n";
        svg << "<text x=\"15\" y=\"" << fixed(y0 + chart_h / 2) << "\" transform=\"rotate(-90 15 "
            << fixed(y0 + chart_h / 2) << ")\" text-anchor=\"middle\">" << to_string(kind) << " m=" << m
            << "</text>\n";
        int legend = 0;
        for (const auto& [n, points] : by_n) {
            const char* colour = kPalette[n % std::size(kPalette)];
            svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t j = 0; j < points.size(); ++j) {
                if (j) svg << ' ';
                svg << fixed(px(points[j].first)) << ',' << fixed(py(points[j].second));
            }
            svg << "\"/>\n";
            const double ly = y0 + 15 + 18 * legend++;
            svg << "<line x1=\"" << fixed(left + plot_w + 10) << "\" y1=\"" << fixed(ly) << "\" x2=\""
                << fixed(left + plot_w + 30) << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << colour
                << "\" stroke-width=\"2\"/>\n";
            svg << "<text x=\"" << fixed(left + plot_w + 35) << "\" y=\"" << fixed(ly + 4) << "\">n="
                << n << "</text>\n";
        }
        svg << "</g>\n";
        y0 += chart_h + gap;
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": " + std::strerror(errno));
    out << content;
    out.close();
    if (!out) throw std::runtime_error(path.string() + ": " + std::strerror(errno));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path.string() + ": " + std::strerror(errno));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace adl
