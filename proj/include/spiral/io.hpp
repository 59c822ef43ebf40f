#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "spiral/core.hpp"

namespace spiral {

// ---------------------------------------------------------------------------
// Flat key=value configuration text
// ---------------------------------------------------------------------------

using KeyValues = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace detail

inline const std::string* find_key(const KeyValues& kv, const std::string& key) {
    for (const auto& [k, v] : kv)
        if (k == key) return &v;
    return nullptr;
}

// Parses "key = value" lines. Blank lines and lines starting with '#' are
// skipped; a line without '=', an empty key, or a repeated key is an error.
inline KeyValues parse_key_values(const std::string& text) {
    KeyValues out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = detail::trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + " has no '=': " + stripped);
        const std::string key = detail::trim(stripped.substr(0, eq));
        const std::string value = detail::trim(stripped.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + " has an empty key");
        if (find_key(out, key))
            throw ConfigError("config repeats key '" + key + "'");
        out.emplace_back(key, value);
    }
    return out;
}

inline KeyValues load_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_key_values(buf.str());
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size())
            throw ConfigError("key '" + key + "' has a malformed number: " + value);
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "' has a malformed number: " + value);
    }
}

inline long long parse_integer(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size())
            throw ConfigError("key '" + key + "' has a malformed integer: " + value);
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "' has a malformed integer: " + value);
    }
}

// ---------------------------------------------------------------------------
// Deterministic number formatting
// ---------------------------------------------------------------------------

// Shortest round-trip-exact decimal form: parsing the result recovers the
// identical double.
inline std::string fmt_full(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    return buf;
}

inline std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Provenance header and CSV
// ---------------------------------------------------------------------------

inline constexpr const char* kToolName = "spiral-tools";
inline constexpr const char* kToolVersion = "1.0.0";

struct Provenance {
    std::string command;
    KeyValues config;      // fully resolved settings, in resolution order
    std::uint64_t seed = 0;
};

// Every file the tools emit opens with this comment block, so a result can
// be reproduced from the file alone.
inline void write_provenance(std::ostream& out, const Provenance& prov,
                             const std::string& comment = "#") {
    out << comment << " " << kToolName << " " << kToolVersion << " " << prov.command << "\n";
    for (const auto& [k, v] : prov.config) out << comment << " config " << k << "=" << v << "\n";
    out << comment << " seed " << prov.seed << "\n";
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ",";
        out << fields[i];
    }
    out << "\n";
}

inline void write_csv(std::ostream& out, const Provenance& prov,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
    write_provenance(out, prov);
    write_csv_row(out, header);
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw PreconditionError("csv row width differs from header width");
        write_csv_row(out, row);
    }
}

// ---------------------------------------------------------------------------
// Minimal SVG plots
// ---------------------------------------------------------------------------

struct PlotLimits {
    double x_lo = 0.0, x_hi = 1.0;
    double y_lo = 0.0, y_hi = 1.0;
};

// Fixed-viewport line-and-scatter plot. Data coordinates map linearly onto
// the inner frame; nothing else of SVG is used.
class SvgPlot {
public:
    SvgPlot(PlotLimits limits, std::string title, std::string x_label, std::string y_label)
        : limits_(limits),
          title_(std::move(title)),
          x_label_(std::move(x_label)),
          y_label_(std::move(y_label)) {
        if (!(limits_.x_hi > limits_.x_lo) || !(limits_.y_hi > limits_.y_lo))
            throw PreconditionError("plot limits must have positive extent");
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                  double width = 1.0) {
        if (pts.size() < 2) return;
        std::ostringstream s;
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << fmt_short(width)
          << "\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) s << " ";
            s << px(pts[i].first) << "," << py(pts[i].second);
        }
        s << "\"/>\n";
        body_ += s.str();
    }

    void scatter(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                 double radius = 1.2) {
        std::ostringstream s;
        for (const auto& [x, y] : pts)
            s << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"" << fmt_short(radius)
              << "\" fill=\"" << color << "\"/>\n";
        body_ += s.str();
    }

    void render(std::ostream& out, const Provenance& prov) const {
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        out << "<!--\n";
        write_provenance(out, prov, " ");
        out << "-->\n";
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 " << kW
            << " " << kH << "\">\n";
        out << "<rect x=\"0\" y=\"0\" width=\"" << kW << "\" height=\"" << kH
            << "\" fill=\"white\"/>\n";
        out << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR
            << "\" height=\"" << kH - kT - kB
            << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << kW / 2 << "\" y=\"" << kT - 12
            << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"16\">" << title_
            << "</text>\n";
        out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 10
            << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\">" << x_label_
            << "</text>\n";
        out << "<text x=\"16\" y=\"" << kH / 2
            << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\" "
               "transform=\"rotate(-90 16 "
            << kH / 2 << ")\">" << y_label_ << "</text>\n";
        for (int i = 0; i <= kTicks; ++i) {
            const double fx = limits_.x_lo + (limits_.x_hi - limits_.x_lo) * i / kTicks;
            const double fy = limits_.y_lo + (limits_.y_hi - limits_.y_lo) * i / kTicks;
            const std::string gx = px(fx), gy = py(fy);
            out << "<line x1=\"" << gx << "\" y1=\"" << kH - kB << "\" x2=\"" << gx << "\" y2=\""
                << kH - kB + 5 << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << gx << "\" y=\"" << kH - kB + 20
                << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">"
                << fmt_short(fx) << "</text>\n";
            out << "<line x1=\"" << kL - 5 << "\" y1=\"" << gy << "\" x2=\"" << kL << "\" y2=\""
                << gy << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << kL - 8 << "\" y=\"" << gy
                << "\" text-anchor=\"end\" dominant-baseline=\"middle\" "
                   "font-family=\"monospace\" font-size=\"11\">"
                << fmt_short(fy) << "</text>\n";
        }
        out << body_;
        out << "</svg>\n";
    }

private:
    static constexpr int kW = 800, kH = 600;
    static constexpr int kL = 70, kR = 25, kT = 45, kB = 55;
    static constexpr int kTicks = 5;

    std::string px(double x) const {
        const double t = (x - limits_.x_lo) / (limits_.x_hi - limits_.x_lo);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", kL + t * (kW - kL - kR));
        return buf;
    }

    std::string py(double y) const {
        const double t = (y - limits_.y_lo) / (limits_.y_hi - limits_.y_lo);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", kH - kB - t * (kH - kT - kB));
        return buf;
    }

    PlotLimits limits_;
    std::string title_, x_label_, y_label_;
    std::string body_;
};

}  // namespace spiral
