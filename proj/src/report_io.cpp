#include "varipade/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "varipade/error.hpp"

namespace varipade {

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string gap_field(double loss, std::optional<double> j_exact) {
    return j_exact ? format_real(loss - *j_exact) : std::string();
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

double parse_double(const std::string& field, int line) {
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size())
        throw PreconditionError("line " + std::to_string(line) + ": '" + field + "' is not a number");
    return v;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                in_quotes = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c != '\r') {
            fields.back() += c;
        }
    }
    if (in_quotes) throw PreconditionError("unterminated quote in CSV line");
    return fields;
}

void write_loss_csv(std::ostream& out, const TrainReport& report, std::optional<double> j_exact) {
    out << "step,loss,j_gap\n";
    for (const auto& [step, loss] : report.loss_history)
        out << step << ',' << format_real(loss) << ',' << gap_field(loss, j_exact) << '\n';
}

void write_curves_csv(std::ostream& out, const std::vector<const MatrixRow*>& rows) {
    out << "structure,step,loss,j_gap\n";
    for (const MatrixRow* row : rows) {
        const std::string name = quoted(row->structure);
        for (const auto& [step, loss] : row->curve.loss_history)
            out << name << ',' << step << ',' << format_real(loss) << ',' << gap_field(loss, row->j_exact) << '\n';
    }
}

void write_table_csv(std::ostream& out, const std::vector<const MatrixRow*>& rows) {
    out << "structure,n_params,j_net,relative_error,j_exact,j_min,status,wall_time_ms\n";
    for (const MatrixRow* r : rows) {
        out << quoted(r->structure) << ',' << r->n_params << ',' << format_real(r->j_final) << ','
            << format_real(r->relative_error) << ',' << format_real(r->j_exact) << ',' << format_real(r->j_min)
            << ',' << to_string(r->status) << ',' << format_real(r->wall_time_ms) << '\n';
    }
}

std::vector<CurvePoint> read_curves_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw PreconditionError("curves file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "structure,step,loss,j_gap")
        throw PreconditionError("curves file must start with header 'structure,step,loss,j_gap'");

    std::vector<CurvePoint> points;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() != 4)
            throw PreconditionError("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                                    std::to_string(f.size()));
        CurvePoint p;
        p.structure = f[0];
        const double step = parse_double(f[1], line_no);
        if (step != std::trunc(step) || step < 0)
            throw PreconditionError("line " + std::to_string(line_no) + ": step must be a non-negative integer");
        p.step = static_cast<int>(step);
        p.loss = parse_double(f[2], line_no);
        if (!f[3].empty()) p.j_gap = parse_double(f[3], line_no);
        points.push_back(std::move(p));
    }
    if (points.empty()) throw PreconditionError("curves file has no data rows");
    return points;
}

std::string render_svg(const std::vector<CurvePoint>& points, const PlotOptions& options, std::ostream& warnings) {
    // Group by structure, keeping first-appearance order.
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    std::map<std::string, int> dropped;
    for (const auto& p : points) {
        if (!series.count(p.structure)) order.push_back(p.structure);
        auto& s = series[p.structure];
        double v = p.loss;
        if (options.plot_gap) {
            if (!p.j_gap) {
                ++dropped[p.structure];
                continue;
            }
            v = *p.j_gap;
        }
        if (options.log_y) {
            if (!(v > 0.0)) {
                ++dropped[p.structure];
                continue;
            }
            v = std::log10(v);
        }
        if (!std::isfinite(v)) {
            ++dropped[p.structure];
            continue;
        }
        s.emplace_back(static_cast<double>(p.step), v);
    }
    for (const auto& name : order) {
        if (dropped[name] > 0)
            warnings << "warning: dropped " << dropped[name] << " point(s) of " << name
                     << (options.log_y ? " that are not positive on a log axis" : " without a value") << '\n';
    }

    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& [name, s] : series) {
        for (const auto& [x, y] : s) {
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    if (!std::isfinite(x_lo)) x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    if (x_hi == x_lo) x_hi = x_lo + 1;
    if (y_hi == y_lo) y_lo -= 0.5, y_hi += 0.5;

    constexpr double width = 800, height = 500;
    constexpr double left = 80, right = 200, top = 40, bottom = 60;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
    auto py = [&](double y) { return top + (y_hi - y) / (y_hi - y_lo) * plot_h; };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << left + plot_w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"16\">" << xml_escape(options.title) << "</text>\n"
        << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    // Ticks: five per axis.
    for (int i = 0; i <= 4; ++i) {
        const double xv = x_lo + (x_hi - x_lo) * i / 4.0;
        const double yv = y_lo + (y_hi - y_lo) * i / 4.0;
        svg << "<text x=\"" << px(xv) << "\" y=\"" << top + plot_h + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << format_real(std::round(xv))
            << "</text>\n";
        char label[32];
        if (options.log_y) std::snprintf(label, sizeof label, "1e%.2g", yv);
        else std::snprintf(label, sizeof label, "%.4g", yv);
        svg << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << label << "</text>\n";
    }
    svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">step</text>\n"
        << "<text x=\"18\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"13\" transform=\"rotate(-90 18 " << top + plot_h / 2 << ")\">"
        << (options.plot_gap ? "loss - J_exact" : "loss") << (options.log_y ? " (log10)" : "") << "</text>\n";

    std::size_t color = 0;
    for (const auto& name : order) {
        const auto& s = series[name];
        const char* stroke = palette[color % std::size(palette)];
        const double legend_y = top + 16 + 18.0 * static_cast<double>(color);
        ++color;
        if (s.empty()) continue;
        svg << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) svg << ' ';
            svg << px(s[i].first) << ',' << py(s[i].second);
        }
        svg << "\"/>\n";
        svg << "<line x1=\"" << width - right + 12 << "\" y1=\"" << legend_y - 4 << "\" x2=\"" << width - right + 36
            << "\" y2=\"" << legend_y - 4 << "\" stroke=\"" << stroke << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << width - right + 42 << "\" y=\"" << legend_y
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(name) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace varipade
