#pragma once

// CSV and SVG artifacts.
//
//   loss.csv     step,loss,j_gap
//   curvesN.csv  structure,step,loss,j_gap
//   tableN.csv   structure,n_params,j_net,relative_error,j_exact,j_min,status,wall_time_ms
//
// j_gap = loss - j_exact, left empty when no exact value is known. Reals are
// written with 17 significant digits so identical runs give identical bytes.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "varipade/benchmarks.hpp"

namespace varipade {

std::string format_real(double v);

void write_loss_csv(std::ostream& out, const TrainReport& report, std::optional<double> j_exact);

void write_curves_csv(std::ostream& out, const std::vector<const MatrixRow*>& rows);

void write_table_csv(std::ostream& out, const std::vector<const MatrixRow*>& rows);

/// One parsed line of a curves file.
struct CurvePoint {
    std::string structure;
    int step = 0;
    double loss = 0.0;
    std::optional<double> j_gap;
};

/// Parses a curves CSV. Throws PreconditionError on a wrong header,
/// malformed rows, or an empty body.
std::vector<CurvePoint> read_curves_csv(std::istream& in);

struct PlotOptions {
    bool log_y = false;
    bool plot_gap = false;  // plot j_gap instead of loss
    std::string title = "loss versus step";
};

/// Standalone SVG with one polyline per structure (first-appearance order).
/// With log_y, non-positive values are dropped and one warning per structure
/// goes to `warnings`.
std::string render_svg(const std::vector<CurvePoint>& points, const PlotOptions& options, std::ostream& warnings);

/// Splits one CSV record, honoring double quotes.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace varipade
