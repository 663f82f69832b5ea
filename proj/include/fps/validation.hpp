#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fps/curve.hpp"
#include "fps/errors.hpp"

namespace fps::validation {

// --- curve I/O ---------------------------------------------------------------

/// Reads `displacement_mm,force_n` CSV (LF or CRLF). Malformed rows raise
/// ParseError with the 1-based line; ordering problems raise IntegrityError.
FDCurve load_curve_csv(std::istream& in, const std::string& label = {});
FDCurve load_curve_csv(const std::filesystem::path& path);

/// Writes the same format with 17 significant digits, LF line endings.
void write_curve_csv(const FDCurve& curve, std::ostream& out);
void write_curve_csv(const FDCurve& curve, const std::filesystem::path& path);

// --- experiment pipeline -----------------------------------------------------

/// Subtracts the first force from every sample (force-gauge zeroing).
FDCurve zero_offset(const FDCurve& curve);

/// Pointwise mean of runs on an identical displacement grid.
FDCurve average_runs(const std::vector<FDCurve>& runs);

/// Piecewise-linear interpolation onto `grid`; RangeError outside the data.
FDCurve resample(const FDCurve& curve, const std::vector<double>& grid);

// --- metrics -----------------------------------------------------------------

/// One comparison row. Differences are absolute, std uses the n-1 divisor.
struct MetricsReport {
  double mae = 0.0;
  double rmse = 0.0;
  double max_diff = 0.0;
  double min_diff = 0.0;
  double std_diff = 0.0;
  std::size_t n = 0;
  std::string label;
};

/// Compares two curves on the same grid, skipping the displacement-0 sample.
/// Throws GridError on mismatched grids and DomainError when fewer than two
/// samples remain.
MetricsReport compute_metrics(const FDCurve& fe, const FDCurve& exp, const std::string& label = {});

/// Fixed-column table, one row per report in input order.
std::string render_report(const std::vector<MetricsReport>& reports);

// --- figures -----------------------------------------------------------------

void emit_overlay_svg(const std::vector<FDCurve>& curves, std::ostream& out);
void emit_overlay_svg(const std::vector<FDCurve>& curves, const std::filesystem::path& path);

}  // namespace fps::validation
