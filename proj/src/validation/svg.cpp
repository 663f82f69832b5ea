#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>

#include "fps/validation.hpp"

namespace fps::validation {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 55.0;

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // widen by 5% of the span on both sides
  void pad() {
    double span = hi - lo;
    if (!(span > 0.0)) span = std::max(1.0, std::abs(lo));
    lo -= 0.05 * span;
    hi += 0.05 * span;
  }
};

}  // namespace

void emit_overlay_svg(const std::vector<FDCurve>& curves, std::ostream& out) {
  if (curves.empty()) throw DomainError("emit_overlay_svg: no curves");
  Range xr, yr;
  for (const auto& c : curves) {
    for (const auto& s : c.samples) {
      xr.add(s.displacement);
      yr.add(s.force);
    }
  }
  if (!std::isfinite(xr.lo)) throw DomainError("emit_overlay_svg: curves have no samples");
  xr.pad();
  yr.pad();

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 5; ++k) {
    const double xv = xr.lo + (xr.hi - xr.lo) * k / 5.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * k / 5.0;
    out << "<line x1=\"" << num(px(xv)) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(px(xv))
        << "\" y2=\"" << num(kTop + ph + 5) << "\" stroke=\"black\"/>"
        << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(kTop + ph + 18)
        << "\" text-anchor=\"middle\">" << num(xv) << "</text>\n";
    out << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(py(yv)) << "\" x2=\"" << num(kLeft)
        << "\" y2=\"" << num(py(yv)) << "\" stroke=\"black\"/>"
        << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">"
        << num(yv) << "</text>\n";
  }
  out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12)
      << "\" text-anchor=\"middle\">Tip displacement (mm)</text>\n"
      << "<text x=\"16\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num(kTop + ph / 2) << ")\">Force (N)</text>\n";

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* colour = kPalette[c % kPalette.size()];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < curves[c].samples.size(); ++k) {
      const auto& s = curves[c].samples[k];
      out << (k ? " " : "") << num(px(s.displacement)) << ',' << num(py(s.force));
    }
    out << "\"/>\n";
  }

  out << "<g class=\"legend\">\n";
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const double y = kTop + 16 + 16 * static_cast<double>(c);
    const char* colour = kPalette[c % kPalette.size()];
    out << "<line x1=\"" << num(kLeft + 10) << "\" y1=\"" << num(y - 4) << "\" x2=\"" << num(kLeft + 30)
        << "\" y2=\"" << num(y - 4) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>"
        << "<text x=\"" << num(kLeft + 36) << "\" y=\"" << num(y) << "\">"
        << escape(curves[c].label.empty() ? "curve " + std::to_string(c + 1) : curves[c].label)
        << "</text>\n";
  }
  out << "</g>\n</svg>\n";
}

void emit_overlay_svg(const std::vector<FDCurve>& curves, const std::filesystem::path& path) {
  if (curves.empty()) throw DomainError("emit_overlay_svg: no curves");
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write figure", path.string());
  emit_overlay_svg(curves, file);
  if (!file.flush()) throw IoError("write failed", path.string());
}

}  // namespace fps::validation
