#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "fps/validation.hpp"

namespace fps::validation {

namespace {

constexpr const char* kHeader = "displacement_mm,force_n";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_field(std::string_view field, std::size_t line, const char* name) {
  field = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(std::string("malformed ") + name + " '" + std::string(field) + "'", line);
  }
  return v;
}

}  // namespace

std::vector<double> FDCurve::displacements() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.displacement);
  return out;
}

std::vector<double> FDCurve::forces() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.force);
  return out;
}

void check_curve(const FDCurve& curve) {
  for (std::size_t k = 0; k < curve.samples.size(); ++k) {
    const auto& s = curve.samples[k];
    if (!std::isfinite(s.displacement) || !std::isfinite(s.force)) {
      throw IntegrityError("curve '" + curve.label + "': non-finite sample " + std::to_string(k));
    }
    if (k == 0 && s.displacement < 0.0) {
      throw IntegrityError("curve '" + curve.label + "': first displacement is negative");
    }
    if (k > 0 && !(s.displacement > curve.samples[k - 1].displacement)) {
      throw IntegrityError("curve '" + curve.label + "': displacement not increasing at sample " +
                           std::to_string(k));
    }
  }
}

FDCurve load_curve_csv(std::istream& in, const std::string& label) {
  FDCurve curve;
  curve.label = label;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (!header) {
      if (line_no == 1 && view.size() >= 3 && static_cast<unsigned char>(view[0]) == 0xEF) {
        view.remove_prefix(3);  // UTF-8 byte order mark
      }
      if (view != kHeader) throw ParseError(std::string("expected header '") + kHeader + "'", line_no);
      header = true;
      continue;
    }
    if (view.empty()) continue;
    const auto comma = view.find(',');
    if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos) {
      throw ParseError("expected two comma-separated fields", line_no);
    }
    const Sample s{parse_field(view.substr(0, comma), line_no, "displacement"),
                   parse_field(view.substr(comma + 1), line_no, "force")};
    if (!std::isfinite(s.displacement) || !std::isfinite(s.force)) {
      throw ParseError("non-finite value", line_no);
    }
    if (!curve.samples.empty() && !(s.displacement > curve.samples.back().displacement)) {
      throw IntegrityError("curve '" + label + "': displacement not increasing at line " +
                           std::to_string(line_no));
    }
    if (curve.samples.empty() && s.displacement < 0.0) {
      throw IntegrityError("curve '" + label + "': negative displacement at line " + std::to_string(line_no));
    }
    curve.samples.push_back(s);
  }
  if (!header) throw ParseError("missing header", 1);
  if (curve.samples.empty()) throw IntegrityError("curve '" + label + "': no samples");
  return curve;
}

FDCurve load_curve_csv(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open curve", path.string());
  try {
    return load_curve_csv(file, path.stem().string());
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), e.line(), path.string());
  } catch (const IntegrityError& e) {
    throw IntegrityError(path.string() + ": " + e.what());
  }
}

void write_curve_csv(const FDCurve& curve, std::ostream& out) {
  out << kHeader << '\n';
  std::ostringstream row;
  row.imbue(std::locale::classic());
  row << std::setprecision(17);
  for (const auto& s : curve.samples) row << s.displacement << ',' << s.force << '\n';
  out << row.str();
}

void write_curve_csv(const FDCurve& curve, const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write curve", path.string());
  write_curve_csv(curve, file);
  if (!file.flush()) throw IoError("write failed", path.string());
}

FDCurve zero_offset(const FDCurve& curve) {
  if (curve.empty()) throw DomainError("zero_offset: empty curve");
  FDCurve out = curve;
  const double offset = curve.samples.front().force;
  for (auto& s : out.samples) s.force -= offset;
  out.samples.front().force = 0.0;
  return out;
}

FDCurve average_runs(const std::vector<FDCurve>& runs) {
  if (runs.empty()) throw DomainError("average_runs: no runs");
  const FDCurve& ref = runs.front();
  for (std::size_t r = 1; r < runs.size(); ++r) {
    const FDCurve& run = runs[r];
    const std::size_t common = std::min(run.size(), ref.size());
    for (std::size_t k = 0; k < common; ++k) {
      if (run.samples[k].displacement != ref.samples[k].displacement) {
        std::ostringstream os;
        os << "average_runs: run " << r << " sample " << k << " at " << run.samples[k].displacement
           << " mm, run 0 at " << ref.samples[k].displacement << " mm";
        throw GridError(os.str());
      }
    }
    if (run.size() != ref.size()) {
      std::ostringstream os;
      os << "average_runs: run " << r << " has " << run.size() << " samples, run 0 has " << ref.size();
      throw GridError(os.str());
    }
  }
  FDCurve out;
  out.label = ref.label;
  out.samples.reserve(ref.size());
  for (std::size_t k = 0; k < ref.size(); ++k) {
    double sum = 0.0;
    for (const auto& run : runs) sum += run.samples[k].force;
    out.samples.push_back({ref.samples[k].displacement, sum / static_cast<double>(runs.size())});
  }
  return out;
}

FDCurve resample(const FDCurve& curve, const std::vector<double>& grid) {
  if (curve.empty()) throw DomainError("resample: empty curve");
  const auto& s = curve.samples;
  FDCurve out;
  out.label = curve.label;
  out.samples.reserve(grid.size());
  std::size_t seg = 0;
  for (double x : grid) {
    if (!(x >= s.front().displacement && x <= s.back().displacement)) {
      std::ostringstream os;
      os << "resample: " << x << " mm outside [" << s.front().displacement << ", "
         << s.back().displacement << "] of curve '" << curve.label << "'";
      throw RangeError(os.str());
    }
    // grids are usually ascending; restart the scan when they are not
    if (seg > 0 && x < s[seg].displacement) seg = 0;
    while (seg + 1 < s.size() && s[seg + 1].displacement < x) ++seg;
    if (x == s[seg].displacement || seg + 1 == s.size()) {
      out.samples.push_back({x, s[seg].force});
      continue;
    }
    const Sample& a = s[seg];
    const Sample& b = s[seg + 1];
    if (x == b.displacement) {
      out.samples.push_back({x, b.force});
      continue;
    }
    const double t = (x - a.displacement) / (b.displacement - a.displacement);
    out.samples.push_back({x, a.force + t * (b.force - a.force)});
  }
  return out;
}

}  // namespace fps::validation
