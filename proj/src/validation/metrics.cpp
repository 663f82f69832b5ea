#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fps/validation.hpp"

namespace fps::validation {

MetricsReport compute_metrics(const FDCurve& fe, const FDCurve& exp, const std::string& label) {
  if (fe.size() != exp.size()) {
    std::ostringstream os;
    os << "compute_metrics: " << fe.size() << " predicted vs " << exp.size() << " measured samples";
    throw GridError(os.str());
  }
  std::vector<double> d;
  d.reserve(fe.size());
  for (std::size_t k = 0; k < fe.size(); ++k) {
    const Sample& a = fe.samples[k];
    const Sample& b = exp.samples[k];
    if (a.displacement != b.displacement) {
      std::ostringstream os;
      os << "compute_metrics: grids differ at sample " << k << " (" << a.displacement << " vs "
         << b.displacement << " mm)";
      throw GridError(os.str());
    }
    // both curves are pinned to zero force at zero displacement
    if (a.displacement == 0.0) continue;
    d.push_back(std::abs(a.force - b.force));
  }
  if (d.size() < 2) throw DomainError("compute_metrics: need at least two non-zero displacement samples");

  const double n = static_cast<double>(d.size());
  double sum = 0.0, sum_sq = 0.0;
  for (double v : d) {
    sum += v;
    sum_sq += v * v;
  }
  MetricsReport r;
  r.n = d.size();
  r.label = label.empty() ? fe.label : label;
  r.mae = sum / n;
  r.rmse = std::sqrt(sum_sq / n);
  const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  r.min_diff = *lo;
  r.max_diff = *hi;
  double dev = 0.0;
  for (double v : d) dev += (v - r.mae) * (v - r.mae);
  r.std_diff = std::sqrt(dev / (n - 1.0));
  return r;
}

std::string render_report(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw DomainError("render_report: no reports");

  const std::vector<std::string> heads = {"E(GPa)", "MAE", "RMSE", "Max", "Min", "Std"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : reports) {
    std::vector<std::string> row{r.label};
    for (double v : {r.mae, r.rmse, r.max_diff, r.min_diff, r.std_diff}) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", v);
      row.emplace_back(buf);
    }
    cells.push_back(std::move(row));
  }
  std::vector<std::size_t> width(heads.size());
  for (std::size_t c = 0; c < heads.size(); ++c) {
    width[c] = heads[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }

  std::ostringstream os;
  auto put_row = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) os << "  ";
      const std::size_t pad = width[c] - row[c].size();
      // label column left-aligned, numbers right-aligned
      if (c == 0) os << row[c] << std::string(c + 1 == row.size() ? 0 : pad, ' ');
      else os << std::string(pad, ' ') << row[c];
    }
    os << '\n';
  };
  put_row(heads);
  for (const auto& row : cells) put_row(row);
  os << "E(GPa) = Young's modulus XY/Z; MAE, RMSE, Max, Min, Std of |FE - experiment| in N\n";
  return os.str();
}

}  // namespace fps::validation
