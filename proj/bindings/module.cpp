#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

#include "crashspot/geo.hpp"
#include "crashspot/hotspot.hpp"
#include "crashspot/idw.hpp"
#include "crashspot/stats.hpp"
#include "crashspot/temporal.hpp"
#include "crashspot/types.hpp"

namespace py = pybind11;
using namespace crashspot;

namespace {

// Gi* over a dense value matrix laid out as rows of equal length; row 0 is
// the south row. Returns (z, p, class) matrices in the same layout.
py::dict gi_star_grid(const std::vector<std::vector<double>>& values, double cell_size,
                      double band) {
  if (values.empty() || values[0].empty()) {
    throw std::invalid_argument("values must be a non-empty matrix");
  }
  const int n_rows = static_cast<int>(values.size());
  const int n_cols = static_cast<int>(values[0].size());
  CellGrid cells;
  cells.spec = GridSpec{{0.0, 0.0}, cell_size, n_cols, n_rows};
  cells.x.resize(static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols));
  cells.n_events.assign(cells.x.size(), 0);
  for (int r = 0; r < n_rows; ++r) {
    if (static_cast<int>(values[static_cast<std::size_t>(r)].size()) != n_cols) {
      throw std::invalid_argument("values rows must have equal length");
    }
    for (int c = 0; c < n_cols; ++c) {
      cells.x[static_cast<std::size_t>(cells.spec.linear_index({c, r}))] =
          values[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
  }
  const GiStarResult gi = gi_star(cells, build_weights(cells.spec, band));
  std::vector<std::vector<double>> z(static_cast<std::size_t>(n_rows)),
      p(static_cast<std::size_t>(n_rows));
  std::vector<std::vector<std::string>> cls(static_cast<std::size_t>(n_rows));
  for (int r = 0; r < n_rows; ++r) {
    for (int c = 0; c < n_cols; ++c) {
      const auto i = static_cast<std::size_t>(cells.spec.linear_index({c, r}));
      z[static_cast<std::size_t>(r)].push_back(gi.z[i]);
      p[static_cast<std::size_t>(r)].push_back(gi.p[i]);
      cls[static_cast<std::size_t>(r)].emplace_back(to_string(gi.cls[i]));
    }
  }
  py::dict out;
  out["z"] = z;
  out["p"] = p;
  out["class"] = cls;
  return out;
}

py::dict chi_square_py(const std::vector<std::vector<std::uint64_t>>& observed) {
  ContingencyTable table;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (observed[i].size() != 2) {
      throw std::invalid_argument("each row must be [n_high, n_low]");
    }
    table.observed.push_back({observed[i][0], observed[i][1]});
    table.row_labels.push_back("row" + std::to_string(i));
  }
  const ChiSquareReport report = chi_square(table);
  py::dict out;
  out["chi2"] = report.chi2;
  out["df"] = report.df;
  out["p_value"] = report.p_value;
  out["cramers_v"] = report.cramers_v;
  out["n"] = report.n;
  return out;
}

double daily_mean_py(std::uint64_t count, const std::string& start, const std::string& end,
                     const std::vector<std::string>& missing) {
  const auto s = parse_date(start);
  const auto e = parse_date(end);
  if (!s || !e) throw std::invalid_argument("dates must be YYYY-MM-DD");
  std::set<CivilDate> gaps;
  for (const auto& m : missing) {
    const auto d = parse_date(m);
    if (!d) throw std::invalid_argument("bad missing date: " + m);
    gaps.insert(*d);
  }
  return daily_mean(count, StudyWindow(*s, *e, std::move(gaps)));
}

std::string assign_period_py(int hour, int minute) {
  if (hour < 0 || hour > 23 || minute < 0 || minute > 59) {
    throw std::invalid_argument("invalid clock time");
  }
  CivilDateTime t;
  t.hour = hour;
  t.minute = minute;
  return std::string(to_string(assign_period(t)));
}

int severity_weight_py(const std::string& severity) {
  const auto s = severity_from_string(severity);
  if (!s) throw std::invalid_argument("severity must be 'low' or 'high'");
  return severity_weight(*s);
}

std::vector<double> idw_py(const std::vector<std::tuple<double, double, double>>& samples,
                           const std::vector<std::pair<double, double>>& points, double power,
                           int neighbors) {
  std::vector<Sample> s;
  s.reserve(samples.size());
  for (const auto& [x, y, v] : samples) s.push_back({{x, y}, v});
  IdwParams params;
  params.power = power;
  params.neighbors = neighbors;
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& [x, y] : points) {
    const auto v = idw_at({x, y}, s, params);
    out.push_back(v ? *v : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Severity-weighted collision analysis core: temporal association "
            "tests, Getis-Ord Gi* hotspots, and IDW interpolation.";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<DataError>(m, "DataError");

  m.def("haversine_m",
        [](double lon1, double lat1, double lon2, double lat2) {
          return haversine_m({lon1, lat1}, {lon2, lat2});
        },
        py::arg("lon1"), py::arg("lat1"), py::arg("lon2"), py::arg("lat2"),
        "Great-circle distance in meters (sphere radius 6,371,000 m).");

  m.def("assign_period", &assign_period_py, py::arg("hour"), py::arg("minute") = 0,
        "Civil-clock period: Morning 06-11, Afternoon 12-17, Evening 18-23, Night 00-05.");

  m.def("chi_square", &chi_square_py, py::arg("observed"),
        "Chi-square independence test on an r x 2 table of [n_high, n_low] rows; "
        "returns chi2, df, p_value, cramers_v, n.");

  m.def("chi2_sf", &chi2_sf, py::arg("x"), py::arg("df"),
        "Chi-square survival function P(X >= x).");

  m.def("cramers_v", &cramers_v, py::arg("chi2"), py::arg("n"),
        "Binary-outcome Cramer's V: sqrt(chi2 / n).");

  m.def("daily_mean", &daily_mean_py, py::arg("count"), py::arg("start"), py::arg("end"),
        py::arg("missing") = std::vector<std::string>{},
        "Events per observed day over an inclusive window, excluding missing dates.");

  m.def("severity_weight", &severity_weight_py, py::arg("severity"),
        "Severity weight: low -> 1, high -> 2.");

  m.def("gi_star_grid", &gi_star_grid, py::arg("values"), py::arg("cell_size"), py::arg("band"),
        "Getis-Ord Gi* over a dense cell-value matrix with fixed-distance-band weights.");

  m.def("classify", [](double z) { return std::string(to_string(classify(z))); }, py::arg("z"),
        "Confidence class for a Gi* z-score (90/95/99% two-tailed thresholds).");

  m.def("idw", &idw_py, py::arg("samples"), py::arg("points"), py::arg("power") = 2.0,
        py::arg("neighbors") = 12,
        "IDW estimates at query points from (x, y, value) samples; NaN where no sample.");

#ifdef CRASHSPOT_VERSION
  m.attr("__version__") = CRASHSPOT_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
