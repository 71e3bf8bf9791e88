#include "kirchhoff/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace kirchhoff {

std::string format_double(double x) {
  char buf[64];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    double back = std::strtod(buf, nullptr);
    if (back == x || (std::isnan(back) && std::isnan(x))) break;
  }
  std::string s(buf);
  std::replace(s.begin(), s.end(), ',', '.');
  return s;
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::runtime_error("lsq_slope needs two or more paired points");
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0) throw std::runtime_error("lsq_slope needs distinct abscissae");
  return (n * sxy - sx * sy) / denom;
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  lx.reserve(x.size());
  ly.reserve(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0))
      throw std::runtime_error("log_slope needs strictly positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return lsq_slope(lx, ly);
}

std::vector<double> geometric_ladder(double start, double ratio, int count) {
  if (!(start > 0) || !(ratio > 0))
    throw std::runtime_error("geometric_ladder needs positive start and ratio");
  if (count < 1) throw std::runtime_error("geometric_ladder needs count >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  double v = start;
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = v;
    v *= ratio;
  }
  return out;
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header.size())
    throw std::runtime_error("csv row width must match header width");
  rows.push_back(std::move(row));
}

static std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string CsvTable::to_string() const {
  std::ostringstream os;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) os << ',';
    os << csv_escape(header[j]);
  }
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) os << ',';
      os << csv_escape(row[j]);
    }
    os << '\n';
  }
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing file: " + path);
}

namespace {

struct LogRange {
  double lo = 0, hi = 1;
};

LogRange padded_log_range(const std::vector<double>& vals) {
  LogRange r;
  double lo = 0, hi = 0;
  bool any = false;
  for (double v : vals) {
    if (!(v > 0)) continue;
    double l = std::log10(v);
    if (!any) {
      lo = hi = l;
      any = true;
    } else {
      lo = std::min(lo, l);
      hi = std::max(hi, l);
    }
  }
  if (!any) return r;
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  double pad = 0.05 * (hi - lo);
  r.lo = lo - pad;
  r.hi = hi + pad;
  return r;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string svg_loglog(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel,
                       const std::vector<PlotSeries>& series) {
  const double W = 640, H = 480;
  const double ml = 70, mr = 20, mt = 40, mb = 55;
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                           "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

  std::vector<double> all_x, all_y;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (s.x[i] > 0 && s.y[i] > 0) {
        all_x.push_back(s.x[i]);
        all_y.push_back(s.y[i]);
      }
    }
  }
  LogRange rx = padded_log_range(all_x);
  LogRange ry = padded_log_range(all_y);

  auto px = [&](double v) {
    double t = (std::log10(v) - rx.lo) / (rx.hi - rx.lo);
    return ml + t * (W - ml - mr);
  };
  auto py = [&](double v) {
    double t = (std::log10(v) - ry.lo) / (ry.hi - ry.lo);
    return H - mb - t * (H - mt - mb);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
     << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"16\">"
     << xml_escape(title) << "</text>\n";
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr
     << "\" height=\"" << H - mt - mb
     << "\" fill=\"none\" stroke=\"#333\"/>\n";

  auto decade_ticks = [](const LogRange& r) {
    std::vector<int> ticks;
    int lo = static_cast<int>(std::ceil(r.lo));
    int hi = static_cast<int>(std::floor(r.hi));
    int step = 1 + (hi - lo) / 10;
    for (int d = lo; d <= hi; d += step) ticks.push_back(d);
    return ticks;
  };
  for (int d : decade_ticks(rx)) {
    double v = std::pow(10.0, d);
    double x = px(v);
    os << "<line x1=\"" << x << "\" y1=\"" << mt << "\" x2=\"" << x
       << "\" y2=\"" << H - mb << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << x << "\" y=\"" << H - mb + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"11\">1e"
       << d << "</text>\n";
  }
  for (int d : decade_ticks(ry)) {
    double v = std::pow(10.0, d);
    double y = py(v);
    os << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << W - mr
       << "\" y2=\"" << y << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << ml - 6 << "\" y=\"" << y + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"11\">1e"
       << d << "</text>\n";
  }
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\">"
     << xml_escape(xlabel) << "</text>\n";
  os << "<text x=\"18\" y=\"" << H / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        "transform=\"rotate(-90 18 "
     << H / 2 << ")\">" << xml_escape(ylabel) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = palette[si % 8];
    std::ostringstream pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0) || !(s.y[i] > 0)) continue;
      pts << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0) || !(s.y[i] > 0)) continue;
      os << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
         << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    os << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 16 + 16 * si
       << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color
       << "\">" << xml_escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void RunManifest::put(const std::string& key, const std::string& value) {
  entries.emplace_back(key, value);
}

void RunManifest::put(const std::string& key, double value) {
  entries.emplace_back(key, format_double(value));
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = tool;
  j["version"] = version;
  j["subcommand"] = subcommand;
  j["seed"] = seed;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  for (const auto& [k, v] : entries) details[k] = v;
  j["details"] = details;
  return j.dump(2) + "\n";
}

}  // namespace kirchhoff
