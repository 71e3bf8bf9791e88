#pragma once

#include <map>
#include <string>
#include <vector>

namespace kirchhoff {

/** Shortest-faithful decimal rendering of a double (%.17g style, but
 *  round-trip exact and locale independent). */
std::string format_double(double x);

/** Least-squares slope of y against x. Needs >= 2 points. */
double lsq_slope(const std::vector<double>& x, const std::vector<double>& y);

/** Least-squares slope of log(y) against log(x); all entries positive. */
double log_slope(const std::vector<double>& x, const std::vector<double>& y);

/** Geometric ladder start, start*ratio, ... (count entries). */
std::vector<double> geometric_ladder(double start, double ratio, int count);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  /** '.' decimal, '\n' line ends, header row first. */
  std::string to_string() const;
};

void write_text_file(const std::string& path, const std::string& content);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/** Self-contained SVG scatter+line plot on log10-log10 axes.
 *  Nonpositive points are dropped (a log plot cannot carry them). */
std::string svg_loglog(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel,
                       const std::vector<PlotSeries>& series);

/** Run manifest: subcommand, seed, tolerances, fitted constants, outputs.
 *  Serialized as deterministic JSON (insertion order preserved). */
struct RunManifest {
  std::string tool = "kirchhoff-toolkit";
  std::string version = "1.0.0";
  std::string subcommand;
  long long seed = 0;
  std::vector<std::pair<std::string, std::string>> entries;

  void put(const std::string& key, const std::string& value);
  void put(const std::string& key, double value);
  std::string to_json() const;
};

}  // namespace kirchhoff
