#pragma once

// Output formats: CSV rows with 12 significant digits, Wavefront OBJ meshes
// and self-contained SVG line plots.

#include <Eigen/Core>

#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace hypermin::io {

/// Decimal with 12 significant digits, shortest of fixed/scientific.
std::string format_real(double x);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  CsvWriter& cell(double x);
  CsvWriter& cell(long long x);
  CsvWriter& cell(int x) { return cell(static_cast<long long>(x)); }
  CsvWriter& cell(const std::string& s);
  CsvWriter& cell(const char* s) { return cell(std::string(s)); }
  void end_row();
  /// Trailer row flagging an aborted run; keeps already written rows valid.
  void error_trailer(const std::string& message);

  std::size_t columns() const { return header_.size(); }

 private:
  std::ostream& out_;
  std::vector<std::string> header_;
  std::vector<std::string> row_;
};

/// Triangulated grid mesh: vertices row-major over (i, j), i the u-index.
struct GridMesh {
  int nu = 0, nv = 0;
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::vector<int>> polylines;  // 0-based vertex indices
};

/// Two triangles per grid cell, vertices only plus faces and optional
/// polyline elements.
void write_obj(std::ostream& out, const GridMesh& mesh, const std::string& comment);

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

struct PlotSpec {
  std::string title, x_label, y_label;
  std::vector<PlotSeries> series;
  /// Vertical marker (e.g. a zero crossing); NaN for none.
  double marker_x = std::numeric_limits<double>::quiet_NaN();
  std::string marker_label;
  bool zero_line = true;
};

void write_svg(std::ostream& out, const PlotSpec& spec);

}  // namespace hypermin::io
