#include "hypermin/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hypermin::io {

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header)
    : out_(out), header_(std::move(header)) {
  for (std::size_t k = 0; k < header_.size(); ++k) {
    out_ << (k ? "," : "") << header_[k];
  }
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(double x) {
  row_.push_back(format_real(x));
  return *this;
}

CsvWriter& CsvWriter::cell(long long x) {
  row_.push_back(std::to_string(x));
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    row_.push_back(s);
  } else {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    row_.push_back(q + "\"");
  }
  return *this;
}

void CsvWriter::end_row() {
  if (row_.size() != header_.size()) {
    throw std::logic_error("CsvWriter: row has " + std::to_string(row_.size()) +
                           " cells, header has " + std::to_string(header_.size()));
  }
  for (std::size_t k = 0; k < row_.size(); ++k) out_ << (k ? "," : "") << row_[k];
  out_ << '\n';
  out_.flush();
  row_.clear();
}

void CsvWriter::error_trailer(const std::string& message) {
  row_.clear();
  std::string msg = message;
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  out_ << "# error: " << msg << '\n';
  out_.flush();
}

void write_obj(std::ostream& out, const GridMesh& mesh, const std::string& comment) {
  if (static_cast<int>(mesh.vertices.size()) != mesh.nu * mesh.nv) {
    throw std::invalid_argument("write_obj: vertex count does not match grid");
  }
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "# vertices " << mesh.vertices.size() << '\n';
  char buf[128];
  for (const auto& p : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.12g %.12g %.12g\n", p.x(), p.y(), p.z());
    out << buf;
  }
  const auto id = [&](int i, int j) { return i * mesh.nv + j + 1; };
  for (int i = 0; i + 1 < mesh.nu; ++i) {
    for (int j = 0; j + 1 < mesh.nv; ++j) {
      out << "f " << id(i, j) << ' ' << id(i + 1, j) << ' ' << id(i + 1, j + 1) << '\n';
      out << "f " << id(i, j) << ' ' << id(i + 1, j + 1) << ' ' << id(i, j + 1) << '\n';
    }
  }
  for (const auto& line : mesh.polylines) {
    out << 'l';
    for (int k : line) out << ' ' << k + 1;
    out << '\n';
  }
}

namespace {

std::string escape_xml(const std::string& s) {
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

void write_svg(std::ostream& out, const PlotSpec& spec) {
  constexpr double W = 720, H = 480, left = 80, right = 30, top = 50, bottom = 60;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : spec.series) {
    for (double x : s.x) { xmin = std::min(xmin, x); xmax = std::max(xmax, x); }
    for (double y : s.y) {
      if (std::isfinite(y)) { ymin = std::min(ymin, y); ymax = std::max(ymax, y); }
    }
  }
  if (!std::isfinite(xmin)) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
  if (spec.zero_line) { ymin = std::min(ymin, 0.0); ymax = std::max(ymax, 0.0); }
  if (xmax == xmin) { xmin -= 0.5; xmax += 0.5; }
  if (ymax == ymin) { ymin -= 0.5; ymax += 0.5; }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (W - left - right); };
  const auto py = [&](double y) { return H - bottom - (y - ymin) / (ymax - ymin) * (H - top - bottom); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"25\" text-anchor=\"middle\" font-size=\"15\">"
      << escape_xml(spec.title) << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right
      << "\" height=\"" << H - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 5, yv = ymin + (ymax - ymin) * k / 5;
    out << "<text x=\"" << px(xv) << "\" y=\"" << H - bottom + 18
        << "\" text-anchor=\"middle\">" << format_real(std::round(xv * 1e4) / 1e4) << "</text>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4
        << "\" text-anchor=\"end\">" << format_real(std::round(yv * 1e4) / 1e4) << "</text>\n";
  }
  out << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 15
      << "\" text-anchor=\"middle\">" << escape_xml(spec.x_label) << "</text>\n";
  out << "<text x=\"18\" y=\"" << (top + H - bottom) / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << (top + H - bottom) / 2
      << ")\">" << escape_xml(spec.y_label) << "</text>\n";
  if (spec.zero_line) {
    out << "<line x1=\"" << left << "\" y1=\"" << py(0) << "\" x2=\"" << W - right
        << "\" y2=\"" << py(0) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    const auto& ser = spec.series[s];
    const char* color = colors[s % 5];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < ser.x.size() && k < ser.y.size(); ++k) {
      if (std::isfinite(ser.y[k])) out << px(ser.x[k]) << ',' << py(ser.y[k]) << ' ';
    }
    out << "\"/>\n";
    for (std::size_t k = 0; k < ser.x.size() && k < ser.y.size(); ++k) {
      if (std::isfinite(ser.y[k])) {
        out << "<circle cx=\"" << px(ser.x[k]) << "\" cy=\"" << py(ser.y[k])
            << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
      }
    }
    out << "<text x=\"" << W - right - 10 << "\" y=\"" << top + 18 + 16 * s
        << "\" text-anchor=\"end\" fill=\"" << color << "\">" << escape_xml(ser.label)
        << "</text>\n";
  }
  if (std::isfinite(spec.marker_x)) {
    out << "<line x1=\"" << px(spec.marker_x) << "\" y1=\"" << top << "\" x2=\""
        << px(spec.marker_x) << "\" y2=\"" << H - bottom
        << "\" stroke=\"#d62728\" stroke-dasharray=\"6 3\"/>\n";
    out << "<text x=\"" << px(spec.marker_x) + 5 << "\" y=\"" << top + 14 << "\" fill=\"#d62728\">"
        << escape_xml(spec.marker_label) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace hypermin::io
