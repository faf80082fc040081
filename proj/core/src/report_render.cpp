#include "oip/report_render.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "oip/errors.hpp"

namespace oip::analysis {

namespace {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += "\"";
  return out;
}

std::string fmt2(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

const char* kPalette[] = {"#4C78A8", "#F58518", "#54A24B", "#E45756",
                          "#72B7B2", "#B279A2", "#9D755D", "#EECA3B"};
constexpr int kPaletteSize = 8;

void svg_header(std::ostringstream& os, int width, int height, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  os << "<style>text{font-family:Helvetica,Arial,sans-serif;}</style>\n";
  os << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">"
     << title << "</text>\n";
}

void embed_data_comment(std::ostringstream& os, const Figure& fig) {
  // The numbers behind the picture, readable without a viewer.
  os << "<!--\ndata\naxis";
  for (const auto& s : fig.series) os << "," << s.label;
  os << "\n";
  if (fig.kind == Figure::Kind::Heatmap) {
    os << "matrix rows=" << fig.matrix.size() << "\n";
    for (size_t r = 0; r < fig.matrix.size(); ++r) {
      os << fig.axes[r];
      for (double v : fig.matrix[r]) os << "," << fmt2(v);
      os << "\n";
    }
  } else {
    for (size_t a = 0; a < fig.axes.size(); ++a) {
      os << fig.axes[a];
      for (const auto& s : fig.series) os << "," << fmt2(s.values[a]);
      os << "\n";
    }
  }
  os << "-->\n";
}

std::string radar_svg(const Figure& fig) {
  const int w = 560, h = 560;
  const double cx = w / 2.0, cy = h / 2.0 + 10.0;
  const double radius = 200.0;
  const double vmin = 1.0, vmax = 5.0;
  const size_t n = fig.axes.size();

  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  svg_header(os, w, h, fig.title);
  embed_data_comment(os, fig);

  auto point = [&](size_t axis, double value) {
    const double frac = std::clamp((value - vmin) / (vmax - vmin), 0.0, 1.0);
    const double ang = -M_PI / 2.0 + 2.0 * M_PI * double(axis) / double(n);
    return std::pair<double, double>{cx + radius * frac * std::cos(ang),
                                     cy + radius * frac * std::sin(ang)};
  };

  for (int ring = 1; ring <= 5; ++ring) {
    os << "<polygon points=\"";
    for (size_t a = 0; a < n; ++a) {
      auto [x, y] = point(a, double(ring));
      os << x << "," << y << " ";
    }
    os << "\" fill=\"none\" stroke=\"#dddddd\"/>\n";
  }
  for (size_t a = 0; a < n; ++a) {
    auto [x, y] = point(a, vmax);
    os << "<line x1=\"" << cx << "\" y1=\"" << cy << "\" x2=\"" << x << "\" y2=\"" << y
       << "\" stroke=\"#bbbbbb\"/>\n";
    auto [lx, ly] = point(a, vmax + 0.45);
    os << "<text x=\"" << lx << "\" y=\"" << ly
       << "\" font-size=\"14\" text-anchor=\"middle\">" << fig.axes[a] << "</text>\n";
  }
  for (size_t s = 0; s < fig.series.size(); ++s) {
    const char* color = kPalette[s % kPaletteSize];
    os << "<polygon points=\"";
    for (size_t a = 0; a < n; ++a) {
      auto [x, y] = point(a, fig.series[s].values[a]);
      os << x << "," << y << " ";
    }
    os << "\" fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<rect x=\"20\" y=\"" << 40 + 20 * int(s) << "\" width=\"12\" height=\"12\" fill=\""
       << color << "\"/>\n";
    os << "<text x=\"38\" y=\"" << 50 + 20 * int(s) << "\" font-size=\"12\">"
       << fig.series[s].label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string heatmap_svg(const Figure& fig) {
  const size_t n = fig.axes.size();
  const int cell = 64;
  const int left = 70, top = 60;
  const int w = left + int(n) * cell + 30;
  const int h = top + int(n) * cell + 30;

  double max_abs = 1e-12;
  for (const auto& row : fig.matrix)
    for (double v : row) max_abs = std::max(max_abs, std::abs(v));

  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  svg_header(os, w, h, fig.title);
  embed_data_comment(os, fig);

  auto shade = [&](double v) {
    const double f = std::clamp(v / max_abs, -1.0, 1.0);
    // blue for negative, red for positive
    const int r = int(std::lround(255 - std::max(0.0, -f) * 155));
    const int g = int(std::lround(255 - std::abs(f) * 155));
    const int b = int(std::lround(255 - std::max(0.0, f) * 155));
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return std::string(buf);
  };

  for (size_t r = 0; r < n; ++r) {
    os << "<text x=\"" << left - 12 << "\" y=\"" << top + int(r) * cell + cell / 2 + 5
       << "\" font-size=\"14\" text-anchor=\"end\">" << fig.axes[r] << "</text>\n";
    os << "<text x=\"" << left + int(r) * cell + cell / 2 << "\" y=\"" << top - 10
       << "\" font-size=\"14\" text-anchor=\"middle\">" << fig.axes[r] << "</text>\n";
    for (size_t c = 0; c < n; ++c) {
      const double v = fig.matrix[r][c];
      os << "<rect x=\"" << left + int(c) * cell << "\" y=\"" << top + int(r) * cell
         << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"" << shade(v)
         << "\" stroke=\"#888888\"/>\n";
      os << "<text x=\"" << left + int(c) * cell + cell / 2 << "\" y=\""
         << top + int(r) * cell + cell / 2 + 5 << "\" font-size=\"12\" text-anchor=\"middle\">"
         << fmt2(v) << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

std::string bars_svg(const Figure& fig) {
  const size_t groups = fig.axes.size();
  const size_t series = fig.series.size();
  const int w = 720, h = 420;
  const int left = 60, right = 20, top = 50, bottom = 60;
  const double plot_w = w - left - right, plot_h = h - top - bottom;

  double vmin = 0.0, vmax = 5.0;
  for (const auto& s : fig.series)
    for (double v : s.values) {
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  if (vmax - vmin < 1e-9) vmax = vmin + 1.0;

  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  svg_header(os, w, h, fig.title);
  embed_data_comment(os, fig);

  auto ycoord = [&](double v) { return top + plot_h * (1.0 - (v - vmin) / (vmax - vmin)); };
  const double y0 = ycoord(std::max(0.0, vmin));

  for (int tick = 0; tick <= 5; ++tick) {
    const double v = vmin + (vmax - vmin) * tick / 5.0;
    os << "<line x1=\"" << left << "\" y1=\"" << ycoord(v) << "\" x2=\"" << w - right
       << "\" y2=\"" << ycoord(v) << "\" stroke=\"#eeeeee\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << ycoord(v) + 4
       << "\" font-size=\"11\" text-anchor=\"end\">" << fmt2(v) << "</text>\n";
  }

  const double group_w = plot_w / double(groups);
  const double bar_w = group_w * 0.8 / double(series);
  for (size_t g = 0; g < groups; ++g) {
    for (size_t s = 0; s < series; ++s) {
      const double v = fig.series[s].values[g];
      const double x = left + group_w * double(g) + group_w * 0.1 + bar_w * double(s);
      const double y_top = std::min(ycoord(v), y0);
      const double height = std::abs(ycoord(v) - y0);
      os << "<rect x=\"" << x << "\" y=\"" << y_top << "\" width=\"" << bar_w * 0.92
         << "\" height=\"" << height << "\" fill=\"" << kPalette[s % kPaletteSize] << "\"/>\n";
    }
    os << "<text x=\"" << left + group_w * (double(g) + 0.5) << "\" y=\"" << h - bottom + 20
       << "\" font-size=\"13\" text-anchor=\"middle\">" << fig.axes[g] << "</text>\n";
  }
  for (size_t s = 0; s < series; ++s) {
    os << "<rect x=\"" << left + 4 + 130 * int(s) << "\" y=\"" << h - 22
       << "\" width=\"12\" height=\"12\" fill=\"" << kPalette[s % kPaletteSize] << "\"/>\n";
    os << "<text x=\"" << left + 20 + 130 * int(s) << "\" y=\"" << h - 12
       << "\" font-size=\"12\">" << fig.series[s].label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string sanitize_filename(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')
      out += c;
    else
      out += '_';
  }
  return out;
}

}  // namespace

std::string table_to_csv(const Table& table) {
  std::ostringstream os;
  for (size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << csv_escape(table.columns[i]);
  os << "\n";
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
    os << "\n";
  }
  return os.str();
}

std::string report_to_markdown(const AnalysisReport& report) {
  std::ostringstream os;
  os << "# Report: " << report.name << "\n\n";
  os << "Inputs:";
  for (const auto& k : report.input_keys) os << " " << k;
  os << "\n";
  for (const auto& t : report.tables) {
    os << "\n## " << t.name << "\n\n|";
    for (const auto& c : t.columns) os << " " << c << " |";
    os << "\n|";
    for (size_t i = 0; i < t.columns.size(); ++i) os << " --- |";
    os << "\n";
    for (const auto& row : t.rows) {
      os << "|";
      for (const auto& cell : row) os << " " << cell << " |";
      os << "\n";
    }
  }
  if (!report.figures.empty()) {
    os << "\n## figures\n\n";
    for (const auto& f : report.figures)
      os << "- " << sanitize_filename(f.name) << ".svg\n";
  }
  return os.str();
}

std::string figure_to_svg(const Figure& figure) {
  switch (figure.kind) {
    case Figure::Kind::Radar:
      return radar_svg(figure);
    case Figure::Kind::Heatmap:
      return heatmap_svg(figure);
    case Figure::Kind::GroupedBars:
      return bars_svg(figure);
  }
  throw UnsupportedFormat("unknown figure kind");
}

std::vector<std::filesystem::path> render_report(const AnalysisReport& report,
                                                 const std::set<RenderFormat>& formats,
                                                 const std::filesystem::path& out_dir) {
  const auto dir = out_dir / report.name;
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;

  auto write = [&](const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MissingFile("cannot write " + path.string());
    out << content;
    written.push_back(path);
  };

  if (formats.count(RenderFormat::Csv))
    for (const auto& t : report.tables)
      write(dir / (sanitize_filename(t.name) + ".csv"), table_to_csv(t));
  if (formats.count(RenderFormat::Markdown)) write(dir / "report.md", report_to_markdown(report));
  if (formats.count(RenderFormat::Svg))
    for (const auto& f : report.figures)
      write(dir / (sanitize_filename(f.name) + ".svg"), figure_to_svg(f));
  return written;
}

}  // namespace oip::analysis
