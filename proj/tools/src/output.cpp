#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cascadex/error.hpp"

namespace cascadex::cli {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<PlotSeries>& series, bool unit_square) {
  const double W = 640, H = 400, L = 70, R = 150, T = 40, B = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!unit_square) {
    bool first = true;
    for (const auto& s : series) {
      for (std::size_t k = 0; k < s.x.size(); ++k) {
        if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
        if (first) {
          x0 = x1 = s.x[k];
          y1 = s.y[k];
          first = false;
        }
        x0 = std::min(x0, s.x[k]);
        x1 = std::max(x1, s.x[k]);
        y1 = std::max(y1, s.y[k]);
      }
    }
    y0 = 0;
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
  }
  auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto sy = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << px(W / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
    << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    o << "<text x=\"" << px(sx(xv)) << "\" y=\"" << px(H - B + 16) << "\" text-anchor=\"middle\" font-size=\"11\">"
      << num(xv) << "</text>\n";
    o << "<text x=\"" << px(L - 6) << "\" y=\"" << px(sy(yv) + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
      << num(yv) << "</text>\n";
  }
  o << "<text x=\"" << px((L + W - R) / 2) << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-size=\"12\">"
    << escape(xlabel) << "</text>\n";
  o << "<text x=\"16\" y=\"" << px((T + H - B) / 2) << "\" font-size=\"12\" transform=\"rotate(-90 16 "
    << px((T + H - B) / 2) << ")\" text-anchor=\"middle\">" << escape(ylabel) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    if (s.steps) {
      const double width = s.x.size() > 1 ? (sx(s.x[1]) - sx(s.x[0])) / (series.size() + 0.5) : 10.0;
      for (std::size_t k = 0; k < s.x.size(); ++k) {
        const double left = sx(s.x[k]) + width * static_cast<double>(si);
        o << "<rect x=\"" << px(left) << "\" y=\"" << px(sy(s.y[k])) << "\" width=\"" << px(width)
          << "\" height=\"" << px(sy(0) - sy(s.y[k])) << "\" fill=\"" << s.color << "\" fill-opacity=\"0.7\"/>\n";
      }
    } else {
      o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t k = 0; k < s.x.size(); ++k) {
        if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
        o << px(sx(s.x[k])) << ',' << px(sy(s.y[k])) << ' ';
      }
      o << "\"/>\n";
    }
    const double ly = T + 16.0 * static_cast<double>(si) + 8;
    o << "<rect x=\"" << px(W - R + 10) << "\" y=\"" << px(ly - 8) << "\" width=\"10\" height=\"10\" fill=\""
      << s.color << "\"/>\n";
    o << "<text x=\"" << px(W - R + 26) << "\" y=\"" << px(ly + 1) << "\" font-size=\"11\">" << escape(s.name)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace cascadex::cli
