#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "glitchguard/error.hpp"
#include "glitchguard/scoring/curve_io.hpp"

namespace glitchguard {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

}  // namespace

std::string render_plot_svg(const RegularityCurve& curve, std::span<const AnomalySegment> segments,
                            const PlotOptions& options) {
  if (curve.scores.empty()) throw ShapeError("cannot plot an empty curve");
  const double left = 60, right = 20, top = 30, bottom = 45;
  const double w = options.width, h = options.height;
  const double plot_w = w - left - right;
  const double plot_h = h - top - bottom;
  const std::size_t n = curve.size();
  const double last = n > 1 ? static_cast<double>(n - 1) : 1.0;
  auto px = [&](double frame) { return left + frame / last * plot_w; };
  auto py = [&](double score) { return top + (1.0 - std::clamp(score, 0.0, 1.0)) * plot_h; };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(w) << "\" height=\"" << num(h)
    << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << num(w) << "\" height=\"" << num(h) << "\" fill=\"white\"/>\n";
  const std::string title = options.title.empty() ? curve.video_id : options.title;
  s << "<text x=\"" << num(w / 2) << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
    << escape(title) << "</text>\n";

  for (const auto& seg : segments) {
    const double x0 = px(static_cast<double>(seg.start)) - (n > 1 ? 0.5 * plot_w / last : 0.0);
    const double x1 = px(static_cast<double>(seg.end)) + (n > 1 ? 0.5 * plot_w / last : 0.0);
    const double cx0 = std::max(left, x0), cx1 = std::min(left + plot_w, x1);
    s << "<rect class=\"anomaly\" x=\"" << num(cx0) << "\" y=\"" << num(top) << "\" width=\"" << num(cx1 - cx0)
      << "\" height=\"" << num(plot_h) << "\" fill=\"#f4a3a3\" fill-opacity=\"0.5\"/>\n";
  }

  // Axes and ticks.
  s << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\""
    << num(top + plot_h) << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + plot_h) << "\" x2=\"" << num(left + plot_w)
    << "\" y2=\"" << num(top + plot_h) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = i / 4.0;
    s << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(v) + 4) << "\" text-anchor=\"end\" "
      << "font-family=\"sans-serif\" font-size=\"10\">" << num(v) << "</text>\n";
  }
  const std::size_t ticks = std::min<std::size_t>(5, n - 1 > 0 ? n - 1 : 1);
  for (std::size_t i = 0; i <= ticks; ++i) {
    const auto frame = static_cast<std::size_t>(static_cast<double>(i) / static_cast<double>(ticks) * last + 0.5);
    s << "<text x=\"" << num(px(static_cast<double>(frame))) << "\" y=\"" << num(top + plot_h + 14)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << frame << "</text>\n";
  }
  s << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(h - 8)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">frame</text>\n";
  s << "<text x=\"14\" y=\"" << num(top + plot_h / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"12\" transform=\"rotate(-90 14 " << num(top + plot_h / 2) << ")\">regularity score</text>\n";

  s << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
  for (std::size_t t = 0; t < n; ++t) {
    if (t) s << ' ';
    s << num(px(static_cast<double>(t))) << ',' << num(py(curve.scores[t]));
  }
  s << "\"/>\n</svg>\n";
  return s.str();
}

void render_plot(const RegularityCurve& curve, std::span<const AnomalySegment> segments,
                 const std::filesystem::path& path, const PlotOptions& options) {
  const std::string svg = render_plot_svg(curve, segments, options);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open plot file for writing: " + path.string());
  out << svg;
  if (!out) throw IoError("failed writing plot file: " + path.string());
}

}  // namespace glitchguard
