#include "svg_plot.hpp"

#include <algorithm>
#include <cstdarg>
#include <cstdio>

namespace traitlab {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void appendf(std::string& out, const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  out += buf;
}

}  // namespace

std::string scatter_svg(const std::vector<ScatterPoint>& points,
                        const std::string& x_label,
                        const std::string& y_label,
                        const std::string& title) {
  const double width = 720, height = 520;
  const double left = 70, right = 30, top = 50, bottom = 60;

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (!points.empty()) {
    xmin = xmax = points[0].x;
    ymin = ymax = points[0].y;
    for (const auto& p : points) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  auto pad = [](double& lo, double& hi) {
    double span = hi - lo;
    if (span <= 0) span = 1.0;
    lo -= span * 0.1;
    hi += span * 0.1;
  };
  pad(xmin, xmax);
  pad(ymin, ymax);

  auto sx = [&](double x) {
    return left + (x - xmin) / (xmax - xmin) * (width - left - right);
  };
  auto sy = [&](double y) {
    return height - bottom -
           (y - ymin) / (ymax - ymin) * (height - top - bottom);
  };

  std::string svg;
  appendf(svg,
          "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" "
          "height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
          width, height, width, height);
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  appendf(svg,
          "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
          "fill=\"none\" stroke=\"#444\"/>\n",
          left, top, width - left - right, height - top - bottom);

  // zero axes when inside the range
  if (xmin < 0 && xmax > 0) {
    appendf(svg,
            "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
            "stroke=\"#ccc\"/>\n",
            sx(0), top, sx(0), height - bottom);
  }
  if (ymin < 0 && ymax > 0) {
    appendf(svg,
            "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
            "stroke=\"#ccc\"/>\n",
            left, sy(0), width - right, sy(0));
  }

  appendf(svg,
          "<text x=\"%.1f\" y=\"30\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"16\">%s</text>\n",
          width / 2, escape(title).c_str());
  appendf(svg,
          "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"13\">%s</text>\n",
          width / 2, height - 20, escape(x_label).c_str());
  appendf(svg,
          "<text x=\"22\" y=\"%.1f\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"13\" "
          "transform=\"rotate(-90 22 %.1f)\">%s</text>\n",
          height / 2, height / 2, escape(y_label).c_str());

  char num[48];
  std::snprintf(num, sizeof(num), "%.2f", xmin);
  appendf(svg,
          "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" "
          "font-size=\"11\">%s</text>\n",
          left, height - bottom + 16, num);
  std::snprintf(num, sizeof(num), "%.2f", xmax);
  appendf(svg,
          "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" "
          "font-family=\"sans-serif\" font-size=\"11\">%s</text>\n",
          width - right, height - bottom + 16, num);
  std::snprintf(num, sizeof(num), "%.2f", ymin);
  appendf(svg,
          "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" "
          "font-family=\"sans-serif\" font-size=\"11\">%s</text>\n",
          left - 6, height - bottom, num);
  std::snprintf(num, sizeof(num), "%.2f", ymax);
  appendf(svg,
          "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" "
          "font-family=\"sans-serif\" font-size=\"11\">%s</text>\n",
          left - 6, top + 10, num);

  for (const auto& p : points) {
    appendf(svg,
            "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"#2266aa\"/>\n",
            sx(p.x), sy(p.y));
    if (!p.label.empty()) {
      appendf(svg,
              "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" "
              "font-size=\"11\">%s</text>\n",
              sx(p.x) + 6, sy(p.y) - 6, escape(p.label).c_str());
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace traitlab
