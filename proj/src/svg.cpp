#include "crosstab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace crosstab::svg {

std::string fmt(double value, int precision) {
  if (!std::isfinite(value)) return "0";
  if (value == 0.0) value = 0.0;  // normalize -0
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", precision, value);
  std::string out(buffer);
  if (out.find('.') != std::string::npos) {
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  if (out == "-0") out = "0";
  return out;
}

std::string escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string diverging_color(double value, double limit) {
  const double t = std::clamp(value / limit, -1.0, 1.0);
  int r = 255, g = 255, b = 255;
  if (t > 0) {
    g = b = static_cast<int>(std::lround(255.0 * (1.0 - t * 0.85)));
  } else if (t < 0) {
    r = g = static_cast<int>(std::lround(255.0 * (1.0 + t * 0.85)));
  }
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "#%02x%02x%02x", r, g, b);
  return buffer;
}

Document::Document(double width, double height) {
  body_ = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) +
          "\" height=\"" + fmt(height) + "\" viewBox=\"0 0 " + fmt(width) +
          " " + fmt(height) + "\">\n";
  body_ += "<rect x=\"0\" y=\"0\" width=\"" + fmt(width) + "\" height=\"" +
           fmt(height) + "\" fill=\"white\"/>\n";
}

void Document::line(double x1, double y1, double x2, double y2,
                    const std::string& attrs) {
  body_ += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" +
           fmt(x2) + "\" y2=\"" + fmt(y2) + "\" " + attrs + "/>\n";
}

void Document::rect(double x, double y, double w, double h,
                    const std::string& attrs) {
  body_ += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" +
           fmt(w) + "\" height=\"" + fmt(h) + "\" " + attrs + "/>\n";
}

void Document::circle(double cx, double cy, double r,
                      const std::string& attrs) {
  body_ += "<circle cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) + "\" r=\"" +
           fmt(r) + "\" " + attrs + "/>\n";
}

void Document::text(double x, double y, const std::string& content,
                    const std::string& attrs) {
  body_ += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" " + attrs + ">" +
           escape(content) + "</text>\n";
}

void Document::raw(const std::string& markup) { body_ += markup; }

std::string Document::str() const { return body_ + "</svg>\n"; }

}  // namespace crosstab::svg
