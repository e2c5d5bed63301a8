#pragma once

#include <string>

namespace crosstab::svg {

// Fixed-precision decimal with trailing zeros trimmed; locale independent,
// so identical input always renders identical markup.
std::string fmt(double value, int precision = 2);

std::string escape(const std::string& text);

// Diverging blue-white-red fill for values in [-limit, limit]; clamps.
std::string diverging_color(double value, double limit);

class Document {
 public:
  Document(double width, double height);

  void line(double x1, double y1, double x2, double y2,
            const std::string& attrs);
  void rect(double x, double y, double w, double h, const std::string& attrs);
  void circle(double cx, double cy, double r, const std::string& attrs);
  void text(double x, double y, const std::string& content,
            const std::string& attrs);
  void raw(const std::string& markup);

  std::string str() const;

 private:
  std::string body_;
};

}  // namespace crosstab::svg
