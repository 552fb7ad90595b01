#pragma once
// Arithmetic expressions over t, y1..yn, z1..zn (and s inside memory kernels)
// with +, -, *, /, sin, cos, exp and the constant pi.

#include "orps/types.hpp"

#include <memory>
#include <string>

namespace orps::app {

class Expression {
 public:
  /// Throws Error(ConfigParse) with the column of the offending token.
  static Expression parse(const std::string& source, int dim, bool allow_s = false);

  double operator()(double t, const Vector& y, const Vector& z, double s = 0.0) const;
  const std::string& source() const { return source_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

}  // namespace orps::app
