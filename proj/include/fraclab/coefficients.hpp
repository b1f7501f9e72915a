#pragma once

#include <array>
#include <functional>
#include <string>

#include "fraclab/mesh.hpp"

namespace fraclab {

// Symmetric 2x2 storage; for n = 1 only a11 is used.
struct CoefficientValue {
  double a11 = 1.0;
  double a12 = 0.0;
  double a22 = 1.0;
};

enum class ContinuityTag { Constant, Holder, Sampled };

// Coefficient matrix a^{ij}(x) of L = -a^{ij} d_ij.
class CoefficientField {
 public:
  using Evaluator = std::function<CoefficientValue(double x1, double x2)>;

  CoefficientField(int dimension, Evaluator eval, double lambda, double Lambda,
                   ContinuityTag tag, std::string name);

  static CoefficientField identity(int dimension);
  static CoefficientField constant(int dimension, CoefficientValue a, double lambda,
                                   double Lambda);

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] CoefficientValue operator()(double x1, double x2 = 0.0) const {
    return eval_(x1, x2);
  }
  [[nodiscard]] double lambda() const noexcept { return lambda_; }
  [[nodiscard]] double Lambda() const noexcept { return Lambda_; }
  [[nodiscard]] ContinuityTag tag() const noexcept { return tag_; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] bool is_identity() const noexcept { return name_ == "identity"; }

  // Eigenvalues of a(x) at every mesh node within [lambda, Lambda]
  // (relative slack 1e-12).  Throws std::invalid_argument naming the node.
  void check_ellipticity(const TensorMesh& mesh) const;

 private:
  int dim_;
  Evaluator eval_;
  double lambda_;
  double Lambda_;
  ContinuityTag tag_;
  std::string name_;
};

}  // namespace fraclab
