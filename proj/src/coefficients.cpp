#include "fraclab/coefficients.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fraclab {

CoefficientField::CoefficientField(int dimension, Evaluator eval, double lambda, double Lambda,
                                   ContinuityTag tag, std::string name)
    : dim_(dimension),
      eval_(std::move(eval)),
      lambda_(lambda),
      Lambda_(Lambda),
      tag_(tag),
      name_(std::move(name)) {
  if (dim_ != 1 && dim_ != 2) throw std::invalid_argument("CoefficientField: dimension 1 or 2");
  if (!(lambda_ > 0.0 && Lambda_ >= lambda_))
    throw std::invalid_argument("CoefficientField: need 0 < lambda <= Lambda");
}

CoefficientField CoefficientField::identity(int dimension) {
  return {dimension, [](double, double) { return CoefficientValue{}; }, 1.0, 1.0,
          ContinuityTag::Constant, "identity"};
}

CoefficientField CoefficientField::constant(int dimension, CoefficientValue a, double lambda,
                                            double Lambda) {
  return {dimension, [a](double, double) { return a; }, lambda, Lambda, ContinuityTag::Constant,
          "constant"};
}

void CoefficientField::check_ellipticity(const TensorMesh& mesh) const {
  const double slack = 1e-12 * Lambda_;
  for (std::size_t idx = 0; idx < mesh.size(); ++idx) {
    const auto p = mesh.point(idx);
    const auto a = eval_(p[0], p[1]);
    double emin, emax;
    if (dim_ == 1) {
      emin = emax = a.a11;
    } else {
      const double tr = 0.5 * (a.a11 + a.a22);
      const double disc = std::sqrt(0.25 * (a.a11 - a.a22) * (a.a11 - a.a22) + a.a12 * a.a12);
      emin = tr - disc;
      emax = tr + disc;
    }
    if (!(emin >= lambda_ - slack && emax <= Lambda_ + slack)) {
      std::ostringstream os;
      os << "coefficient field '" << name_ << "' violates ellipticity at node " << idx << " (x=("
         << p[0] << "," << p[1] << ")): eigenvalues [" << emin << "," << emax << "] not in ["
         << lambda_ << "," << Lambda_ << "]";
      throw std::invalid_argument(os.str());
    }
  }
}

}  // namespace fraclab
