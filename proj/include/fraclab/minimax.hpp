#pragma once

#include <Eigen/Dense>

namespace fraclab {

struct MinimaxFit {
  Eigen::VectorXd coef;
  double sup_error = 0.0;     // max |A coef - y| over all rows
  double ls_sup_error = 0.0;  // same for the plain least-squares fit
  int iterations = 0;         // Lawson sweeps, summed over exchange rounds
  int rounds = 0;             // exchange rounds (1 when all rows fit at once)
};

// Best uniform approximation of y by the columns of A.  Lawson's iteratively
// reweighted least squares runs on a working set of rows; rows whose
// residual exceeds the working-set optimum are added until none remain.
// Each Lawson run stops when the sup error stalls to a relative `tol`.
MinimaxFit minimax_fit(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, int max_iterations = 2000,
                       double tol = 1e-12);

}  // namespace fraclab
