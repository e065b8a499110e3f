#include "ddc/oracles.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ddc/errors.hpp"
#include "ddc/model.hpp"

namespace ddc {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << " must be square and nonempty, got " << m.rows() << "x"
       << m.cols();
    throw ValidationError(os.str());
  }
}

bool is_symmetric(const Matrix& m) {
  return (m - m.transpose()).norm() <= 1e-12 * std::max(1.0, m.norm());
}

}  // namespace

void require_positive_definite(const Matrix& m, const char* what) {
  require_square(m, what);
  if (!all_finite(m) || !is_symmetric(m)) {
    throw ValidationError(std::string(what) + " must be symmetric");
  }
  const double lmin =
      Eigen::SelfAdjointEigenSolver<Matrix>(symmetrize(m)).eigenvalues()(0);
  if (!(lmin > 0.0)) {
    std::ostringstream os;
    os << what << " must be positive definite (smallest eigenvalue " << lmin
       << ")";
    throw ValidationError(os.str());
  }
}

Matrix solve_lyapunov_direct(const Matrix& A, const Matrix& Q) {
  require_square(A, "A");
  if (Q.rows() != A.rows() || Q.cols() != A.cols()) {
    throw ValidationError("solve_lyapunov_direct: Q does not match A");
  }
  const Eigen::Index n = A.rows();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix At = A.transpose();
  const Matrix K = kron(I, At) + kron(At, I);
  Eigen::FullPivLU<Matrix> lu(K);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) {
    throw NumericalError(
        "solve_lyapunov_direct: singular Kronecker system; A has eigenvalues "
        "with lambda_i + lambda_j = 0");
  }
  const Vector rhs = -vec(Q);
  Vector p = lu.solve(rhs);
  p += lu.solve(rhs - K * p);
  Matrix P = mat(p, n, n);
  if (is_symmetric(Q)) P = symmetrize(P);
  if (!all_finite(P)) {
    throw NumericalError("solve_lyapunov_direct: non-finite solution");
  }
  return P;
}

double riccati_residual(const Matrix& A, const Matrix& D, const Matrix& Q,
                        const Matrix& P) {
  Matrix r = A.transpose() * P + P * A + Q;
  if (D.size() > 0) r -= P * D * P;
  return r.norm();
}

double lyapunov_residual(const Matrix& A, const Matrix& Q, const Matrix& P) {
  return (A.transpose() * P + P * A + Q).norm();
}

Matrix input_weight(const Matrix& B, const Matrix& R) {
  if (B.cols() == 0) return Matrix::Zero(B.rows(), B.rows());
  require_positive_definite(R, "R");
  if (R.rows() != B.cols()) {
    std::ostringstream os;
    os << "R is " << R.rows() << "x" << R.cols() << " but B has " << B.cols()
       << " columns";
    throw ValidationError(os.str());
  }
  return symmetrize(B * Eigen::LLT<Matrix>(R).solve(B.transpose()));
}

AreSolution solve_are_newton(const Matrix& A, const Matrix& B, const Matrix& Q,
                             const Matrix& R, const Matrix* K0) {
  require_square(A, "A");
  const Eigen::Index n = A.rows();
  if (B.rows() != n) throw ValidationError("solve_are_newton: B rows != n");
  require_positive_definite(Q, "Q");
  if (Q.rows() != n) throw ValidationError("solve_are_newton: Q is not n x n");
  const Matrix D = input_weight(B, R);
  const Eigen::Index m = B.cols();

  AreSolution sol;
  if (m == 0) {
    if (!hurwitz(A)) {
      throw NumericalError(
          "solve_are_newton: no inputs and A is not Hurwitz; no stabilizing "
          "solution");
    }
    sol.P = solve_lyapunov_direct(A, Q);
    sol.K = Matrix::Zero(0, n);
    sol.residual = lyapunov_residual(A, Q, sol.P);
    sol.trace_history.push_back(sol.P.trace());
    return sol;
  }

  const Eigen::LLT<Matrix> r_llt(R);
  Matrix K;
  if (K0 != nullptr) {
    if (K0->rows() != m || K0->cols() != n) {
      throw ValidationError("solve_are_newton: K0 must be m x n");
    }
    K = *K0;
  } else if (hurwitz(A)) {
    K = Matrix::Zero(m, n);
  } else {
    const double s = norm2(A) + 1.0;
    const Matrix shifted = -(A + s * Matrix::Identity(n, n)).transpose();
    const Matrix Z = solve_lyapunov_direct(shifted, 2.0 * D);
    Eigen::LDLT<Matrix> z_ldlt(Z);
    if (z_ldlt.info() != Eigen::Success || !z_ldlt.isPositive() ||
        Eigen::SelfAdjointEigenSolver<Matrix>(Z).eigenvalues()(0) <= 1e-12) {
      throw NumericalError(
          "solve_are_newton: shifted Gramian is singular ((A, B) not "
          "controllable); supply a stabilizing K0");
    }
    K = -r_llt.solve(B.transpose() * Z.inverse());
  }
  if (!hurwitz(A + B * K)) {
    throw NumericalError("solve_are_newton: initial gain is not stabilizing");
  }

  constexpr int kMaxIterations = 60;
  // Stop when the iterate settles or when the residual has not improved for
  // kStall iterations (round-off floor); keep the best iterate seen.
  constexpr int kStall = 3;
  Matrix P_prev;
  double best = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 1; it <= kMaxIterations; ++it) {
    const Matrix Acl = A + B * K;
    if (!hurwitz(Acl)) {
      throw NumericalError(
          "solve_are_newton: closed loop lost stability during iteration",
          sol.trace_history);
    }
    Matrix P = solve_lyapunov_direct(
        Acl, symmetrize(Q + K.transpose() * R * K));
    const Matrix K_next = -r_llt.solve(B.transpose() * P);
    sol.trace_history.push_back(P.trace());
    sol.iterations = it;
    const bool settled =
        it > 1 && (P - P_prev).norm() <= 1e-13 * std::max(1.0, P.norm());
    const double residual = riccati_residual(A, D, Q, P);
    if (residual < best) {
      best = residual;
      sol.P = P;
      sol.K = K_next;
      stalled = 0;
    } else {
      ++stalled;
    }
    P_prev = std::move(P);
    K = K_next;
    if (settled || stalled >= kStall) break;
  }
  sol.residual = best;
  const double scale =
      std::max(1.0, Q.norm() + (sol.P * D * sol.P).norm());
  if (!(sol.residual <= 1e-10 * scale)) {
    std::ostringstream os;
    os << "solve_are_newton: residual " << sol.residual << " above "
       << 1e-10 * scale << " after " << sol.iterations << " iterations";
    throw NumericalError(os.str(), sol.trace_history);
  }
  return sol;
}

double lqr_cost(const Matrix& A, const Matrix& B, const Matrix& K,
                const Matrix& Q, const Matrix& R) {
  require_square(A, "A");
  const Eigen::Index n = A.rows();
  Matrix Acl = A;
  Matrix weight = Q;
  if (B.cols() > 0) {
    if (K.rows() != B.cols() || K.cols() != n) {
      throw ValidationError("lqr_cost: K must be m x n");
    }
    Acl += B * K;
    weight += K.transpose() * R * K;
  }
  if (!hurwitz(Acl)) {
    throw ValidationError("lqr_cost: closed loop A + B K is not Hurwitz");
  }
  const Matrix W =
      solve_lyapunov_direct(Acl.transpose(), Matrix::Identity(n, n));
  return (weight * W).trace();
}

}  // namespace ddc
