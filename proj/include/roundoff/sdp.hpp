#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace roundoff {

struct SdpEntry {
  int block = 0;  // 0-based
  int i = 0;      // 0-based, i <= j
  int j = 0;
  double value = 0;
};

// SDPA form. Primal: min c^T x  s.t.  sum_i F_i x_i - F_0 >= 0.
//            Dual:   max <F_0, Y>  s.t.  <F_i, Y> = c_i,  Y >= 0.
struct SdpProblem {
  std::vector<int> block_sizes;                // negative size = diagonal block
  std::vector<double> c;                       // length m
  std::vector<std::vector<SdpEntry>> F;        // F[0] .. F[m]
  // Optional partition of the constraints for the block-arrow Schur solve: constraints with the
  // same nonnegative group share no block with constraints of another group. -1 = border.
  std::vector<int> group_hint;

  int m() const { return static_cast<int>(c.size()); }
};

enum class SdpStatus { Optimal, Infeasible, NumericalTrouble, IterationLimit };
const char* status_name(SdpStatus s);

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalTrouble;
  Eigen::VectorXd x;                 // primal vector
  std::vector<Eigen::MatrixXd> X;    // primal slack sum F_i x_i - F_0 per block
  std::vector<Eigen::MatrixXd> Y;    // dual matrix per block
  double primal_objective = 0;       // c^T x
  double dual_objective = 0;         // <F_0, Y>
  double relative_gap = 0;
  double primal_infeasibility = 0;
  double dual_infeasibility = 0;
  int iterations = 0;
};

struct SdpParams {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter = 100;
  bool verbose = false;
};

SdpSolution solve(const SdpProblem& problem, const SdpParams& params = {});

// Projects the dual matrix onto {<F_i, Y> = c_i} in the least-norm sense (block-wise Frobenius).
void project_dual(const SdpProblem& problem, std::vector<Eigen::MatrixXd>& Y);

// SDPA sparse input format (.dat-s).
std::string export_sdpa_sparse(const SdpProblem& problem);
SdpProblem import_sdpa_sparse(const std::string& text);

// SDPA result format (phase, objective values, xVec, xMat, yMat).
std::string write_sdpa_result(const SdpSolution& sol, const SdpProblem& problem);
SdpSolution parse_sdpa_solution(const std::string& text, const SdpProblem* problem = nullptr);

// Dense block matrices of F_k (0 <= k <= m).
std::vector<Eigen::MatrixXd> dense_matrix(const SdpProblem& problem, int k);

}  // namespace roundoff
