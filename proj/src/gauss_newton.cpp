#include "acetrec/gauss_newton.hpp"

#include "acetrec/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>
#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <optional>

namespace acetrec {

void GaussNewtonConfig::validate() const {
  if (max_iterations < 1) throw ParameterError("GN max_iterations must be >= 1");
  if (!(tolerance > 0.0)) throw ParameterError("GN tolerance must be positive");
  if (!(lambda0 > 0.0) || !(lambda_max > lambda0)) throw ParameterError("GN damping range is invalid");
  if (dense_node_limit < 0) throw ParameterError("dense_node_limit must be nonnegative");
}

namespace {

// Damped normal-equation solver; factors H + lambda I per call, reusing the
// sparse pattern analysis.
class NormalSolver {
 public:
  NormalSolver(const Eigen::SparseMatrix<double>& H, bool dense) : dense_(dense), H_(H) {
    if (dense_) {
      Hd_ = Eigen::MatrixXd(H);
    } else {
      sparse_.analyzePattern(H_);
    }
  }

  std::optional<Eigen::VectorXd> solve(const Eigen::VectorXd& rhs, double lambda) {
    if (dense_) {
      Eigen::MatrixXd A = Hd_;
      A.diagonal().array() += lambda;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
      Eigen::VectorXd x = ldlt.solve(rhs);
      if (!x.allFinite()) return std::nullopt;
      return x;
    }
    Eigen::SparseMatrix<double> A = H_;
    for (Eigen::Index i = 0; i < A.rows(); ++i) A.coeffRef(i, i) += lambda;
    sparse_.factorize(A);
    if (sparse_.info() != Eigen::Success) return std::nullopt;
    Eigen::VectorXd x = sparse_.solve(rhs);
    if (!x.allFinite()) return std::nullopt;
    return x;
  }

 private:
  bool dense_;
  Eigen::SparseMatrix<double> H_;
  Eigen::MatrixXd Hd_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> sparse_;
};

Eigen::SparseMatrix<double> normal_matrix(const Eigen::SparseMatrix<double>& J) {
  Eigen::SparseMatrix<double> H = (J.transpose() * J).pruned();
  // Every diagonal entry must exist so damping can be added in place.
  Eigen::SparseMatrix<double> I(H.rows(), H.cols());
  I.setIdentity();
  H += 0.0 * I;
  H.makeCompressed();
  return H;
}

}  // namespace

GaussNewtonResult gauss_newton_solve(const DeformationGraph& graph, const Mesh& mesh, const CorrespondenceSet& corrs,
                                     const std::vector<View>& views, const EnergyWeights& weights,
                                     const GaussNewtonConfig& cfg) {
  cfg.validate();
  weights.validate();
  const bool dense = cfg.solver == LinearSolverKind::Dense ||
                     (cfg.solver == LinearSolverKind::Auto &&
                      static_cast<int>(graph.node_count()) <= cfg.dense_node_limit);

  GaussNewtonResult out;
  out.graph = graph;
  Eigen::VectorXd x = flatten_params(graph);
  Eigen::VectorXd r;
  Eigen::SparseMatrix<double> J;
  linearize(out.graph, mesh, corrs, views, weights, r, &J);
  double cost = r.squaredNorm();
  out.cost_trace.push_back(cost);
  double lambda = cfg.lambda0;

  DeformationGraph trial = out.graph;
  while (out.iterations < cfg.max_iterations) {
    if (cost == 0.0) {
      out.converged = true;
      break;
    }
    const Eigen::VectorXd g = J.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + cost)) {
      out.converged = true;
      break;
    }
    NormalSolver solver(normal_matrix(J), dense);

    bool accepted = false;
    bool at_minimum = false;
    double trial_cost = cost;
    Eigen::VectorXd trial_r;
    while (!accepted) {
      const auto delta = solver.solve(-g, lambda);
      if (delta) {
        unflatten_params(trial, x + *delta);
        try {
          trial_r = stacked_residuals(trial, mesh, corrs, views, weights);
          trial_cost = trial_r.squaredNorm();
        } catch (const ProjectionError&) {
          trial_cost = std::numeric_limits<double>::infinity();
        }
        if (trial_cost < cost) {
          accepted = true;
          x += *delta;
          break;
        }
        // A rejected step whose cost matches to rounding means there is
        // nothing left to gain.
        if (trial_cost <= cost * (1.0 + 1e-12) || delta->norm() <= 1e-14 * (1.0 + x.norm())) {
          at_minimum = true;
          break;
        }
      }
      ++out.rejections;
      lambda *= 10.0;
      if (lambda > cfg.lambda_max) {
        throw SolverStallError(fmt::format(
            "no descent step after damping reached {:.3g} (cost {:.6g}, gradient max {:.3g}, {} accepted steps)",
            lambda, cost, g.lpNorm<Eigen::Infinity>(), out.iterations));
      }
    }
    if (at_minimum) {
      out.converged = true;
      break;
    }

    lambda = std::max(lambda / 10.0, 1e-12);
    ++out.iterations;
    const double decrease = (cost - trial_cost) / cost;
    cost = trial_cost;
    out.cost_trace.push_back(cost);
    unflatten_params(out.graph, x);
    if (decrease < cfg.tolerance) {
      out.converged = true;
      break;
    }
    linearize(out.graph, mesh, corrs, views, weights, r, &J);
  }
  out.lambda = lambda;
  return out;
}

}  // namespace acetrec
