#include "emvar/markov.hpp"

#include "emvar/errors.hpp"

#include <cmath>

namespace emvar {

void check_switch(const SwitchProblem& p) {
  if (p.loglik.cols() != 2 || p.loglik.rows() < 1) {
    throw ValidationError("switching log-likelihood must be T x 2 with T >= 1");
  }
  for (int a = 0; a < 2; ++a) {
    const double s = p.transition(a, 0) + p.transition(a, 1);
    if (!(p.transition(a, 0) > 0.0 && p.transition(a, 0) < 1.0) ||
        !(p.transition(a, 1) > 0.0 && p.transition(a, 1) < 1.0) || std::abs(s - 1.0) > 1e-12) {
      throw ValidationError("transition matrix rows must lie in (0,1) and sum to one");
    }
  }
  if (p.loglik.array().isNaN().any()) throw NumericalError("switching log-likelihood has NaN");
}

Eigen::Vector2d stationary_distribution(const Eigen::Matrix2d& P) {
  const double leave0 = P(0, 1);
  const double leave1 = P(1, 0);
  const double p1 = leave0 / (leave0 + leave1);
  return {1.0 - p1, p1};
}

SwitchFilter hamilton_filter(const SwitchProblem& p) {
  check_switch(p);
  const Eigen::Index T = p.loglik.rows();
  SwitchFilter f;
  f.predicted.resize(T, 2);
  f.filtered.resize(T, 2);
  Eigen::Vector2d pred = stationary_distribution(p.transition);
  for (Eigen::Index t = 0; t < T; ++t) {
    f.predicted.row(t) = pred.transpose();
    const double top = p.loglik.row(t).maxCoeff();
    if (!std::isfinite(top)) throw NumericalError("switching log-likelihood not finite");
    Eigen::Vector2d post;
    for (int s = 0; s < 2; ++s) post[s] = pred[s] * std::exp(p.loglik(t, s) - top);
    post /= post.sum();
    f.filtered.row(t) = post.transpose();
    pred = p.transition.transpose() * post;
  }
  return f;
}

Eigen::MatrixXd smoothed_probabilities(const SwitchProblem& p) {
  const SwitchFilter f = hamilton_filter(p);
  const Eigen::Index T = p.loglik.rows();
  Eigen::MatrixXd s(T, 2);
  s.row(T - 1) = f.filtered.row(T - 1);
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    for (int a = 0; a < 2; ++a) {
      double acc = 0.0;
      for (int b = 0; b < 2; ++b) acc += p.transition(a, b) * s(t + 1, b) / f.predicted(t + 1, b);
      s(t, a) = f.filtered(t, a) * acc;
    }
    s.row(t) /= s.row(t).sum();
  }
  return s;
}

Eigen::VectorXi kim_sample_path(const SwitchProblem& p, RngStream& rng) {
  const SwitchFilter f = hamilton_filter(p);
  const Eigen::Index T = p.loglik.rows();
  Eigen::VectorXi path(T);
  path[T - 1] = rng.uniform() < f.filtered(T - 1, 1) ? 1 : 0;
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    const int next = path[t + 1];
    const double w0 = f.filtered(t, 0) * p.transition(0, next);
    const double w1 = f.filtered(t, 1) * p.transition(1, next);
    path[t] = rng.uniform() * (w0 + w1) < w1 ? 1 : 0;
  }
  return path;
}

TransitionCounts count_transitions(const Eigen::VectorXi& path) {
  TransitionCounts c;
  for (Eigen::Index t = 1; t < path.size(); ++t) {
    const int from = path[t - 1];
    const int to = path[t];
    if (from == 0) (to == 0 ? c.n00 : c.n01)++;
    else (to == 0 ? c.n10 : c.n11)++;
  }
  return c;
}

BetaParams stay_conditional(int regime, const TransitionCounts& c, const TransitionPrior& prior) {
  if (regime == 0) {
    return {prior.e00 + static_cast<double>(c.n00), prior.e01 + static_cast<double>(c.n01)};
  }
  return {prior.e10 + static_cast<double>(c.n11), prior.e11 + static_cast<double>(c.n10)};
}

Eigen::Matrix2d update_transition_probs(const Eigen::VectorXi& path, const TransitionPrior& prior,
                                        RngStream& rng) {
  if (path.size() < 2) throw ValidationError("transition update needs a path of length >= 2");
  const TransitionCounts c = count_transitions(path);
  const BetaParams b0 = stay_conditional(0, c, prior);
  const BetaParams b1 = stay_conditional(1, c, prior);
  const double p00 = sample_beta(b0.a, b0.b, rng);
  const double p11 = sample_beta(b1.a, b1.b, rng);
  Eigen::Matrix2d P;
  P << p00, 1.0 - p00, 1.0 - p11, p11;
  return P;
}

}  // namespace emvar
