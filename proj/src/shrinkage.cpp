#include "emvar/shrinkage.hpp"

#include "emvar/errors.hpp"

#include <cmath>

namespace emvar {

HorseshoeState HorseshoeState::single_group(Eigen::Index n) {
  HorseshoeState s;
  s.local = Eigen::VectorXd::Ones(n);
  s.local_aux = Eigen::VectorXd::Ones(n);
  s.global = Eigen::VectorXd::Ones(n > 0 ? 1 : 0);
  s.global_aux = Eigen::VectorXd::Ones(n > 0 ? 1 : 0);
  s.group.assign(static_cast<std::size_t>(n), 0);
  return s;
}

HorseshoeState HorseshoeState::column_groups(Eigen::Index rows, Eigen::Index cols) {
  HorseshoeState s;
  s.local = Eigen::VectorXd::Ones(rows * cols);
  s.local_aux = Eigen::VectorXd::Ones(rows * cols);
  s.global = Eigen::VectorXd::Ones(cols);
  s.global_aux = Eigen::VectorXd::Ones(cols);
  s.group.resize(static_cast<std::size_t>(rows * cols));
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) s.group[static_cast<std::size_t>(c * rows + r)] = c;
  }
  return s;
}

InverseGammaParams local_scale_conditional(double b, double global, double local_aux) {
  return {1.0, 1.0 / local_aux + b * b / (2.0 * global)};
}

InverseGammaParams global_scale_conditional(const Eigen::Ref<const Eigen::VectorXd>& b,
                                            const Eigen::Ref<const Eigen::VectorXd>& local,
                                            double global_aux) {
  const double n = static_cast<double>(b.size());
  return {(n + 1.0) / 2.0, 1.0 / global_aux + (b.array().square() / (2.0 * local.array())).sum()};
}

InverseGammaParams local_aux_conditional(double local) { return {1.0, 1.0 + 1.0 / local}; }

InverseGammaParams global_aux_conditional(double global) { return {1.0, 1.0 + 1.0 / global}; }

void check_horseshoe(const HorseshoeState& s) {
  const auto n = s.local.size();
  if (s.local_aux.size() != n || static_cast<Eigen::Index>(s.group.size()) != n ||
      s.global_aux.size() != s.global.size()) {
    throw ValidationError("horseshoe state has inconsistent sizes");
  }
  for (auto g : s.group) {
    if (g < 0 || g >= s.global.size()) throw ValidationError("horseshoe group index out of range");
  }
  const auto positive = [](const Eigen::VectorXd& v) {
    return v.allFinite() && (v.array() > 0.0).all();
  };
  if (!positive(s.local) || !positive(s.local_aux) || !positive(s.global) ||
      !positive(s.global_aux)) {
    throw ValidationError("horseshoe scales must be finite and positive");
  }
}

void update_horseshoe(const Eigen::Ref<const Eigen::VectorXd>& b, HorseshoeState& s,
                      RngStream& rng, double cap) {
  if (b.size() != s.size()) throw ValidationError("coefficient count differs from horseshoe size");
  if (!b.allFinite()) throw NumericalError("horseshoe update received non-finite coefficients");
  const double cap2 = cap * cap;
  const Eigen::Index n = s.size();

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto p = local_scale_conditional(b[i], s.global[s.group[i]], s.local_aux[i]);
    s.local[i] = sample_inverse_gamma_bounded(p.shape, p.scale, cap2, rng);
  }
  for (Eigen::Index g = 0; g < s.groups(); ++g) {
    double shape = 0.5;
    double scale = 1.0 / s.global_aux[g];
    for (Eigen::Index i = 0; i < n; ++i) {
      if (s.group[i] != g) continue;
      shape += 0.5;
      scale += b[i] * b[i] / (2.0 * s.local[i]);
    }
    s.global[g] = sample_inverse_gamma_bounded(shape, scale, cap2, rng);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto p = local_aux_conditional(s.local[i]);
    s.local_aux[i] = sample_inverse_gamma(p.shape, p.scale, rng);
  }
  for (Eigen::Index g = 0; g < s.groups(); ++g) {
    const auto p = global_aux_conditional(s.global[g]);
    s.global_aux[g] = sample_inverse_gamma(p.shape, p.scale, rng);
  }
}

Eigen::VectorXd prior_variance_for(const HorseshoeState& s) {
  Eigen::VectorXd out(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) out[i] = s.local[i] * s.global[s.group[i]];
  return out;
}

void draw_horseshoe_prior(HorseshoeState& s, double cap, RngStream& rng) {
  for (Eigen::Index g = 0; g < s.groups(); ++g) {
    const double d = sample_half_cauchy(cap, rng);
    s.global[g] = d * d;
    const auto p = global_aux_conditional(s.global[g]);
    s.global_aux[g] = sample_inverse_gamma(p.shape, p.scale, rng);
  }
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double c = sample_half_cauchy(cap, rng);
    s.local[i] = c * c;
    const auto p = local_aux_conditional(s.local[i]);
    s.local_aux[i] = sample_inverse_gamma(p.shape, p.scale, rng);
  }
}

}  // namespace emvar
