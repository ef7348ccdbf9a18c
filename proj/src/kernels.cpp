#include "kernels.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

namespace polarflow::detail {

KernelTable::KernelTable(const ModelParams& params) : params_(params) {
  const double s2 = params.sigma() * params.sigma();
  const double s02 = params.sigma0() * params.sigma0();
  const int n = params.n_parties();
  inv_two_sigma2_ = 1.0 / (2.0 * s2);
  scale_.resize(n + 1);
  mean_coef_.resize(n + 1);
  for (int m = 1; m <= n; ++m) {
    scale_[m] = params.sigma() / std::sqrt(s2 + m * s02);
    mean_coef_[m] = 1.0 / (s2 + m * s02);
  }
  single_scale_ = scale_[1];
  single_coef_ = mean_coef_[1];
  pair_scale_ = scale_[2];
  pair_diff_coef_ = 1.0 / (4.0 * s2);
  pair_sum_coef_ = 1.0 / (4.0 * (s2 + 2.0 * s02));
  pair_grad_sum_coef_ = 1.0 / (2.0 * (s2 + 2.0 * s02));
  triple_scale_ = params.sigma() / std::sqrt(s2 + 3.0 * s02);
  triple_beta_ = 1.0 / (6.0 * s2) - 1.0 / (6.0 * (s2 + 3.0 * s02));
  triple_gamma_ = triple_beta_ - inv_two_sigma2_;
}

double KernelTable::single(double a) const {
  return single_scale_ * std::exp(-0.5 * a * a * single_coef_);
}

double KernelTable::single_grad(double a) const {
  return -a * single_coef_ * single(a);
}

double KernelTable::pair(double a, double b) const {
  const double d = a - b;
  const double s = a + b;
  return pair_scale_ * std::exp(-d * d * pair_diff_coef_ - s * s * pair_sum_coef_);
}

double KernelTable::pair_grad(double a, double b) const {
  const double d = a - b;
  const double s = a + b;
  return pair(a, b) * (-d * 2.0 * pair_diff_coef_ - s * pair_grad_sum_coef_);
}

double KernelTable::integral(std::span<const double> ys) const {
  const std::size_t m = ys.size();
  if (m == 1) return single(ys[0]);
  if (m == 2) return pair(ys[0], ys[1]);
  double mean = 0.0;
  for (double y : ys) mean += y;
  mean /= static_cast<double>(m);
  double dev = 0.0;
  for (double y : ys) dev += (y - mean) * (y - mean);
  return scale_[m] *
         std::exp(-dev * inv_two_sigma2_ - 0.5 * m * mean * mean * mean_coef_[m]);
}

double KernelTable::integral_grad(std::span<const double> ys) const {
  const std::size_t m = ys.size();
  if (m == 1) return single_grad(ys[0]);
  if (m == 2) return pair_grad(ys[0], ys[1]);
  double mean = 0.0;
  for (double y : ys) mean += y;
  mean /= static_cast<double>(m);
  return integral(ys) *
         (-(ys[0] - mean) * 2.0 * inv_two_sigma2_ - mean * mean_coef_[m]);
}

void triple_means(const KernelTable& table, std::span<const double> a,
                  std::span<const double> b, std::span<const double> c,
                  std::span<double> value_out, std::span<double> grad_out) {
  using Eigen::Index;
  using Matrix = Eigen::MatrixXd;
  const double beta2 = 2.0 * table.triple_beta();
  const double h = 0.5 * table.triple_gamma();
  const Index na = static_cast<Index>(a.size());
  const Index nb = static_cast<Index>(b.size());
  const Index nc = static_cast<Index>(c.size());

  // Each factor is a negative semi-definite quadratic form, so entries are <= 1.
  Matrix u(na, nb), v(na, nc), coupling(nb, nc);
  for (Index s = 0; s < nb; ++s)
    for (Index r = 0; r < na; ++r)
      u(r, s) = std::exp(h * a[r] * a[r] + h * b[s] * b[s] + beta2 * a[r] * b[s]);
  for (Index s = 0; s < nc; ++s)
    for (Index r = 0; r < na; ++r)
      v(r, s) = std::exp(h * a[r] * a[r] + h * c[s] * c[s] + beta2 * a[r] * c[s]);
  for (Index s = 0; s < nc; ++s)
    for (Index r = 0; r < nb; ++r)
      coupling(r, s) = std::exp(h * b[r] * b[r] + h * c[s] * c[s] + beta2 * b[r] * c[s]);

  const Eigen::Map<const Eigen::VectorXd> bv(b.data(), nb);
  const Eigen::Map<const Eigen::VectorXd> cv(c.data(), nc);
  const Matrix w = u * coupling;
  const Matrix wb = (u.array().rowwise() * bv.transpose().array()).matrix() * coupling;
  const Eigen::ArrayXXd wv = w.array() * v.array();
  const Eigen::VectorXd t0 = wv.rowwise().sum();
  const Eigen::VectorXd tc = wv.matrix() * cv;
  const Eigen::VectorXd tb = (wb.array() * v.array()).rowwise().sum();

  const double norm = table.triple_scale() / (static_cast<double>(nb) * static_cast<double>(nc));
  const double gamma2 = 2.0 * table.triple_gamma();
  for (Index r = 0; r < na; ++r) {
    if (!value_out.empty()) value_out[r] = norm * t0[r];
    if (!grad_out.empty())
      grad_out[r] = norm * (gamma2 * a[r] * t0[r] + beta2 * (tb[r] + tc[r]));
  }
}

namespace {

void accumulate_tuples(const KernelTable& table,
                       std::span<const std::span<const double>> members,
                       std::vector<double>& ys, std::size_t depth,
                       double& value_sum, double& grad_sum, bool want_value) {
  if (depth == members.size()) {
    grad_sum += table.integral_grad(ys);
    if (want_value) value_sum += table.integral(ys);
    return;
  }
  for (double y : members[depth]) {
    ys[depth + 1] = y;
    accumulate_tuples(table, members, ys, depth + 1, value_sum, grad_sum, want_value);
  }
}

void field_chunk(const KernelTable& table,
                 std::span<const std::span<const double>> parties, int party_index,
                 std::size_t lo, std::size_t hi, bool want_value, PartyField& out) {
  const ModelParams& params = table.params();
  const int n = params.n_parties();
  std::vector<int> opponents;
  for (int j = 0; j < n; ++j)
    if (j != party_index) opponents.push_back(j);
  const std::span<const double> own = parties[party_index].subspan(lo, hi - lo);

  std::vector<double> tmp_value(own.size()), tmp_grad(own.size());
  const unsigned subset_count = 1u << opponents.size();
  for (unsigned mask = 0; mask < subset_count; ++mask) {
    const int m = std::popcount(mask);
    const double coef = params.monomial_coefficient(m);
    if (coef == 0.0) continue;
    std::vector<std::span<const double>> members;
    for (std::size_t t = 0; t < opponents.size(); ++t)
      if (mask & (1u << t)) members.push_back(parties[opponents[t]]);

    if (m == 0) {
      for (std::size_t r = 0; r < own.size(); ++r) {
        out.grad[lo + r] += coef * table.single_grad(own[r]);
        if (want_value) out.value[lo + r] += coef * table.single(own[r]);
      }
    } else if (m == 1) {
      const auto other = members[0];
      const double count = static_cast<double>(other.size());
      for (std::size_t r = 0; r < own.size(); ++r) {
        double gsum = 0.0, vsum = 0.0;
        for (double y : other) {
          gsum += table.pair_grad(own[r], y);
          if (want_value) vsum += table.pair(own[r], y);
        }
        out.grad[lo + r] += coef * (gsum / count);
        if (want_value) out.value[lo + r] += coef * (vsum / count);
      }
    } else if (m == 2) {
      triple_means(table, own, members[0], members[1],
                   want_value ? std::span<double>(tmp_value) : std::span<double>(),
                   tmp_grad);
      for (std::size_t r = 0; r < own.size(); ++r) {
        out.grad[lo + r] += coef * tmp_grad[r];
        if (want_value) out.value[lo + r] += coef * tmp_value[r];
      }
    } else {
      double count = 1.0;
      for (auto member : members) count *= static_cast<double>(member.size());
      std::vector<double> ys(m + 1);
      for (std::size_t r = 0; r < own.size(); ++r) {
        ys[0] = own[r];
        double vsum = 0.0, gsum = 0.0;
        accumulate_tuples(table, members, ys, 0, vsum, gsum, want_value);
        out.grad[lo + r] += coef * (gsum / count);
        if (want_value) out.value[lo + r] += coef * (vsum / count);
      }
    }
  }
}

}  // namespace

PartyField party_field(const KernelTable& table,
                       std::span<const std::span<const double>> parties,
                       int party_index, bool want_value, int threads) {
  const std::size_t count = parties[party_index].size();
  PartyField out;
  out.grad.assign(count, 0.0);
  if (want_value) out.value.assign(count, 0.0);

  const std::size_t workers =
      std::clamp<std::size_t>(threads > 1 ? threads : 1, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    field_chunk(table, parties, party_index, 0, count, want_value, out);
    return out;
  }
  // Each particle is owned by exactly one worker, so results do not depend on
  // scheduling.
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      field_chunk(table, parties, party_index, lo, hi, want_value, out);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace polarflow::detail
