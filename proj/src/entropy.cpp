#include "rdabs/entropy.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

#include "rdabs/errors.hpp"
#include "rdabs/parallel.hpp"
#include "rdabs/stats.hpp"

namespace rdabs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> sample_log_dets(const SystemDef& sys, int l, long samples, std::uint64_t seed,
                                    int workers) {
  if (samples < 2) throw std::invalid_argument("entropy: samples must be >= 2");
  std::vector<double> out(static_cast<std::size_t>(samples));
  parallel_chunks(samples, workers, [&](int, std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      SampleRng rng(seed, static_cast<std::uint64_t>(i));
      const Vec x0 = sample_uniform(sys.domain(), rng);
      out[static_cast<std::size_t>(i)] = log_det_gram(jacobian_chain(sys, x0, l).jac);
    }
  });
  return out;
}

double lti_log_det_gram(const Mat& a, int l) {
  const auto n = a.rows();
  Mat p = Mat::Identity(n, n);
  Mat gram = Mat::Identity(n, n);
  for (int i = 1; i < l; ++i) {
    p = a * p;
    gram += p.transpose() * p;
  }
  Eigen::LLT<Mat> llt(gram);
  if (llt.info() != Eigen::Success) throw NumericError("lti gram factorization failed");
  double s = 0.0;
  const Mat chol = llt.matrixL();
  for (int i = 0; i < chol.rows(); ++i) s += std::log(chol(i, i));
  return 2.0 * s;
}

// sum_{i=0}^{l-1} 4^i = (4^l - 1) / 3
double doubling_log_det(int l) { return std::log((std::pow(4.0, l) - 1.0) / 3.0); }

}  // namespace

double initial_entropy_uniform(const SystemDef& sys) { return sys.domain().log_volume(); }

McValue entropy_mc(const SystemDef& sys, int l, long samples, std::uint64_t seed, int workers) {
  const auto logs = sample_log_dets(sys, l, samples, seed, workers);
  const SampleStats stats = mean_and_stderr(logs);
  return {initial_entropy_uniform(sys) + 0.5 * stats.mean, 0.5 * stats.se};
}

McValue renyi_mc(const SystemDef& sys, int l, double s, long samples, std::uint64_t seed,
                 int workers) {
  if (!(s > 1.0) || std::isinf(s)) {
    throw std::invalid_argument("renyi_mc: order must satisfy 1 < s < inf");
  }
  const auto logs = sample_log_dets(sys, l, samples, seed, workers);
  std::vector<double> weights(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) {
    weights[i] = std::exp(-0.5 * (s - 1.0) * logs[i]);
  }
  const SampleStats stats = mean_and_stderr(weights);
  if (stats.mean <= 0.0) throw NumericError("renyi_mc: degenerate weight mean");
  const double value = initial_entropy_uniform(sys) + std::log(stats.mean) / (1.0 - s);
  const double se = stats.se / stats.mean / (s - 1.0);  // delta method through the log
  return {value, se};
}

std::optional<double> exact_sup_log_det(const SystemDef& sys, int l) {
  switch (sys.kind()) {
    case SystemDef::Kind::Doubling:
      return doubling_log_det(l);
    case SystemDef::Kind::Identity:
      return sys.dim() * std::log(static_cast<double>(l));
    case SystemDef::Kind::Lti:
      return lti_log_det_gram(sys.lti_matrix(), l);
    case SystemDef::Kind::Square: {
      // det grows with x0 on [0, 1]: every chain factor 2 x_t is increasing in x0.
      Vec hi(1);
      hi[0] = sys.domain().axis(0).hi;
      return log_det_gram(jacobian_chain(sys, hi, l).jac);
    }
    default:
      return std::nullopt;
  }
}

double renyi_sup(const SystemDef& sys, int l, long samples, std::uint64_t seed, int workers) {
  if (const auto exact = exact_sup_log_det(sys, l)) {
    return initial_entropy_uniform(sys) + 0.5 * *exact;
  }
  const auto logs = sample_log_dets(sys, l, samples, seed, workers);
  double best = -kInf;
  for (double v : logs) best = std::max(best, v);
  return initial_entropy_uniform(sys) + 0.5 * best;
}

std::optional<ClosedFormKind> closed_form_kind(const SystemDef& sys) {
  switch (sys.kind()) {
    case SystemDef::Kind::Doubling:
      return ClosedFormKind::Doubling;
    case SystemDef::Kind::Identity:
      return ClosedFormKind::Identity;
    case SystemDef::Kind::Lti:
      if (spectral_norm(sys.lti_matrix()) < 1.0) return ClosedFormKind::LtiSchur;
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

EntropyReport entropy_closed_form(ClosedFormKind kind, const SystemDef& sys, int l,
                                  std::span<const double> s_grid) {
  const auto matches = closed_form_kind(sys);
  if (!matches || *matches != kind) {
    throw ConfigError("entropy_closed_form: kind does not match the system");
  }
  double log_det = 0.0;
  switch (kind) {
    case ClosedFormKind::Doubling: log_det = doubling_log_det(l); break;
    case ClosedFormKind::Identity: log_det = sys.dim() * std::log(static_cast<double>(l)); break;
    case ClosedFormKind::LtiSchur: log_det = lti_log_det_gram(sys.lti_matrix(), l); break;
  }
  // det(J^T J) is constant over the domain for all three kinds, so h and every
  // Renyi order coincide.
  EntropyReport report;
  report.h = initial_entropy_uniform(sys) + 0.5 * log_det;
  report.h_se = 0.0;
  for (double s : s_grid) {
    if (std::isinf(s)) continue;
    report.renyi.push_back({s, report.h, 0.0});
  }
  report.h_inf = report.h;
  report.method = "closed-form";
  return report;
}

EntropyReport entropy_report(const SystemDef& sys, int l, std::span<const double> s_grid,
                             long samples, std::uint64_t seed, int workers,
                             bool prefer_closed_form) {
  if (prefer_closed_form) {
    if (const auto kind = closed_form_kind(sys)) {
      return entropy_closed_form(*kind, sys, l, s_grid);
    }
  }
  EntropyReport report;
  const McValue h = entropy_mc(sys, l, samples, seed, workers);
  report.h = h.value;
  report.h_se = h.se;
  for (double s : s_grid) {
    if (std::isinf(s)) continue;
    const McValue v = renyi_mc(sys, l, s, samples, seed, workers);
    report.renyi.push_back({s, v.value, v.se});
  }
  report.h_inf = renyi_sup(sys, l, samples, seed, workers);
  report.method = exact_sup_log_det(sys, l) ? "monte-carlo; h_inf: closed-form sup"
                                            : "monte-carlo; h_inf: sample-max lower estimate";
  report.samples = samples;
  report.seed = seed;
  return report;
}

}  // namespace rdabs
