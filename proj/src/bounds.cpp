#include "rdabs/bounds.hpp"

#include <cmath>
#include <limits>

#include "rdabs/errors.hpp"
#include "rdabs/geometry.hpp"

namespace rdabs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sum_{i=0}^{l-1} L^(2i)
double chain_gain_sum(double lipschitz, int l) {
  const double a = lipschitz * lipschitz;
  if (std::abs(a - 1.0) < 1e-12) return static_cast<double>(l);
  return (std::pow(a, l) - 1.0) / (a - 1.0);
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw NumericError(std::string("non-finite bound ingredient: ") + what);
}

}  // namespace

std::vector<double> default_s_grid() { return {1.25, 1.5, 2.0, 3.0, 5.0, 10.0, 50.0, kInf}; }

CConstant c_constant(const SystemDef& sys, int l, bool high_rate,
                     std::optional<double> lipschitz) {
  if (l < 1) throw std::invalid_argument("c_constant: horizon must be >= 1");
  const int n = sys.dim();
  const double vn = unit_ball_volume(n);
  if (high_rate) return {vn, "high-rate"};

  const std::optional<double> lip = sys.exact_lipschitz() ? sys.exact_lipschitz() : lipschitz;
  CConstant best{kInf, "none"};
  auto consider = [&](double value, const char* tag) {
    if (value < best.value) best = {value, tag};
  };
  switch (sys.smoothness()) {
    case SmoothnessClass::Affine:
      consider(vn, "affine");
      break;
    case SmoothnessClass::PiecewiseAffine: {
      if (!sys.modes()) throw ConfigError("c_constant: piecewise-affine system without mode count");
      consider(std::pow(static_cast<double>(*sys.modes()), l) * vn, "piecewise-affine");
      if (lip) consider(vn * std::pow(chain_gain_sum(*lip, l), 0.5 * n), "lipschitz");
      break;
    }
    case SmoothnessClass::Lipschitz: {
      if (!lip) {
        throw ConfigError("c_constant: Lipschitz class needs a known or estimated constant");
      }
      consider(vn * std::pow(chain_gain_sum(*lip, l), 0.5 * n), "lipschitz");
      break;
    }
  }
  return best;
}

DistortionBound distortion_lower_bound(double rate, int n, int l, double h,
                                       std::span<const SGridPoint> renyi, double c) {
  if (rate <= 0.0) throw std::invalid_argument("distortion_lower_bound: rate must be > 0");
  if (renyi.empty()) throw std::invalid_argument("distortion_lower_bound: empty s grid");
  require_finite(h, "h");
  require_finite(c, "c");

  DistortionBound out;
  const double gamma = gamma_one_plus_half(n);
  out.term1 = 0.5 * n / l *
              std::pow(std::exp(-rate + h - 0.5 * n) / (c * gamma), 2.0 / n);

  const double scale = std::pow(c, -2.0 / n) / l;
  out.term2 = -kInf;
  for (const auto& point : renyi) {
    if (!(point.s > 1.0)) throw std::invalid_argument("distortion_lower_bound: orders must be > 1");
    require_finite(point.h_s, "h_s");
    const double rate_coeff = std::isinf(point.s) ? 1.0 : point.s / (point.s - 1.0);
    const double term = scale * std::exp(2.0 / n * (-rate_coeff * rate + point.h_s));
    out.per_s.push_back({point.s, term});
    if (term > out.term2) {
      out.term2 = term;
      out.s_argmax = point.s;
    }
  }
  out.d_lower = out.term1 + out.term2;
  return out;
}

RateBound rate_lower_bound(double d, int n, int l, double h, double h_inf, double c) {
  if (d <= 0.0) throw std::invalid_argument("rate_lower_bound: distortion must be > 0");
  require_finite(h, "h");
  require_finite(h_inf, "h_inf");
  require_finite(c, "c");
  const double gamma = gamma_one_plus_half(n);
  const double c_pow = std::pow(c, 2.0 / n);
  // Exact inverse of the two-term bound at s = infinity: both summands carry
  // the 1/(l c^{2/n}) factor.
  const double q = 0.5 * n / (l * c_pow) * std::exp(2.0 / n * h - 1.0) / std::pow(gamma, 2.0 / n) +
                   std::exp(2.0 / n * h_inf) / (l * c_pow);
  const double r = 0.5 * n * (std::log(q) - std::log(d));
  if (r < 0.0) return {0.0, true};
  return {r, false};
}

RelaxedBound relaxed_bound(SmoothnessClass cls, double l_or_m, int n, int l, double rate,
                           double h0, std::span<const SGridPoint> renyi0,
                           std::optional<double> target_d) {
  if (rate <= 0.0) throw std::invalid_argument("relaxed_bound: rate must be > 0");
  if (renyi0.empty()) throw std::invalid_argument("relaxed_bound: empty s grid");
  const double vn_pow = std::pow(unit_ball_volume(n), 2.0 / n);

  RelaxedBound out;
  switch (cls) {
    case SmoothnessClass::Lipschitz: {
      const double lip = l_or_m;
      if (lip < 0.0) throw std::invalid_argument("relaxed_bound: negative Lipschitz constant");
      if (lip < 1.0) {
        out.k_factor = (1.0 - lip * lip) / (l * vn_pow);
        out.case_tag = "lipschitz L<1";
      } else if (lip == 1.0) {
        out.k_factor = 0.0;
        out.case_tag = "lipschitz L=1";
        out.k_vanishes = true;
      } else {
        out.k_factor = (1.0 - lip * lip) / (l * std::pow(lip, 2 * l) * vn_pow);
        out.case_tag = "lipschitz L>1";
        out.vacuous = true;  // negative factor: no information in the distortion form
      }
      break;
    }
    case SmoothnessClass::PiecewiseAffine:
    case SmoothnessClass::Affine: {
      const double modes = cls == SmoothnessClass::Affine ? 1.0 : l_or_m;
      if (modes < 1.0) throw std::invalid_argument("relaxed_bound: mode count must be >= 1");
      out.k_factor = 1.0 / (l * std::pow(modes, 2.0 * l / n) * vn_pow);
      out.case_tag = cls == SmoothnessClass::Affine ? "affine" : "piecewise-affine";
      break;
    }
  }

  const double gamma = gamma_one_plus_half(n);
  double bracket = 0.5 * n * std::pow(std::exp(-rate + h0 - 0.5 * n) / gamma, 2.0 / n);
  double best = -kInf;
  double h_inf0 = -kInf;
  for (const auto& point : renyi0) {
    if (!(point.s > 1.0)) throw std::invalid_argument("relaxed_bound: orders must be > 1");
    const double rate_coeff = std::isinf(point.s) ? 1.0 : point.s / (point.s - 1.0);
    best = std::max(best, std::exp(2.0 / n * (-rate_coeff * rate + point.h_s)));
    if (std::isinf(point.s)) h_inf0 = point.h_s;
  }
  bracket += best;
  out.d_lower = out.k_factor * bracket;

  if (target_d) {
    if (*target_d <= 0.0) throw std::invalid_argument("relaxed_bound: distortion must be > 0");
    if (!std::isfinite(h_inf0)) {
      throw std::invalid_argument("relaxed_bound: rate form needs the s = infinity entry");
    }
    // Rate form; the K factor multiplies the encoder summand only.
    const double q = out.k_factor * 0.5 * n * std::exp(2.0 / n * h0 - 1.0) /
                         std::pow(gamma, 2.0 / n) +
                     std::exp(2.0 / n * h_inf0);
    out.r_lower = std::max(0.0, 0.5 * n * (std::log(q) - std::log(*target_d)));
  }
  return out;
}

std::vector<SGridPoint> bound_s_grid(const EntropyReport& report) {
  std::vector<SGridPoint> grid;
  grid.reserve(report.renyi.size() + 1);
  for (const auto& point : report.renyi) grid.push_back({point.s, point.value});
  grid.push_back({kInf, report.h_inf});
  return grid;
}

std::vector<RdPoint> rd_curve(std::span<const double> rates, int n, int l,
                              const EntropyReport& ingredients, const CConstant& c_valid,
                              const CConstant& c_highrate) {
  const auto grid = bound_s_grid(ingredients);
  std::vector<RdPoint> out;
  out.reserve(rates.size());
  double previous = kInf;
  for (double rate : rates) {
    if (rate <= previous && !out.empty()) {
      throw std::invalid_argument("rd_curve: rate grid must be strictly increasing");
    }
    previous = rate;
    const DistortionBound tight = distortion_lower_bound(rate, n, l, ingredients.h, grid,
                                                         c_valid.value);
    const DistortionBound high = distortion_lower_bound(rate, n, l, ingredients.h, grid,
                                                        c_highrate.value);
    RdPoint point;
    point.rate = rate;
    point.cells = std::exp(rate);
    point.d_lower = tight.d_lower;
    point.d_lower_highrate = high.d_lower;
    point.term1 = tight.term1;
    point.term2 = tight.term2;
    point.s_argmax = tight.s_argmax;
    point.h = ingredients.h;
    point.h_inf = ingredients.h_inf;
    point.c = c_valid.value;
    point.c_case = c_valid.case_tag;
    point.per_s = tight.per_s;
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace rdabs
