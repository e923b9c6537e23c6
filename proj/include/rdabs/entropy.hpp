#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rdabs/dynamics.hpp"

namespace rdabs {

// All entropies are in nats; initial conditions are uniform on the domain, so
// the initial-state entropy is log vol(domain) for every order s.

struct RenyiPoint {
  double s = 2.0;  // may be infinity
  double value = 0.0;
  double se = 0.0;
};

struct EntropyReport {
  double h = 0.0;
  double h_se = 0.0;
  std::vector<RenyiPoint> renyi;
  double h_inf = 0.0;
  std::string method;  // "closed-form", "monte-carlo", "monte-carlo; h_inf: sample-max"
  long samples = 0;
  std::uint64_t seed = 0;
};

struct McValue {
  double value = 0.0;
  double se = 0.0;
};

// Trajectory entropy h = log vol(domain) + (1/2) E[log det(J^T J)], the
// expectation estimated over uniform samples.
McValue entropy_mc(const SystemDef& sys, int l, long samples, std::uint64_t seed, int workers = 1);

// Renyi trajectory entropy of order s > 1:
// log vol(domain) + (1/(1-s)) log E[det(J^T J)^{-(s-1)/2}], with the standard
// error pushed through the log by the delta method.
McValue renyi_mc(const SystemDef& sys, int l, double s, long samples, std::uint64_t seed,
                 int workers = 1);

// Order-infinity entropy: log vol(domain) + (1/2) sup log det(J^T J).
// Closed form where the determinant is constant or monotone (doubling,
// identity, lti, square); otherwise a sample-max, which is a lower estimate of
// the essential supremum and keeps the distortion bound valid.
double renyi_sup(const SystemDef& sys, int l, long samples, std::uint64_t seed, int workers = 1);

// Exact sup of log det(J^T J) when available for the system.
std::optional<double> exact_sup_log_det(const SystemDef& sys, int l);

enum class ClosedFormKind { Doubling, Identity, LtiSchur };

std::optional<ClosedFormKind> closed_form_kind(const SystemDef& sys);

// Exact entropy report; all Renyi orders coincide for these systems because
// det(J^T J) is constant over the domain.
EntropyReport entropy_closed_form(ClosedFormKind kind, const SystemDef& sys, int l,
                                  std::span<const double> s_grid = {});

// Full report: closed form when available and allowed, Monte Carlo otherwise.
EntropyReport entropy_report(const SystemDef& sys, int l, std::span<const double> s_grid,
                             long samples, std::uint64_t seed, int workers = 1,
                             bool prefer_closed_form = true);

// h(xi0) = h_s(xi0) for uniform initial conditions.
double initial_entropy_uniform(const SystemDef& sys);

}  // namespace rdabs
