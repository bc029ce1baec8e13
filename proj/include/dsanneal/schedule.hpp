#pragma once

#include <string>

namespace dsanneal {

enum class StepKind { Alpha, Beta, Gamma };

StepKind step_kind_from_string(const std::string& s);

/// Decaying step sizes, indexed from k = 1:
///   alpha^k = c_alpha / k
///   beta^k  = c_beta / k^tau_beta
///   gamma^k = c_gamma / (sqrt(k) sqrt(max(log log k, log log k_guard)))
/// The gamma guard keeps log log k positive for k < k_guard; logs are natural.
struct ScheduleSet {
  double c_alpha = 1.0;
  double c_beta = 0.4;
  double tau_beta = 0.25;
  double c_gamma = 1.0;
  int k_guard = 3;

  /// Throws std::invalid_argument naming the offending constant.
  void validate() const;

  double alpha(long long k) const;
  double beta(long long k) const;
  double gamma(long long k) const;
};

/// Checked evaluation; k < 1 throws std::domain_error.
double schedule_eval(const ScheduleSet& sched, long long k, StepKind which);

}  // namespace dsanneal
