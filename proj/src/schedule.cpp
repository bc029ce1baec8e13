#include "dsanneal/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsanneal {

StepKind step_kind_from_string(const std::string& s) {
  if (s == "alpha") return StepKind::Alpha;
  if (s == "beta") return StepKind::Beta;
  if (s == "gamma") return StepKind::Gamma;
  throw std::invalid_argument("unknown schedule '" + s + "' (expected alpha|beta|gamma)");
}

void ScheduleSet::validate() const {
  if (!(c_alpha > 0.0)) throw std::invalid_argument("schedule.c_alpha must be positive");
  if (!(c_beta > 0.0)) throw std::invalid_argument("schedule.c_beta must be positive");
  if (!(c_gamma > 0.0)) throw std::invalid_argument("schedule.c_gamma must be positive");
  if (!(tau_beta > 0.0 && tau_beta < 0.5)) throw std::invalid_argument("schedule.tau_beta must lie in (0, 1/2)");
  if (k_guard < 3) throw std::invalid_argument("schedule.k_guard must be at least 3");
}

double ScheduleSet::alpha(long long k) const { return c_alpha / static_cast<double>(k); }

double ScheduleSet::beta(long long k) const { return c_beta / std::pow(static_cast<double>(k), tau_beta); }

double ScheduleSet::gamma(long long k) const {
  const double floor = std::log(std::log(static_cast<double>(k_guard)));
  // log log k is undefined or non-positive below k = 3; the guard takes over there.
  const double loglog = k >= 3 ? std::log(std::log(static_cast<double>(k))) : floor;
  return c_gamma / (std::sqrt(static_cast<double>(k)) * std::sqrt(std::max(loglog, floor)));
}

double schedule_eval(const ScheduleSet& sched, long long k, StepKind which) {
  if (k < 1) throw std::domain_error("schedules are defined for k >= 1");
  switch (which) {
    case StepKind::Alpha: return sched.alpha(k);
    case StepKind::Beta: return sched.beta(k);
    case StepKind::Gamma: return sched.gamma(k);
  }
  return 0.0;
}

}  // namespace dsanneal
