#pragma once

#include <string>

namespace patrol {

enum class Strategy {
  stationary,
  random_walk,
  t_step_coordinated,
  t_step_uncoordinated,
};

enum class ReplanCadence {
  every_horizon,  // follow the whole T-step plan, then replan
  every_step,     // replan each step, execute only the first move
};

std::string strategy_label(Strategy s);
std::string cadence_label(ReplanCadence c);

/// Throws ConfigError for an unknown label.
Strategy parse_strategy(const std::string& label);
ReplanCadence parse_cadence(const std::string& label);

inline bool is_planning_strategy(Strategy s) {
  return s == Strategy::t_step_coordinated ||
         s == Strategy::t_step_uncoordinated;
}

}  // namespace patrol
