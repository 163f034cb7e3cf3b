#include "patrol/strategy.hpp"

#include "patrol/errors.hpp"

namespace patrol {

std::string strategy_label(Strategy s) {
  switch (s) {
    case Strategy::stationary: return "stationary";
    case Strategy::random_walk: return "random-walk";
    case Strategy::t_step_coordinated: return "t-step-coordinated";
    case Strategy::t_step_uncoordinated: return "t-step-uncoordinated";
  }
  return "?";
}

std::string cadence_label(ReplanCadence c) {
  switch (c) {
    case ReplanCadence::every_horizon: return "every-horizon";
    case ReplanCadence::every_step: return "every-step";
  }
  return "?";
}

Strategy parse_strategy(const std::string& label) {
  if (label == "stationary") return Strategy::stationary;
  if (label == "random-walk") return Strategy::random_walk;
  if (label == "t-step-coordinated") return Strategy::t_step_coordinated;
  if (label == "t-step-uncoordinated") return Strategy::t_step_uncoordinated;
  throw ConfigError("unknown strategy label: " + label);
}

ReplanCadence parse_cadence(const std::string& label) {
  if (label == "every-horizon") return ReplanCadence::every_horizon;
  if (label == "every-step") return ReplanCadence::every_step;
  throw ConfigError("unknown replan cadence: " + label);
}

}  // namespace patrol
