#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

namespace cropguard {

/// Typical module current draw in each mode, in mA.
struct PowerProfile {
  double sleep_ma = 0.05;
  double rx_ma = 30.0;
  double tx_ma = 35.0;
  double repeller_ma = 200.0;

  void validate() const;
};

struct Battery {
  double capacity_mah = 2000.0;
  double charge_mah = 2000.0;
  double solar_recharge_ma = 0.0;

  [[nodiscard]] bool depleted() const { return charge_mah <= 0.0; }
  void validate() const;
};

[[nodiscard]] inline Battery full_battery(double capacity_mah, double solar_recharge_ma = 0.0) {
  return {capacity_mah, capacity_mah, solar_recharge_ma};
}

/// Coulomb counting, floored at zero. Throws InvalidArgument on negative input.
[[nodiscard]] Battery consume(const Battery& battery, double current_ma, double duration_s);

/// Adds charge, capped at capacity.
[[nodiscard]] Battery recharge(const Battery& battery, double current_ma, double duration_s);

/// Fractions of time spent in each mode; must sum to 1.
struct DutyCycle {
  double sleep = 1.0;
  double rx = 0.0;
  double tx = 0.0;
  double repeller = 0.0;
};

/// Hours until empty; nullopt means the battery never empties ("indefinite").
[[nodiscard]] std::optional<double> lifetime_estimate(const Battery& battery,
                                                      const PowerProfile& profile,
                                                      const DutyCycle& duty);

[[nodiscard]] double average_current_ma(const PowerProfile& profile, const DutyCycle& duty);

/// Seconds of daylight within [t0, t1) when each 24 h period starts with
/// `daylight_fraction` of daylight.
[[nodiscard]] double daylight_seconds(double t0, double t1, double daylight_fraction);

struct NodeEnergy {
  int node_id = 0;
  double consumed_mah = 0.0;
  double remaining_mah = 0.0;
  bool depleted = false;
};

/// CSV `node_id,consumed_mah,remaining_mah,depleted`.
void write_energy_csv(std::ostream& out, const std::vector<NodeEnergy>& rows);

}  // namespace cropguard
