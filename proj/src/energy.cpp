#include "cropguard/energy.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cropguard/errors.hpp"

namespace cropguard {

namespace {
constexpr double kSecondsPerHour = 3600.0;
constexpr double kSecondsPerDay = 86400.0;
}  // namespace

void PowerProfile::validate() const {
  if (!(sleep_ma >= 0.0) || !(sleep_ma < rx_ma) || !(rx_ma <= tx_ma)) {
    throw InvalidArgument("power profile needs 0 <= sleep < rx <= tx");
  }
  if (!(repeller_ma >= 0.0) || repeller_ma > 200.0) {
    throw InvalidArgument(fmt::format("repeller draw {} mA outside [0, 200]", repeller_ma));
  }
}

void Battery::validate() const {
  if (!(capacity_mah > 0.0)) throw InvalidArgument("battery capacity must be positive");
  if (!(charge_mah >= 0.0) || charge_mah > capacity_mah) {
    throw InvalidArgument("battery charge must lie in [0, capacity]");
  }
  if (!(solar_recharge_ma >= 0.0)) throw InvalidArgument("solar recharge must be non-negative");
}

Battery consume(const Battery& battery, double current_ma, double duration_s) {
  if (!(current_ma >= 0.0) || !(duration_s >= 0.0)) {
    throw InvalidArgument(
        fmt::format("consume needs non-negative current and duration, got {} mA for {} s",
                    current_ma, duration_s));
  }
  Battery next = battery;
  next.charge_mah = std::max(0.0, battery.charge_mah - current_ma * duration_s / kSecondsPerHour);
  return next;
}

Battery recharge(const Battery& battery, double current_ma, double duration_s) {
  if (!(current_ma >= 0.0) || !(duration_s >= 0.0)) {
    throw InvalidArgument("recharge needs non-negative current and duration");
  }
  Battery next = battery;
  next.charge_mah =
      std::min(battery.capacity_mah, battery.charge_mah + current_ma * duration_s / kSecondsPerHour);
  return next;
}

double average_current_ma(const PowerProfile& profile, const DutyCycle& duty) {
  const double total = duty.sleep + duty.rx + duty.tx + duty.repeller;
  if (std::abs(total - 1.0) > 1e-9 || duty.sleep < 0 || duty.rx < 0 || duty.tx < 0 ||
      duty.repeller < 0) {
    throw InvalidArgument(fmt::format("duty fractions must be non-negative and sum to 1, got {}", total));
  }
  return duty.sleep * profile.sleep_ma + duty.rx * profile.rx_ma + duty.tx * profile.tx_ma +
         duty.repeller * profile.repeller_ma;
}

std::optional<double> lifetime_estimate(const Battery& battery, const PowerProfile& profile,
                                        const DutyCycle& duty) {
  const double net = average_current_ma(profile, duty) - battery.solar_recharge_ma;
  if (net <= 0.0) return std::nullopt;
  return battery.capacity_mah / net;
}

double daylight_seconds(double t0, double t1, double daylight_fraction) {
  if (t1 <= t0 || daylight_fraction <= 0.0) return 0.0;
  const double day_len = std::clamp(daylight_fraction, 0.0, 1.0) * kSecondsPerDay;
  double total = 0.0;
  double day_start = std::floor(t0 / kSecondsPerDay) * kSecondsPerDay;
  for (; day_start < t1; day_start += kSecondsPerDay) {
    const double lo = std::max(t0, day_start);
    const double hi = std::min(t1, day_start + day_len);
    if (hi > lo) total += hi - lo;
  }
  return total;
}

void write_energy_csv(std::ostream& out, const std::vector<NodeEnergy>& rows) {
  out << "node_id,consumed_mah,remaining_mah,depleted\n";
  for (const auto& r : rows) {
    fmt::print(out, "{},{:.6f},{:.6f},{}\n", r.node_id, r.consumed_mah, r.remaining_mah,
               r.depleted ? 1 : 0);
  }
}

}  // namespace cropguard
