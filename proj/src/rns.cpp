#include "cropguard/rns.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cropguard/errors.hpp"

namespace cropguard {

void Repeller::validate() const {
  if (!(coverage_area_m2 > 0.0)) throw InvalidArgument("repeller coverage area must be positive");
  if (!(frequency_hz > 0.0)) throw InvalidArgument("repeller frequency must be positive");
  if (!(active_current_ma >= 0.0) || active_current_ma > kMaxCurrentMa) {
    throw InvalidArgument(fmt::format("repeller current {} mA outside [0, {}]", active_current_ma,
                                      kMaxCurrentMa));
  }
  if (!(repel_duration_s > 0.0)) throw InvalidArgument("repel duration must be positive");
}

double repeller_radius(const Repeller& rep) {
  if (!(rep.coverage_area_m2 > 0.0)) throw InvalidArgument("repeller coverage area must be positive");
  return std::sqrt(rep.coverage_area_m2 / std::numbers::pi);
}

std::string_view to_string(RnsMode mode) {
  switch (mode) {
    case RnsMode::Sleep: return "sleep";
    case RnsMode::Waking: return "waking";
    case RnsMode::Repelling: return "repelling";
  }
  return "unknown";
}

RnsTransition on_detection(const RnsState& state, const DetectionEvent& event, double now) {
  RnsTransition out{.state = state, .actions = {}};
  auto& next = out.state;
  const double on_at = now + state.wake_delay_s;
  const double off_at = on_at + state.repel_duration_s;

  if (state.mode == RnsMode::Sleep) {
    next.mode = RnsMode::Waking;
    next.wake_complete_at = on_at;
    next.active_until = off_at;
    out.actions.push_back({.kind = RnsAction::Kind::RepellerOn, .at = on_at, .event = event});
    out.actions.push_back({.kind = RnsAction::Kind::ExtendRepeller, .at = off_at, .event = event});
  } else if (!state.active_until || off_at > *state.active_until) {
    next.active_until = off_at;
    out.actions.push_back({.kind = RnsAction::Kind::ExtendRepeller, .at = off_at, .event = event});
  }

  next.pending_notifications.push_back(event);
  out.actions.push_back({.kind = RnsAction::Kind::Notify, .at = now, .event = event});
  return out;
}

RnsState on_wake_complete(const RnsState& state, double now) {
  RnsState next = state;
  if (state.mode == RnsMode::Waking && state.wake_complete_at && now >= *state.wake_complete_at) {
    next.mode = RnsMode::Repelling;
    next.wake_complete_at.reset();
  }
  return next;
}

RnsState on_repel_timer(const RnsState& state, double now) {
  RnsState next = state;
  if (state.mode == RnsMode::Repelling && state.active_until && now >= *state.active_until) {
    next.mode = RnsMode::Sleep;
    next.active_until.reset();
  }
  return next;
}

std::string sms_text(const DetectionEvent& event) {
  return fmt::format("INTRUSION sensor={} t={:.3f}", event.sensor_id, event.time);
}

std::optional<SmsRecord> send_sms(SmsGateway& gateway, const DetectionEvent& event, double now) {
  SmsRecord record;
  record.timestamp = now;
  record.sensor_id = event.sensor_id;
  record.message = sms_text(event);
  record.dedup_key = fmt::format("sensor={}", event.sensor_id);

  const auto& window = gateway.config_.dedup_window_s;
  const bool duplicate =
      std::any_of(gateway.log_.rbegin(), gateway.log_.rend(), [&](const SmsRecord& r) {
        return !r.suppressed && r.dedup_key == record.dedup_key && now - r.timestamp < window;
      });
  if (duplicate) {
    record.suppressed = true;
    gateway.log_.push_back(std::move(record));
    return std::nullopt;
  }

  if (gateway.outage_) {
    record.retry = true;
  } else {
    record.delivered_at = now + gateway.config_.delivery_latency_s;
  }
  gateway.log_.push_back(record);
  return record;
}

std::size_t SmsGateway::flush(double now) {
  std::size_t delivered = 0;
  for (auto& r : log_) {
    if (!r.suppressed && !r.delivered_at) {
      r.delivered_at = now + config_.delivery_latency_s;
      ++delivered;
    }
  }
  return delivered;
}

std::size_t SmsGateway::sent_count() const {
  return static_cast<std::size_t>(
      std::count_if(log_.begin(), log_.end(), [](const SmsRecord& r) { return !r.suppressed; }));
}

std::size_t SmsGateway::suppressed_count() const {
  return log_.size() - sent_count();
}

std::size_t SmsGateway::queued_count() const {
  return static_cast<std::size_t>(std::count_if(
      log_.begin(), log_.end(), [](const SmsRecord& r) { return !r.suppressed && !r.delivered_at; }));
}

void write_sms_csv(std::ostream& out, const std::vector<SmsRecord>& log) {
  out << "timestamp_s,delivered_at_s,sensor_id,message,suppressed\n";
  for (const auto& r : log) {
    const std::string delivered = r.delivered_at ? fmt::format("{:.6f}", *r.delivered_at) : "";
    fmt::print(out, "{:.6f},{},{},{},{}\n", r.timestamp, delivered, r.sensor_id, r.message,
               r.suppressed ? 1 : 0);
  }
}

double detection_to_repel_latency(const DeliveryReport& report, const RnsState& state) {
  if (!report.delivered) {
    throw UndefinedLatency("detection was not delivered; repel latency is undefined");
  }
  return report.total_latency + state.wake_delay_s;
}

}  // namespace cropguard
