#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cropguard/geometry.hpp"
#include "cropguard/nettree.hpp"
#include "cropguard/wildlife.hpp"

namespace cropguard {

/// Ultrasonic repeller driven by the RNS controller.
struct Repeller {
  static constexpr double kMaxCurrentMa = 200.0;

  Point position{};
  double coverage_area_m2 = 300.0;
  double frequency_hz = 15000.0;
  double active_current_ma = 200.0;
  double repel_duration_s = 30.0;

  void validate() const;
};

/// Radius of a disk with the repeller's coverage area.
[[nodiscard]] double repeller_radius(const Repeller& rep);

enum class RnsMode { Sleep, Waking, Repelling };

[[nodiscard]] std::string_view to_string(RnsMode mode);

/// Coordinator-side controller. The repeller is on iff mode == Repelling.
struct RnsState {
  RnsMode mode = RnsMode::Sleep;
  double wake_delay_s = 0.010;
  double repel_duration_s = 30.0;
  /// When Waking: time the repeller switches on.
  std::optional<double> wake_complete_at;
  /// When Waking or Repelling: time the repeller switches off.
  std::optional<double> active_until;
  /// Detections accepted but not yet handed to the SMS gateway.
  std::vector<DetectionEvent> pending_notifications;

  [[nodiscard]] bool repeller_active() const { return mode == RnsMode::Repelling; }
};

struct RnsAction {
  enum class Kind { RepellerOn, ExtendRepeller, Notify };
  Kind kind;
  /// RepellerOn: switch-on time. ExtendRepeller: new active_until.
  double at = 0.0;
  DetectionEvent event{};
};

struct RnsTransition {
  RnsState state;
  std::vector<RnsAction> actions;
};

/// A detection arriving at the controller. From Sleep the controller starts
/// waking and will repel from now + wake_delay for repel_duration; while Waking
/// or Repelling the off time moves to now + wake_delay + repel_duration if that
/// is later. Every detection also queues a notification.
[[nodiscard]] RnsTransition on_detection(const RnsState& state, const DetectionEvent& event,
                                         double now);

/// Waking -> Repelling once the wake delay has elapsed.
[[nodiscard]] RnsState on_wake_complete(const RnsState& state, double now);

/// Repelling -> Sleep once now >= active_until; otherwise unchanged.
[[nodiscard]] RnsState on_repel_timer(const RnsState& state, double now);

struct SmsRecord {
  double timestamp = 0.0;
  std::optional<double> delivered_at;  // empty while queued during an outage
  int sensor_id = 0;
  std::string message;
  std::string dedup_key;
  bool suppressed = false;
  bool retry = false;
};

/// Simulated GSM modem. The log is append-only; callers feed it in time order.
class SmsGateway {
 public:
  struct Config {
    double delivery_latency_s = 5.0;
    double dedup_window_s = 60.0;
  };

  SmsGateway() = default;
  explicit SmsGateway(Config config) : config_(config) {}

  [[nodiscard]] const Config& config() const { return config_; }
  [[nodiscard]] const std::vector<SmsRecord>& log() const { return log_; }

  /// Records sent during an outage are queued with the retry flag set.
  void set_outage(bool outage) { outage_ = outage; }
  [[nodiscard]] bool in_outage() const { return outage_; }

  /// Delivers every queued record at now + latency. Returns how many.
  std::size_t flush(double now);

  [[nodiscard]] std::size_t sent_count() const;
  [[nodiscard]] std::size_t suppressed_count() const;
  [[nodiscard]] std::size_t queued_count() const;

  friend std::optional<SmsRecord> send_sms(SmsGateway& gateway, const DetectionEvent& event,
                                           double now);

 private:
  Config config_{};
  bool outage_ = false;
  std::vector<SmsRecord> log_;
};

/// `INTRUSION sensor=<id> t=<seconds, 3 decimals>`.
[[nodiscard]] std::string sms_text(const DetectionEvent& event);

/// Appends a record unless the same sensor was notified less than the dedup
/// window ago; suppressed attempts are logged with suppressed=true and return
/// nullopt.
std::optional<SmsRecord> send_sms(SmsGateway& gateway, const DetectionEvent& event, double now);

/// CSV `timestamp_s,delivered_at_s,sensor_id,message,suppressed`.
void write_sms_csv(std::ostream& out, const std::vector<SmsRecord>& log);

/// Transport latency plus controller wake delay. Throws UndefinedLatency for an
/// undelivered report.
[[nodiscard]] double detection_to_repel_latency(const DeliveryReport& report, const RnsState& state);

}  // namespace cropguard
