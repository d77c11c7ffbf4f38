#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>
#include "riskx/model/feature_schema.h"
#include "riskx/model/risk.h"

namespace riskx::store {

enum class LogKind { kDaily, kNonDaily };

// "DAILY", "NONDAILY".
std::string_view LogKindName(LogKind kind);
std::optional<LogKind> ParseLogKind(std::string_view text);

struct LogEntry {
  std::string user_id;
  std::string date;  // YYYY-MM-DD.
  LogKind kind = LogKind::kDaily;
  std::map<std::string, double> values;  // Partial, keyed by feature id.

  bool operator==(const LogEntry&) const = default;
};

struct RiskHistoryPoint {
  std::string user_id;
  std::string date;
  double probability = 0.0;
  model::RiskLevel level = model::RiskLevel::kLow;

  bool operator==(const RiskHistoryPoint&) const = default;
};

// True for [A-Za-z0-9_-]{1,64}.
bool IsValidUserId(std::string_view user_id);
// True for a real calendar day written as YYYY-MM-DD.
bool IsValidDate(std::string_view date);
// Today's UTC date as YYYY-MM-DD.
std::string TodayUtc();

nlohmann::json HistoryPointToJson(const RiskHistoryPoint& point);

// Per-user log and risk history kept as append-only JSON-lines files under
// <data_dir>/<user_id>/{log,history}.jsonl. State is rebuilt by replaying the
// files, with later lines replacing earlier ones for the same key, so the
// files are the only source of truth. Writes are fsync'ed before returning
// and serialized per user; reads share a per-user lock.
class Store {
 public:
  Store(std::filesystem::path data_dir, const model::FeatureSchema& schema);

  // Validates and durably appends `entry`, replacing any earlier entry with
  // the same (date, kind). Throws kInvalidArgument for a bad user id or date,
  // kUnknownFeature, kUncontrollableInDaily for uncontrollable features in a
  // DAILY entry, and kOutOfBounds / kInvalidValue for bad values. Field
  // paths are "/values/<id>".
  void PutLog(const LogEntry& entry);

  // For every feature, the value from the latest live entry that sets it,
  // ordered by (date, write order) and restricted to dates <= `as_of` when
  // given. Throws kIncompleteBaseline naming the first feature never set.
  model::PatientRecord CurrentRecord(
      std::string_view user_id,
      const std::optional<std::string>& as_of = std::nullopt) const;

  // Live entries in (date, write order).
  std::vector<LogEntry> Logs(std::string_view user_id) const;

  // Durably records a point, replacing any point for the same date.
  void PutHistoryPoint(const RiskHistoryPoint& point);

  // The `days` most recent points, ascending by date; gaps are left as
  // gaps. Throws kInvalidArgument when `days` < 1.
  std::vector<RiskHistoryPoint> History(std::string_view user_id,
                                        int days) const;

  const std::filesystem::path& data_dir() const { return data_dir_; }

 private:
  struct UserState;

  // Loads the user's files on first use. Throws kInvalidArgument for an
  // invalid id.
  std::shared_ptr<UserState> StateFor(std::string_view user_id) const;
  void ValidateEntry(const LogEntry& entry) const;

  std::filesystem::path data_dir_;
  const model::FeatureSchema& schema_;
  mutable std::mutex users_mu_;
  mutable std::map<std::string, std::shared_ptr<UserState>, std::less<>> users_;
};

}  // namespace riskx::store
