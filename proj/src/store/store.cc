#include "riskx/store/store.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <tuple>

#include "riskx/common/error.h"

namespace riskx::store {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr char kLogFile[] = "log.jsonl";
constexpr char kHistoryFile[] = "history.jsonl";

bool IsDigit(char c) { return c >= '0' && c <= '9'; }

void AppendLine(const fs::path& path, const std::string& line) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot create " + path.parent_path().string() + ": " +
                    ec.message());
  }
  const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC,
                        0644);
  if (fd < 0) {
    throw Error(ErrorCode::kIoError,
                "cannot open " + path.string() + ": " + std::strerror(errno));
  }
  const std::string data = line + "\n";
  std::size_t written = 0;
  while (written < data.size()) {
    const ssize_t n = ::write(fd, data.data() + written, data.size() - written);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      const std::string reason = std::strerror(errno);
      ::close(fd);
      throw Error(ErrorCode::kIoError, "write failed for " + path.string() +
                                           ": " + reason);
    }
    written += static_cast<std::size_t>(n);
  }
  const bool synced = ::fsync(fd) == 0;
  ::close(fd);
  if (!synced) throw Error(ErrorCode::kIoError, "fsync failed for " + path.string());
}

// Parsed lines of `path`. A final line without its newline is the remains of
// an interrupted write and is dropped; any other bad line is an error.
std::vector<json> ReadLines(const fs::path& path) {
  std::vector<json> lines;
  std::ifstream in(path, std::ios::binary);
  if (!in) return lines;
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  std::size_t start = 0;
  std::size_t number = 0;
  while (start < content.size()) {
    const std::size_t end = content.find('\n', start);
    const bool torn = end == std::string::npos;
    const std::string line =
        content.substr(start, torn ? std::string::npos : end - start);
    ++number;
    start = torn ? content.size() : end + 1;
    if (line.empty()) continue;
    json parsed = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded() || !parsed.is_object()) {
      if (torn) break;
      throw Error(ErrorCode::kMalformedDocument,
                  path.string() + ": line " + std::to_string(number) +
                      " is not a JSON object");
    }
    lines.push_back(std::move(parsed));
  }
  return lines;
}

json EntryToJson(const LogEntry& entry) {
  json values = json::object();
  for (const auto& [id, value] : entry.values) values[id] = value;
  return {{"date", entry.date},
          {"kind", LogKindName(entry.kind)},
          {"values", std::move(values)}};
}

LogEntry EntryFromJson(const json& line, const std::string& user_id,
                       const fs::path& path) {
  auto fail = [&] {
    throw Error(ErrorCode::kMalformedDocument,
                path.string() + ": bad log line " + line.dump());
  };
  if (!line.contains("date") || !line["date"].is_string() ||
      !line.contains("kind") || !line["kind"].is_string() ||
      !line.contains("values") || !line["values"].is_object()) {
    fail();
  }
  LogEntry entry;
  entry.user_id = user_id;
  entry.date = line["date"].get<std::string>();
  const std::optional<LogKind> kind = ParseLogKind(line["kind"].get<std::string>());
  if (!kind) fail();
  entry.kind = *kind;
  for (const auto& [id, value] : line["values"].items()) {
    if (!value.is_number()) fail();
    entry.values[id] = value.get<double>();
  }
  return entry;
}

std::optional<model::RiskLevel> ParseRiskLevel(std::string_view name) {
  for (model::RiskLevel level : {model::RiskLevel::kLow,
                                 model::RiskLevel::kMedium,
                                 model::RiskLevel::kHigh}) {
    if (model::RiskLevelName(level) == name) return level;
  }
  return std::nullopt;
}

}  // namespace

struct Store::UserState {
  struct StoredEntry {
    std::uint64_t seq = 0;
    LogEntry entry;
  };

  std::shared_mutex mu;
  std::string user_id;
  fs::path dir;
  std::map<std::pair<std::string, LogKind>, StoredEntry> logs;
  std::uint64_t next_seq = 0;
  std::map<std::string, RiskHistoryPoint> history;

  void Apply(LogEntry entry) {
    const auto key = std::make_pair(entry.date, entry.kind);
    logs[key] = {next_seq++, std::move(entry)};
  }

  // Live entries sorted by (date, seq).
  std::vector<const StoredEntry*> Ordered() const {
    std::vector<const StoredEntry*> out;
    for (const auto& [key, stored] : logs) out.push_back(&stored);
    std::sort(out.begin(), out.end(), [](const StoredEntry* a, const StoredEntry* b) {
      return std::tie(a->entry.date, a->seq) < std::tie(b->entry.date, b->seq);
    });
    return out;
  }
};

std::string_view LogKindName(LogKind kind) {
  return kind == LogKind::kDaily ? "DAILY" : "NONDAILY";
}

std::optional<LogKind> ParseLogKind(std::string_view text) {
  if (text == "DAILY") return LogKind::kDaily;
  if (text == "NONDAILY") return LogKind::kNonDaily;
  return std::nullopt;
}

bool IsValidUserId(std::string_view user_id) {
  if (user_id.empty() || user_id.size() > 64) return false;
  return std::all_of(user_id.begin(), user_id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || IsDigit(c) ||
           c == '_' || c == '-';
  });
}

bool IsValidDate(std::string_view date) {
  if (date.size() != 10 || date[4] != '-' || date[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (!IsDigit(date[i])) return false;
  }
  auto number = [&](std::size_t pos, std::size_t len) {
    int value = 0;
    for (std::size_t i = pos; i < pos + len; ++i) value = value * 10 + (date[i] - '0');
    return value;
  };
  const std::chrono::year_month_day ymd{
      std::chrono::year(number(0, 4)),
      std::chrono::month(static_cast<unsigned>(number(5, 2))),
      std::chrono::day(static_cast<unsigned>(number(8, 2)))};
  return ymd.ok();
}

std::string TodayUtc() {
  const std::chrono::year_month_day ymd{
      std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now())};
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02u",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buffer;
}

json HistoryPointToJson(const RiskHistoryPoint& point) {
  return {{"date", point.date},
          {"probability", point.probability},
          {"level", model::RiskLevelName(point.level)}};
}

Store::Store(fs::path data_dir, const model::FeatureSchema& schema)
    : data_dir_(std::move(data_dir)), schema_(schema) {}

std::shared_ptr<Store::UserState> Store::StateFor(std::string_view user_id) const {
  if (!IsValidUserId(user_id)) {
    throw Error(ErrorCode::kInvalidArgument,
                "user id must match [A-Za-z0-9_-]{1,64}", "/user_id");
  }
  std::lock_guard<std::mutex> lock(users_mu_);
  if (auto it = users_.find(user_id); it != users_.end()) return it->second;

  auto state = std::make_shared<UserState>();
  state->user_id = std::string(user_id);
  state->dir = data_dir_ / state->user_id;
  for (const json& line : ReadLines(state->dir / kLogFile)) {
    state->Apply(EntryFromJson(line, state->user_id, state->dir / kLogFile));
  }
  for (const json& line : ReadLines(state->dir / kHistoryFile)) {
    RiskHistoryPoint point;
    point.user_id = state->user_id;
    const auto level = line.contains("level") && line["level"].is_string()
                           ? ParseRiskLevel(line["level"].get<std::string>())
                           : std::nullopt;
    if (!line.contains("date") || !line["date"].is_string() ||
        !line.contains("probability") || !line["probability"].is_number() ||
        !level) {
      throw Error(ErrorCode::kMalformedDocument,
                  (state->dir / kHistoryFile).string() + ": bad history line " +
                      line.dump());
    }
    point.date = line["date"].get<std::string>();
    point.probability = line["probability"].get<double>();
    point.level = *level;
    state->history[point.date] = point;
  }
  users_.emplace(state->user_id, state);
  return state;
}

void Store::ValidateEntry(const LogEntry& entry) const {
  if (!IsValidDate(entry.date)) {
    throw Error(ErrorCode::kInvalidArgument,
                "date must be a calendar day written YYYY-MM-DD", "/date");
  }
  if (entry.values.empty()) {
    throw Error(ErrorCode::kInvalidValue, "a log entry needs at least one value",
                "/values");
  }
  for (const auto& [id, value] : entry.values) {
    const std::string path = "/values/" + id;
    const std::optional<std::size_t> index = schema_.IndexOf(id);
    if (!index) {
      throw Error(ErrorCode::kUnknownFeature, "unknown feature " + id, path);
    }
    const model::FeatureSpec& spec = schema_[*index];
    if (entry.kind == LogKind::kDaily && !spec.controllable) {
      throw Error(ErrorCode::kUncontrollableInDaily,
                  id + " cannot change day to day; log it as NONDAILY", path);
    }
    if (!std::isfinite(value) ||
        (spec.kind == model::FeatureKind::kBinary && value != 0.0 &&
         value != 1.0)) {
      throw Error(ErrorCode::kInvalidValue, "invalid value for " + id, path);
    }
    if (!spec.InBounds(value)) {
      throw Error(ErrorCode::kOutOfBounds, id + " is outside its allowed range",
                  path);
    }
  }
}

void Store::PutLog(const LogEntry& entry) {
  std::shared_ptr<UserState> state = StateFor(entry.user_id);
  ValidateEntry(entry);
  std::unique_lock lock(state->mu);
  AppendLine(state->dir / kLogFile, EntryToJson(entry).dump());
  state->Apply(entry);
}

model::PatientRecord Store::CurrentRecord(
    std::string_view user_id, const std::optional<std::string>& as_of) const {
  std::shared_ptr<UserState> state = StateFor(user_id);
  std::shared_lock lock(state->mu);
  std::vector<std::optional<double>> merged(schema_.size());
  for (const UserState::StoredEntry* stored : state->Ordered()) {
    if (as_of && stored->entry.date > *as_of) continue;
    for (const auto& [id, value] : stored->entry.values) {
      if (auto index = schema_.IndexOf(id)) merged[*index] = value;
    }
  }
  model::PatientRecord record;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    if (!merged[i]) {
      throw Error(ErrorCode::kIncompleteBaseline,
                  "no value has been logged for " + schema_[i].id,
                  "/" + schema_[i].id);
    }
    record.values.push_back(*merged[i]);
  }
  return record;
}

std::vector<LogEntry> Store::Logs(std::string_view user_id) const {
  std::shared_ptr<UserState> state = StateFor(user_id);
  std::shared_lock lock(state->mu);
  std::vector<LogEntry> out;
  for (const UserState::StoredEntry* stored : state->Ordered()) {
    out.push_back(stored->entry);
  }
  return out;
}

void Store::PutHistoryPoint(const RiskHistoryPoint& point) {
  std::shared_ptr<UserState> state = StateFor(point.user_id);
  if (!IsValidDate(point.date)) {
    throw Error(ErrorCode::kInvalidArgument, "bad history date", "/date");
  }
  if (!(point.probability >= 0.0 && point.probability <= 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "probability must be in [0, 1]",
                "/probability");
  }
  std::unique_lock lock(state->mu);
  AppendLine(state->dir / kHistoryFile, HistoryPointToJson(point).dump());
  state->history[point.date] = point;
}

std::vector<RiskHistoryPoint> Store::History(std::string_view user_id,
                                             int days) const {
  if (days < 1) {
    throw Error(ErrorCode::kInvalidArgument, "days must be at least 1", "/days");
  }
  std::shared_ptr<UserState> state = StateFor(user_id);
  std::shared_lock lock(state->mu);
  std::vector<RiskHistoryPoint> out;
  for (const auto& [date, point] : state->history) out.push_back(point);
  if (out.size() > static_cast<std::size_t>(days)) {
    out.erase(out.begin(), out.end() - days);
  }
  return out;
}

}  // namespace riskx::store
