#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace subpop {

enum class EventType : std::uint8_t { kPlay, kLike, kSkip, kDislike };

// Graded relevance: like=2, play=1, skip=-1, dislike=-2.
int relevance_grade(EventType type);
const char* event_type_name(EventType type);
// Case-insensitive; nullopt for anything outside the four-word vocabulary.
std::optional<EventType> parse_event_type(std::string_view text);

// A raw, id-keyed interaction as it appears in an input file.
struct Event {
  std::string user_id;
  std::string item_id;
  std::int64_t timestamp = 0;
  EventType type = EventType::kPlay;
};

// Dense-indexed interaction. `order` is the position of the event in the
// original input and breaks timestamp ties everywhere.
struct Interaction {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
  std::int64_t timestamp = 0;
  std::uint64_t order = 0;
  EventType type = EventType::kPlay;
};

// Bijection between opaque string ids and [0, size).
class IdIndex {
 public:
  explicit IdIndex(std::vector<std::string> ids);

  std::size_t size() const { return ids_.size(); }
  const std::string& id(std::uint32_t index) const { return ids_.at(index); }
  const std::vector<std::string>& ids() const { return ids_; }
  std::optional<std::uint32_t> find(std::string_view id) const;

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::uint32_t> lookup_;
};

// Per-user interaction sequences in CSR layout, each sorted by
// (timestamp, order). Immutable once built. Train and test parts of a split
// share the parent's id indices, so dense ids agree across them; a user may
// therefore own zero events in a given log.
class EventLog {
 public:
  EventLog() = default;
  EventLog(std::shared_ptr<const IdIndex> users,
           std::shared_ptr<const IdIndex> items,
           std::vector<Interaction> interactions);

  // Dense indices follow first appearance in `events`.
  static EventLog from_events(std::span<const Event> events);

  std::size_t num_users() const { return users_ ? users_->size() : 0; }
  std::size_t num_items() const { return items_ ? items_->size() : 0; }
  std::size_t num_events() const { return interactions_.size(); }
  bool empty() const { return interactions_.empty(); }

  std::span<const Interaction> user_events(std::uint32_t user) const;
  std::vector<std::uint32_t> user_items(std::uint32_t user) const;
  // All interactions grouped by user.
  std::span<const Interaction> interactions() const { return interactions_; }

  const IdIndex& users() const { return *users_; }
  const IdIndex& items() const { return *items_; }
  std::shared_ptr<const IdIndex> user_index() const { return users_; }
  std::shared_ptr<const IdIndex> item_index() const { return items_; }

  std::vector<Event> to_events() const;

 private:
  std::shared_ptr<const IdIndex> users_;
  std::shared_ptr<const IdIndex> items_;
  std::vector<Interaction> interactions_;
  std::vector<std::size_t> offsets_;
};

enum class LogFormat { kTsv, kCsv };

// ".csv" selects CSV, anything else TSV.
LogFormat format_from_path(const std::filesystem::path& path);

// Rows are `user, item, timestamp, event`. A first row whose timestamp field
// is not numeric is taken as a header and skipped.
EventLog load_events(const std::filesystem::path& path, LogFormat format);
EventLog parse_events(std::istream& in, LogFormat format);
void write_events(std::ostream& out, const EventLog& log,
                  LogFormat format = LogFormat::kTsv);

// Keeps the n most interacted items (every event type counts once), ties by
// ascending item id string. Users left without events are dropped.
EventLog sample_top_items(const EventLog& log, std::size_t n);

struct TemporalSplit {
  EventLog train;
  EventLog test;
  std::int64_t split_timestamp = 0;
  double holdout_fraction = 0.0;
};

// Events with timestamp >= cut go to test.
TemporalSplit split_at(const EventLog& log, std::int64_t cut,
                       double holdout_fraction);

// Global cut: the last ceil(fraction * N) events in (timestamp, order) order
// form the test set. When the boundary timestamp is shared by events on both
// sides, the whole tie group moves to test, or to train if test would
// otherwise swallow every event.
TemporalSplit temporal_split(const EventLog& log, double holdout_fraction);

// Versioned TSV cache of a split; read_split is its inverse.
void write_split(std::ostream& out, const TemporalSplit& split);
TemporalSplit read_split(std::istream& in);

}  // namespace subpop
