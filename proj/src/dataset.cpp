#include "subpop/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "subpop/error.hpp"

namespace subpop {

int relevance_grade(EventType type) {
  switch (type) {
    case EventType::kLike: return 2;
    case EventType::kPlay: return 1;
    case EventType::kSkip: return -1;
    case EventType::kDislike: return -2;
  }
  return 0;
}

const char* event_type_name(EventType type) {
  switch (type) {
    case EventType::kPlay: return "play";
    case EventType::kLike: return "like";
    case EventType::kSkip: return "skip";
    case EventType::kDislike: return "dislike";
  }
  return "?";
}

std::optional<EventType> parse_event_type(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "play") return EventType::kPlay;
  if (lower == "like") return EventType::kLike;
  if (lower == "skip") return EventType::kSkip;
  if (lower == "dislike") return EventType::kDislike;
  return std::nullopt;
}

IdIndex::IdIndex(std::vector<std::string> ids) : ids_(std::move(ids)) {
  lookup_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!lookup_.emplace(ids_[i], static_cast<std::uint32_t>(i)).second) {
      throw ConfigError("duplicate id '" + ids_[i] + "' in index");
    }
  }
}

std::optional<std::uint32_t> IdIndex::find(std::string_view id) const {
  const auto it = lookup_.find(std::string(id));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

EventLog::EventLog(std::shared_ptr<const IdIndex> users,
                   std::shared_ptr<const IdIndex> items,
                   std::vector<Interaction> interactions)
    : users_(std::move(users)),
      items_(std::move(items)),
      interactions_(std::move(interactions)) {
  if (!users_ || !items_) throw ConfigError("event log requires id indices");
  for (const auto& e : interactions_) {
    if (e.user >= users_->size() || e.item >= items_->size()) {
      throw IndexOutOfRange("interaction references an unknown user or item");
    }
    if (e.timestamp < 0) throw ConfigError("negative timestamp");
  }
  std::stable_sort(interactions_.begin(), interactions_.end(),
                   [](const Interaction& a, const Interaction& b) {
                     if (a.user != b.user) return a.user < b.user;
                     if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                     return a.order < b.order;
                   });
  offsets_.assign(users_->size() + 1, 0);
  for (const auto& e : interactions_) ++offsets_[e.user + 1];
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
}

EventLog EventLog::from_events(std::span<const Event> events) {
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  std::unordered_map<std::string, std::uint32_t> user_lookup;
  std::unordered_map<std::string, std::uint32_t> item_lookup;
  std::vector<Interaction> interactions;
  interactions.reserve(events.size());
  auto intern = [](std::unordered_map<std::string, std::uint32_t>& lookup,
                   std::vector<std::string>& ids, const std::string& id) {
    const auto [it, inserted] =
        lookup.emplace(id, static_cast<std::uint32_t>(ids.size()));
    if (inserted) ids.push_back(id);
    return it->second;
  };
  for (std::size_t n = 0; n < events.size(); ++n) {
    const Event& e = events[n];
    Interaction x;
    x.user = intern(user_lookup, user_ids, e.user_id);
    x.item = intern(item_lookup, item_ids, e.item_id);
    x.timestamp = e.timestamp;
    x.type = e.type;
    x.order = n;
    interactions.push_back(x);
  }
  return EventLog(std::make_shared<IdIndex>(std::move(user_ids)),
                  std::make_shared<IdIndex>(std::move(item_ids)),
                  std::move(interactions));
}

std::span<const Interaction> EventLog::user_events(std::uint32_t user) const {
  if (user >= num_users()) throw IndexOutOfRange("user index out of range");
  return std::span<const Interaction>(interactions_)
      .subspan(offsets_[user], offsets_[user + 1] - offsets_[user]);
}

std::vector<std::uint32_t> EventLog::user_items(std::uint32_t user) const {
  const auto events = user_events(user);
  std::vector<std::uint32_t> items;
  items.reserve(events.size());
  for (const auto& e : events) items.push_back(e.item);
  return items;
}

std::vector<Event> EventLog::to_events() const {
  std::vector<const Interaction*> by_order;
  by_order.reserve(interactions_.size());
  for (const auto& e : interactions_) by_order.push_back(&e);
  std::sort(by_order.begin(), by_order.end(),
            [](const Interaction* a, const Interaction* b) { return a->order < b->order; });
  std::vector<Event> events;
  events.reserve(by_order.size());
  for (const auto* e : by_order) {
    events.push_back({users_->id(e->user), items_->id(e->item), e->timestamp, e->type});
  }
  return events;
}

LogFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".csv" ? LogFormat::kCsv : LogFormat::kTsv;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

EventLog parse_events(std::istream& in, LogFormat format) {
  const char delim = format == LogFormat::kCsv ? ',' : '\t';
  std::vector<Event> events;
  std::string line;
  std::size_t row = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line, delim);
    if (fields.size() != 4) {
      throw ParseError(row, "expected 4 fields, found " + std::to_string(fields.size()));
    }
    const auto timestamp = parse_int(fields[2]);
    if (!timestamp) {
      if (first_row) {
        first_row = false;
        continue;
      }
      throw ParseError(row, "timestamp '" + std::string(fields[2]) + "' is not an integer");
    }
    first_row = false;
    if (*timestamp < 0) throw ParseError(row, "negative timestamp");
    const auto type = parse_event_type(fields[3]);
    if (!type) {
      throw ParseError(row, "unknown event type '" + std::string(fields[3]) + "'");
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw ParseError(row, "empty user or item id");
    }
    events.push_back({std::string(fields[0]), std::string(fields[1]), *timestamp, *type});
  }
  if (events.empty()) throw EmptyLog();
  return EventLog::from_events(events);
}

EventLog load_events(const std::filesystem::path& path, LogFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return parse_events(in, format);
}

void write_events(std::ostream& out, const EventLog& log, LogFormat format) {
  const char delim = format == LogFormat::kCsv ? ',' : '\t';
  for (const auto& e : log.to_events()) {
    out << e.user_id << delim << e.item_id << delim << e.timestamp << delim
        << event_type_name(e.type) << '\n';
  }
}

EventLog sample_top_items(const EventLog& log, std::size_t n) {
  if (n == 0) throw ConfigError("sample_top_items requires n >= 1");
  const std::size_t num_items = log.num_items();
  std::vector<std::size_t> counts(num_items, 0);
  for (const auto& e : log.interactions()) ++counts[e.item];
  std::vector<std::uint32_t> order(num_items);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return log.items().id(a) < log.items().id(b);
  });
  std::vector<bool> keep_item(num_items, false);
  for (std::size_t r = 0; r < std::min(n, num_items); ++r) keep_item[order[r]] = true;

  std::vector<bool> keep_user(log.num_users(), false);
  for (const auto& e : log.interactions()) {
    if (keep_item[e.item]) keep_user[e.user] = true;
  }
  auto remap = [](const std::vector<bool>& keep, const IdIndex& index,
                  std::vector<std::uint32_t>& mapping) {
    std::vector<std::string> ids;
    mapping.assign(keep.size(), 0);
    for (std::size_t i = 0; i < keep.size(); ++i) {
      if (!keep[i]) continue;
      mapping[i] = static_cast<std::uint32_t>(ids.size());
      ids.push_back(index.id(static_cast<std::uint32_t>(i)));
    }
    return std::make_shared<IdIndex>(std::move(ids));
  };
  std::vector<std::uint32_t> item_map;
  std::vector<std::uint32_t> user_map;
  auto items = remap(keep_item, log.items(), item_map);
  auto users = remap(keep_user, log.users(), user_map);
  std::vector<Interaction> kept;
  for (const auto& e : log.interactions()) {
    if (!keep_item[e.item]) continue;
    Interaction x = e;
    x.item = item_map[e.item];
    x.user = user_map[e.user];
    kept.push_back(x);
  }
  return EventLog(std::move(users), std::move(items), std::move(kept));
}

TemporalSplit split_at(const EventLog& log, std::int64_t cut, double holdout_fraction) {
  std::vector<Interaction> train;
  std::vector<Interaction> test;
  for (const auto& e : log.interactions()) {
    (e.timestamp >= cut ? test : train).push_back(e);
  }
  return TemporalSplit{EventLog(log.user_index(), log.item_index(), std::move(train)),
                       EventLog(log.user_index(), log.item_index(), std::move(test)),
                       cut, holdout_fraction};
}

TemporalSplit temporal_split(const EventLog& log, double holdout_fraction) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw ConfigError("holdout fraction must lie in (0, 1)");
  }
  if (log.empty()) throw EmptyLog();
  const std::size_t n = log.num_events();
  std::vector<std::int64_t> stamps;
  stamps.reserve(n);
  for (const auto& e : log.interactions()) stamps.push_back(e.timestamp);
  std::sort(stamps.begin(), stamps.end());
  if (stamps.front() == stamps.back()) {
    throw DegenerateSplit("all events share timestamp " + std::to_string(stamps.front()));
  }
  // The small slack keeps products such as 0.7 * 10 from rounding up a whole
  // event.
  const double exact = holdout_fraction * static_cast<double>(n);
  auto test_count = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  test_count = std::clamp<std::size_t>(test_count, 1, n - 1);
  const std::size_t boundary = n - test_count;
  std::int64_t cut = stamps[boundary];
  if (cut == stamps.front()) {
    const auto next = std::upper_bound(stamps.begin(), stamps.end(), cut);
    cut = *next;  // exists: not all stamps are equal
  }
  return split_at(log, cut, holdout_fraction);
}

void write_split(std::ostream& out, const TemporalSplit& split) {
  const EventLog& train = split.train;
  out << "#subpop-split\tv1\t" << split.split_timestamp << '\t';
  std::ostringstream fraction;
  fraction.precision(17);
  fraction << split.holdout_fraction;
  out << fraction.str() << '\n';
  for (const auto& id : train.users().ids()) out << "U\t" << id << '\n';
  for (const auto& id : train.items().ids()) out << "I\t" << id << '\n';
  auto dump = [&](const EventLog& log, char part) {
    for (const auto& e : log.interactions()) {
      out << "E\t" << part << '\t' << e.user << '\t' << e.item << '\t' << e.timestamp
          << '\t' << event_type_name(e.type) << '\t' << e.order << '\n';
    }
  };
  dump(train, 'R');
  dump(split.test, 'T');
}

TemporalSplit read_split(std::istream& in) {
  std::string line;
  std::size_t row = 1;
  if (!std::getline(in, line)) throw ParseError(row, "missing split header");
  const auto header = split_fields(line, '\t');
  if (header.size() != 4 || header[0] != "#subpop-split" || header[1] != "v1") {
    throw ParseError(row, "unsupported split header");
  }
  const auto cut = parse_int(header[2]);
  if (!cut) throw ParseError(row, "bad split timestamp");
  const double fraction = std::stod(std::string(header[3]));
  std::vector<std::string> users;
  std::vector<std::string> items;
  std::vector<Interaction> train;
  std::vector<Interaction> test;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = split_fields(line, '\t');
    if (f[0] == "U" && f.size() == 2) {
      users.emplace_back(f[1]);
    } else if (f[0] == "I" && f.size() == 2) {
      items.emplace_back(f[1]);
    } else if (f[0] == "E" && f.size() == 7) {
      const auto user = parse_int(f[2]);
      const auto item = parse_int(f[3]);
      const auto ts = parse_int(f[4]);
      const auto type = parse_event_type(f[5]);
      const auto order = parse_int(f[6]);
      if (!user || !item || !ts || !type || !order) throw ParseError(row, "bad event row");
      Interaction x{static_cast<std::uint32_t>(*user), static_cast<std::uint32_t>(*item),
                    *ts, static_cast<std::uint64_t>(*order), *type};
      (f[1] == "T" ? test : train).push_back(x);
    } else {
      throw ParseError(row, "unrecognised split row");
    }
  }
  auto user_index = std::make_shared<IdIndex>(std::move(users));
  auto item_index = std::make_shared<IdIndex>(std::move(items));
  return TemporalSplit{EventLog(user_index, item_index, std::move(train)),
                       EventLog(user_index, item_index, std::move(test)), *cut, fraction};
}

}  // namespace subpop
