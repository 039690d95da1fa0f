#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subpop/dataset.hpp"

namespace fixture {

inline subpop::Event ev(std::string user, std::string item, std::int64_t ts,
                        subpop::EventType type = subpop::EventType::kPlay) {
  return subpop::Event{std::move(user), std::move(item), ts, type};
}

inline subpop::EventLog log_of(const std::vector<subpop::Event>& events) {
  return subpop::EventLog::from_events(events);
}

// Dense item index of an id in `log`.
inline std::uint32_t item(const subpop::EventLog& log, const std::string& id) {
  return *log.items().find(id);
}

inline std::uint32_t user(const subpop::EventLog& log, const std::string& id) {
  return *log.users().find(id);
}

}  // namespace fixture
