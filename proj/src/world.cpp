#include "drs/world.hpp"

#include <deque>
#include <stdexcept>

namespace drs::sim {

bool WorldState::reachable(const std::string& from, const std::string& to) const {
  if (from == to) return true;
  std::set<std::string> seen{from};
  std::deque<std::string> frontier{from};
  while (!frontier.empty()) {
    const std::string cur = frontier.front();
    frontier.pop_front();
    for (const auto& [a, b] : adjacency) {
      if (a != cur || seen.count(b)) continue;
      if (b == to) return true;
      seen.insert(b);
      frontier.push_back(b);
    }
  }
  return false;
}

bool WorldState::invariants_hold() const {
  if (rooms.count(robot_room) == 0) return false;
  std::size_t held = 0;
  for (const auto& [obj, loc] : objects) {
    if (loc == kHeld) {
      ++held;
      if (!holding || *holding != obj) return false;
    } else if (rooms.count(loc) == 0) {
      return false;
    }
  }
  if (holding) {
    auto it = objects.find(*holding);
    if (it == objects.end() || it->second != kHeld) return false;
    if (held != 1) return false;
  } else if (held != 0) {
    return false;
  }
  return true;
}

bool Atom::eval(const WorldState& w) const {
  switch (kind) {
    case Kind::ObjectAt: {
      auto it = w.objects.find(obj);
      return it != w.objects.end() && it->second == room;
    }
    case Kind::RobotAt:
      return w.robot_room == room;
    case Kind::SaidContains:
      for (const auto& s : w.said) {
        if (s == text) return true;
      }
      return false;
    case Kind::Holding:
      return w.holding && *w.holding == obj;
    case Kind::HoldingNothing:
      return !w.holding.has_value();
  }
  return false;
}

std::string Atom::to_string() const {
  switch (kind) {
    case Kind::ObjectAt: return "object_at(" + obj + "," + room + ")";
    case Kind::RobotAt: return "robot_at(" + room + ")";
    case Kind::SaidContains: return "said_contains(" + text + ")";
    case Kind::Holding: return "holding(" + obj + ")";
    case Kind::HoldingNothing: return "holding_nothing";
  }
  return {};
}

Atom Atom::parse(const std::string& s) {
  auto args_of = [&s](std::size_t open) {
    if (s.back() != ')') throw std::runtime_error("bad atom: " + s);
    return s.substr(open + 1, s.size() - open - 2);
  };
  if (s == "holding_nothing") return holding_nothing();
  const auto open = s.find('(');
  if (open == std::string::npos) throw std::runtime_error("bad atom: " + s);
  const std::string head = s.substr(0, open);
  const std::string args = args_of(open);
  if (head == "object_at") {
    const auto comma = args.find(',');
    if (comma == std::string::npos) throw std::runtime_error("bad atom: " + s);
    return object_at(args.substr(0, comma), args.substr(comma + 1));
  }
  if (head == "robot_at") return robot_at(args);
  if (head == "said_contains") return said_contains(args);
  if (head == "holding") return holding(args);
  throw std::runtime_error("bad atom: " + s);
}

}  // namespace drs::sim
