#ifndef DRS_WORLD_HPP_
#define DRS_WORLD_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace drs::sim {

// Discrete service-robot world: named rooms with a symmetric adjacency
// relation, objects located in rooms or held by the robot (at most one),
// and a transcript of emitted strings.
struct WorldState {
  static constexpr const char* kHeld = "<held>";

  std::set<std::string> rooms;
  std::map<std::string, std::string> objects;  // object -> room or kHeld
  std::string robot_room;
  std::optional<std::string> holding;
  std::set<std::pair<std::string, std::string>> adjacency;  // stored both ways
  std::vector<std::string> said;

  void add_adjacency(const std::string& a, const std::string& b) {
    adjacency.insert({a, b});
    adjacency.insert({b, a});
  }
  bool adjacent(const std::string& a, const std::string& b) const {
    return adjacency.count({a, b}) > 0;
  }
  // BFS over the adjacency relation.
  bool reachable(const std::string& from, const std::string& to) const;
  bool invariants_hold() const;
};

struct Atom {
  enum class Kind : std::uint8_t {
    ObjectAt,      // object_at(obj, room)
    RobotAt,       // robot_at(room)
    SaidContains,  // said_contains(text)
    Holding,       // holding(obj)
    HoldingNothing
  };
  Kind kind = Kind::HoldingNothing;
  std::string obj, room, text;

  bool eval(const WorldState& w) const;
  std::string to_string() const;
  static Atom parse(const std::string& s);

  static Atom object_at(std::string o, std::string r) {
    return {Kind::ObjectAt, std::move(o), std::move(r), {}};
  }
  static Atom robot_at(std::string r) { return {Kind::RobotAt, {}, std::move(r), {}}; }
  static Atom said_contains(std::string t) {
    return {Kind::SaidContains, {}, {}, std::move(t)};
  }
  static Atom holding(std::string o) { return {Kind::Holding, std::move(o), {}, {}}; }
  static Atom holding_nothing() { return {Kind::HoldingNothing, {}, {}, {}}; }
};

struct TaskSpec {
  std::string id;
  std::string prompt;
  WorldState initial_world;
  std::vector<Atom> goal;        // conjunction
  std::vector<Atom> assertions;  // post-hoc unit-test checks
  std::string reference_program;
};

}  // namespace drs::sim

#endif  // DRS_WORLD_HPP_
