#include "drs/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "drs/interp.hpp"
#include "drs/tokenizer.hpp"
#include "drs/vocab.hpp"

namespace drs::harness {

namespace {

using sim::Atom;
using sim::TaskSpec;
using sim::WorldState;

struct Gen {
  std::mt19937_64 rng;
  const lang::Vocab& vocab;

  explicit Gen(std::uint64_t seed) : rng(seed), vocab(static_vocab()) {}

  static const lang::Vocab& static_vocab() {
    static const lang::Vocab v = lang::Vocab::robolang();
    return v;
  }

  std::size_t pick_index(std::size_t n) { return rng() % n; }

  template <typename T>
  const T& pick(const std::vector<T>& pool) {
    return pool[pick_index(pool.size())];
  }

  std::vector<std::string> sample_distinct(const std::vector<std::string>& pool,
                                           std::size_t n) {
    std::vector<std::string> shuffled = pool;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    shuffled.resize(n);
    return shuffled;
  }

  WorldState random_world() {
    WorldState w;
    const std::size_t n_rooms = 3 + pick_index(4);   // 3-6
    const std::size_t n_objects = 2 + pick_index(7); // 2-8
    const auto rooms = sample_distinct(lang::room_pool(), n_rooms);
    for (const auto& r : rooms) w.rooms.insert(r);
    // connected: chain the shuffled rooms, then add 0-2 chords
    for (std::size_t i = 1; i < rooms.size(); ++i) {
      w.add_adjacency(rooms[i - 1], rooms[i]);
    }
    const std::size_t chords = pick_index(3);
    for (std::size_t i = 0; i < chords; ++i) {
      const auto& a = pick(rooms);
      const auto& b = pick(rooms);
      if (a != b) w.add_adjacency(a, b);
    }
    for (const auto& o : sample_distinct(lang::object_pool(), n_objects)) {
      w.objects[o] = pick(rooms);
    }
    w.robot_room = pick(rooms);
    return w;
  }

  std::string world_clause(const WorldState& w,
                           const std::vector<std::string>& mention_objects) {
    std::string s = "world : robot at " + w.robot_room + " .";
    for (const auto& o : mention_objects) {
      s += " " + o + " at " + w.objects.at(o) + " .";
    }
    return s;
  }

  static std::string fetch_body(const std::string& obj, const std::string& from,
                                const std::string& to) {
    return "go_to ( " + from + " ) ; pick ( " + obj + " ) ; go_to ( " + to +
           " ) ; place ( " + obj + " ) ;";
  }

  // Extra assertions true in the reference's final state.
  void add_assertions(TaskSpec& task, const WorldState& final_world) {
    std::vector<Atom> pool;
    pool.push_back(final_world.holding ? Atom::holding(*final_world.holding)
                                       : Atom::holding_nothing());
    pool.push_back(Atom::robot_at(final_world.robot_room));
    for (const auto& [obj, loc] : final_world.objects) {
      if (loc != WorldState::kHeld) pool.push_back(Atom::object_at(obj, loc));
    }
    for (const auto& s : final_world.said) pool.push_back(Atom::said_contains(s));
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::size_t n = 1 + pick_index(3);  // 1-3
    for (std::size_t i = 0; i < n && i < pool.size(); ++i) {
      task.assertions.push_back(pool[i]);
    }
  }

  TaskSpec announce(const std::string& id) {
    TaskSpec t;
    t.id = id;
    t.initial_world = random_world();
    const std::string& str_tok = pick(lang::string_pool());       // quoted
    const std::string value = str_tok.substr(1, str_tok.size() - 2);
    t.prompt = "<bos> task : say " + str_tok + " . " +
               world_clause(t.initial_world, {}) + " code :";
    t.reference_program = "say ( " + str_tok + " ) ;";
    t.goal = {Atom::said_contains(value)};
    return t;
  }

  TaskSpec fetch(const std::string& id) {
    TaskSpec t;
    t.id = id;
    t.initial_world = random_world();
    const auto objs = object_names(t.initial_world);
    const std::string obj = pick(objs);
    const std::string from = t.initial_world.objects.at(obj);
    const std::string to = pick_room(t.initial_world);
    t.prompt = "<bos> task : fetch " + obj + " to " + to + " . " +
               world_clause(t.initial_world, {obj}) + " code :";
    t.reference_program = fetch_body(obj, from, to);
    t.goal = {Atom::object_at(obj, to)};
    return t;
  }

  TaskSpec deliver(const std::string& id) {
    TaskSpec t;
    t.id = id;
    t.initial_world = random_world();
    const auto objs = object_names(t.initial_world);
    const std::string obj = pick(objs);
    const std::string from = t.initial_world.objects.at(obj);
    const std::string to = pick_room(t.initial_world);
    const std::string home = t.initial_world.robot_room;
    t.prompt = "<bos> task : deliver " + obj + " to " + to + " then return . " +
               world_clause(t.initial_world, {obj}) + " code :";
    t.reference_program = fetch_body(obj, from, to) + " go_to ( " + home + " ) ;";
    t.goal = {Atom::object_at(obj, to), Atom::robot_at(home)};
    return t;
  }

  TaskSpec multi_pickup(const std::string& id) {
    TaskSpec t;
    t.id = id;
    // needs two objects
    do {
      t.initial_world = random_world();
    } while (t.initial_world.objects.size() < 2);
    const auto objs = sample_distinct(object_names(t.initial_world), 2);
    const std::string to = pick_room(t.initial_world);
    t.prompt = "<bos> task : collect " + objs[0] + " and " + objs[1] + " in " + to +
               " . " + world_clause(t.initial_world, {objs[0], objs[1]}) + " code :";
    t.reference_program =
        fetch_body(objs[0], t.initial_world.objects.at(objs[0]), to) + " " +
        fetch_body(objs[1], t.initial_world.objects.at(objs[1]), to);
    t.goal = {Atom::object_at(objs[0], to), Atom::object_at(objs[1], to)};
    return t;
  }

  TaskSpec conditional_fetch(const std::string& id) {
    TaskSpec t;
    t.id = id;
    do {
      t.initial_world = random_world();
    } while (t.initial_world.objects.size() < 2);
    // co-locate both candidate objects in the robot's room to keep the
    // branches short
    const auto objs = sample_distinct(object_names(t.initial_world), 2);
    t.initial_world.objects[objs[0]] = t.initial_world.robot_room;
    t.initial_world.objects[objs[1]] = t.initial_world.robot_room;
    const std::string to = pick_room(t.initial_world);
    const int a = 1 + static_cast<int>(pick_index(9));
    int b = 1 + static_cast<int>(pick_index(9));
    while (b == a) b = 1 + static_cast<int>(pick_index(9));
    const std::string sa = std::to_string(a), sb = std::to_string(b);
    const std::string var = pick(lang::var_pool());
    auto branch = [&to](const std::string& obj) {
      return "pick ( " + obj + " ) ; go_to ( " + to + " ) ; place ( " + obj + " ) ;";
    };
    t.prompt = "<bos> task : if " + sa + " > " + sb + " fetch " + objs[0] + " to " +
               to + " else fetch " + objs[1] + " to " + to + " . " +
               world_clause(t.initial_world, {objs[0], objs[1]}) + " code :";
    t.reference_program = var + " = " + sa + " ; if " + var + " > " + sb + " { " +
                          branch(objs[0]) + " } else { " + branch(objs[1]) + " }";
    t.goal = {Atom::object_at(a > b ? objs[0] : objs[1], to)};
    return t;
  }

  static std::vector<std::string> object_names(const WorldState& w) {
    std::vector<std::string> out;
    for (const auto& [obj, loc] : w.objects) out.push_back(obj);
    return out;
  }

  std::string pick_room(const WorldState& w) {
    std::vector<std::string> rooms(w.rooms.begin(), w.rooms.end());
    return pick(rooms);
  }

  bool valid(TaskSpec& t) {
    // prompt and reference must tokenize; the reference must execute to
    // Success and satisfy every assertion
    try {
      (void)lang::tokenize(vocab, t.prompt);
      const auto tp = lang::tokenize(vocab, t.reference_program);
      const sim::TaskRun run = sim::run_task(vocab, tp, t);
      return run.outcome.kind == sim::SimOutcome::Kind::Success && run.assertions_pass;
    } catch (const std::exception&) {
      return false;
    }
  }

  TaskSpec make(const std::string& id, int bucket) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      TaskSpec t;
      switch (bucket) {
        case 0:
          t = announce(id);
          break;
        case 1: {
          const std::size_t r = pick_index(10);
          if (r < 5) {
            t = fetch(id);
          } else if (r < 9) {
            t = deliver(id);
          } else {
            t = multi_pickup(id);
          }
          break;
        }
        default:
          t = conditional_fetch(id);
          break;
      }
      // run reference once to know the final state, then sample assertions
      const auto tp = lang::tokenize(vocab, t.reference_program);
      const sim::TaskRun run = sim::run_task(vocab, tp, t);
      if (run.outcome.kind != sim::SimOutcome::Kind::Success) continue;
      add_assertions(t, run.final_world);
      if (valid(t)) return t;
    }
    throw GenerationRetryExhaustedError();
  }
};

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<sim::TaskSpec> generate_corpus(std::uint64_t seed, const GenOptions& opts) {
  if (opts.n_tasks < 1) throw std::invalid_argument("n_tasks must be >= 1");
  Gen gen(seed);
  std::vector<TaskSpec> tasks;
  tasks.reserve(static_cast<std::size_t>(opts.n_tasks));
  const double total = opts.frac_one_step + opts.frac_multi_step + opts.frac_conditional;
  for (std::int32_t i = 0; i < opts.n_tasks; ++i) {
    const double u =
        total * static_cast<double>(i % 100) / 100.0;  // stratified mix
    int bucket = 2;
    if (u < opts.frac_one_step) {
      bucket = 0;
    } else if (u < opts.frac_one_step + opts.frac_multi_step) {
      bucket = 1;
    }
    tasks.push_back(gen.make(opts.id_prefix + std::to_string(i), bucket));
  }
  return tasks;
}

std::string serialize_task(const sim::TaskSpec& task) {
  auto forbid = [](const std::string& v) {
    if (v.find('|') != std::string::npos || v.find('\n') != std::string::npos) {
      throw std::invalid_argument("task field contains a reserved character");
    }
    return v;
  };
  std::vector<std::string> rooms(task.initial_world.rooms.begin(),
                                 task.initial_world.rooms.end());
  std::vector<std::string> adj;
  for (const auto& [a, b] : task.initial_world.adjacency) {
    if (a < b) adj.push_back(a + "-" + b);
  }
  std::vector<std::string> objs;
  for (const auto& [o, loc] : task.initial_world.objects) objs.push_back(o + ":" + loc);
  std::vector<std::string> goals, asserts;
  for (const auto& a : task.goal) goals.push_back(a.to_string());
  for (const auto& a : task.assertions) asserts.push_back(a.to_string());

  std::ostringstream os;
  os << "id=" << forbid(task.id) << "|prompt=" << forbid(task.prompt)
     << "|rooms=" << join(rooms, ',') << "|adjacency=" << join(adj, ',')
     << "|objects=" << join(objs, ',') << "|robot_room=" << task.initial_world.robot_room
     << "|goal_atoms=" << join(goals, '&') << "|assertions=" << join(asserts, '&')
     << "|reference_program=" << forbid(task.reference_program);
  return os.str();
}

sim::TaskSpec parse_task(const std::string& line) {
  const auto fields = split(line, '|');
  const std::vector<std::string> expected = {
      "id", "prompt", "rooms", "adjacency", "objects", "robot_room",
      "goal_atoms", "assertions", "reference_program"};
  if (fields.size() != expected.size()) {
    throw std::runtime_error("task record has " + std::to_string(fields.size()) +
                             " fields, want 9");
  }
  std::map<std::string, std::string> kv;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto eq = fields[i].find('=');
    if (eq == std::string::npos || fields[i].substr(0, eq) != expected[i]) {
      throw std::runtime_error("bad task field order at '" + fields[i] + "'");
    }
    kv[expected[i]] = fields[i].substr(eq + 1);
  }
  sim::TaskSpec t;
  t.id = kv["id"];
  t.prompt = kv["prompt"];
  for (const auto& r : split(kv["rooms"], ',')) {
    if (!r.empty()) t.initial_world.rooms.insert(r);
  }
  for (const auto& e : split(kv["adjacency"], ',')) {
    if (e.empty()) continue;
    const auto dash = e.find('-');
    if (dash == std::string::npos) throw std::runtime_error("bad adjacency: " + e);
    t.initial_world.add_adjacency(e.substr(0, dash), e.substr(dash + 1));
  }
  for (const auto& o : split(kv["objects"], ',')) {
    if (o.empty()) continue;
    const auto colon = o.find(':');
    if (colon == std::string::npos) throw std::runtime_error("bad object: " + o);
    t.initial_world.objects[o.substr(0, colon)] = o.substr(colon + 1);
  }
  t.initial_world.robot_room = kv["robot_room"];
  for (const auto& a : split(kv["goal_atoms"], '&')) {
    if (!a.empty()) t.goal.push_back(sim::Atom::parse(a));
  }
  for (const auto& a : split(kv["assertions"], '&')) {
    if (!a.empty()) t.assertions.push_back(sim::Atom::parse(a));
  }
  t.reference_program = kv["reference_program"];
  return t;
}

void save_corpus(const std::string& path, const std::vector<sim::TaskSpec>& tasks) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write corpus: " + path);
  for (const auto& t : tasks) out << serialize_task(t) << '\n';
}

std::vector<sim::TaskSpec> load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read corpus: " + path);
  std::vector<sim::TaskSpec> tasks;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) tasks.push_back(parse_task(line));
  }
  return tasks;
}

}  // namespace drs::harness
