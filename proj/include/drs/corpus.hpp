#ifndef DRS_CORPUS_HPP_
#define DRS_CORPUS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "drs/world.hpp"

namespace drs::harness {

struct GenerationRetryExhaustedError : std::runtime_error {
  GenerationRetryExhaustedError()
      : std::runtime_error("no valid task after 100 world resamples") {}
};

struct GenOptions {
  std::int32_t n_tasks = 100;
  // Difficulty mix: one-step announces, 2-3 step fetch/deliver/collect,
  // conditional fetches.
  double frac_one_step = 0.4;
  double frac_multi_step = 0.4;
  double frac_conditional = 0.2;
  std::string id_prefix = "t";
};

// Procedural worlds (3-6 rooms, 2-8 objects, connected adjacency) and tasks
// from the five templates {announce, fetch, deliver, multi-pickup,
// conditional-fetch}. Every generated TaskSpec's reference program runs to
// Success and passes all its assertions (verified at generation time).
std::vector<sim::TaskSpec> generate_corpus(std::uint64_t seed, const GenOptions& opts);

// Line-delimited format documented in docs/corpus.md.
void save_corpus(const std::string& path, const std::vector<sim::TaskSpec>& tasks);
std::vector<sim::TaskSpec> load_corpus(const std::string& path);

std::string serialize_task(const sim::TaskSpec& task);
sim::TaskSpec parse_task(const std::string& line);

}  // namespace drs::harness

#endif  // DRS_CORPUS_HPP_
