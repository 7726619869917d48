#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "drs/kernels.hpp"
#include "drs/model.hpp"
#include "drs/vocab.hpp"

using namespace drs;
using model::Activations;
using model::ModelConfig;
using model::Net;

namespace {

ModelConfig tiny_cfg(std::int32_t head_out = 13) {
  ModelConfig c;
  c.vocab_size = 13;
  c.d_model = 16;
  c.n_layers = 2;
  c.n_heads = 2;
  c.max_seq = 24;
  c.head_out = head_out;
  return c;
}

std::vector<std::int32_t> random_ids(std::mt19937_64& rng, std::int32_t vocab,
                                     std::size_t n) {
  std::vector<std::int32_t> ids(n);
  for (auto& id : ids) {
    id = static_cast<std::int32_t>(rng() % static_cast<std::uint64_t>(vocab));
  }
  return ids;
}

// Smooth scalar objective for gradient checks: sum over positions of the
// next-token log-softmax.
double logp_objective(const Net& net, const std::vector<std::int32_t>& ids,
                      Activations& acts) {
  net.forward(ids, acts);
  const auto V = static_cast<std::size_t>(net.config().head_out);
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < ids.size(); ++t) {
    const double* row = acts.logits.data() + t * V;
    const double mx = kernels::vmax(row, V);
    double sum = 0.0;
    for (std::size_t o = 0; o < V; ++o) sum += std::exp(row[o] - mx);
    const double logz = std::log(sum) + mx;
    total += row[static_cast<std::size_t>(ids[t + 1])] - logz;
  }
  return total;
}

}  // namespace

TEST_CASE("logits have the contract shape and are finite") {
  Net net = Net::make(tiny_cfg(), 7);
  Activations acts;
  std::mt19937_64 rng(3);
  const auto ids = random_ids(rng, 13, 9);
  net.forward(ids, acts);
  CHECK(acts.logits.size() == 9 * 13);
  for (double x : acts.logits) CHECK(std::isfinite(x));
}

TEST_CASE("softmax over logits normalizes to one") {
  Net net = Net::make(tiny_cfg(), 9);
  Activations acts;
  std::mt19937_64 rng(4);
  const auto ids = random_ids(rng, 13, 8);
  net.forward(ids, acts);
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const double* row = acts.logits.data() + t * 13;
    const double mx = kernels::vmax(row, 13);
    double sum = 0.0;
    for (int o = 0; o < 13; ++o) sum += std::exp(row[o] - mx);
    double total = 0.0;
    for (int o = 0; o < 13; ++o) total += std::exp(row[o] - mx) / sum;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("causality: changing a future token leaves earlier logits unchanged") {
  Net net = Net::make(tiny_cfg(), 11);
  std::mt19937_64 rng(5);
  auto ids = random_ids(rng, 13, 10);
  Activations a1, a2;
  net.forward(ids, a1);
  const std::size_t cut = 6;
  ids[cut] = static_cast<std::int32_t>((ids[cut] + 1) % 13);
  net.forward(ids, a2);
  for (std::size_t t = 0; t < cut; ++t) {
    for (std::size_t o = 0; o < 13; ++o) {
      CHECK(a1.logits[t * 13 + o] == a2.logits[t * 13 + o]);
    }
  }
  bool changed = false;
  for (std::size_t o = 0; o < 13; ++o) {
    changed = changed || a1.logits[cut * 13 + o] != a2.logits[cut * 13 + o];
  }
  CHECK(changed);
}

TEST_CASE("sequence too long throws") {
  Net net = Net::make(tiny_cfg(), 11);
  Activations acts;
  std::mt19937_64 rng(6);
  const auto ids = random_ids(rng, 13, 25);
  CHECK_THROWS_AS(net.forward(ids, acts), model::SequenceTooLongError);
}

TEST_CASE("kv-cache decode matches the full forward pass") {
  Net net = Net::make(tiny_cfg(), 11);
  std::mt19937_64 rng(8);
  const auto ids = random_ids(rng, 13, 12);
  Activations acts;
  net.forward(ids, acts);
  Net::DecodeState ds = net.decode_start();
  std::vector<double> logits;
  for (std::size_t t = 0; t < ids.size(); ++t) {
    net.decode_step(ds, ids[t], logits);
    for (std::size_t o = 0; o < 13; ++o) {
      CHECK(logits[o] == doctest::Approx(acts.logits[t * 13 + o]).epsilon(1e-12));
    }
  }
}

TEST_CASE("analytic gradient matches central finite differences") {
  Net net = Net::make(tiny_cfg(), 21);
  std::mt19937_64 rng(10);
  const auto ids = random_ids(rng, 13, 5);
  Activations acts;

  net.zero_grads();
  net.forward(ids, acts);
  const std::size_t V = 13;
  std::vector<double> dlogits(ids.size() * V, 0.0);
  for (std::size_t t = 0; t + 1 < ids.size(); ++t) {
    const double* row = acts.logits.data() + t * V;
    double* drow = dlogits.data() + t * V;
    const double mx = kernels::vmax(row, V);
    double sum = 0.0;
    for (std::size_t o = 0; o < V; ++o) sum += std::exp(row[o] - mx);
    const double logz = std::log(sum) + mx;
    for (std::size_t o = 0; o < V; ++o) drow[o] = -std::exp(row[o] - logz);
    drow[static_cast<std::size_t>(ids[t + 1])] += 1.0;
  }
  net.backward(ids, acts, dlogits);

  const double h = 1e-5;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t pi = rng() % net.param_count();
    const double orig = net.params()[pi];
    net.params()[pi] = orig + h;
    const double up = logp_objective(net, ids, acts);
    net.params()[pi] = orig - h;
    const double dn = logp_objective(net, ids, acts);
    net.params()[pi] = orig;
    const double fd = (up - dn) / (2.0 * h);
    const double an = net.grads()[pi];
    const double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8});
    CHECK(rel < 1e-4);
  }
}

TEST_CASE("adam with lr zero leaves parameters bit-identical") {
  Net net = Net::make(tiny_cfg(), 31);
  const auto before = net.params();
  std::mt19937_64 rng(2);
  for (auto& g : net.grads()) {
    g = static_cast<double>(rng() % 100) / 10.0 - 5.0;
  }
  model::Adam opt;
  opt.lr = 0.0;
  opt.step(net.params(), net.grads());
  CHECK(net.params() == before);
}

TEST_CASE("grad clipping rescales to the max norm") {
  std::vector<double> g = {3.0, 4.0};
  const double norm = model::clip_grad_norm(g, 1.0);
  CHECK(norm == doctest::Approx(5.0));
  CHECK(std::sqrt(g[0] * g[0] + g[1] * g[1]) == doctest::Approx(1.0));
}

TEST_CASE("checkpoint round trip preserves parameters at f32 precision") {
  const lang::Vocab v = lang::Vocab::robolang();
  Net net = Net::make(tiny_cfg(), 77);
  model::save_checkpoint("ckpt_test.bin", net, v.hash());
  const Net loaded = model::load_checkpoint("ckpt_test.bin", v.hash());
  REQUIRE(loaded.param_count() == net.param_count());
  for (std::size_t i = 0; i < net.param_count(); ++i) {
    CHECK(loaded.params()[i] ==
          static_cast<double>(static_cast<float>(net.params()[i])));
  }
  CHECK_THROWS_AS(model::load_checkpoint("ckpt_test.bin", v.hash() + 1),
                  model::VocabMismatchError);
}

TEST_CASE("pretraining one step on one sample decreases its loss") {
  Net net = Net::make(tiny_cfg(), 5);
  model::PretrainExample ex;
  ex.prompt = {1, 2, 3};
  ex.response = {4, 5, 6, 0};
  const std::vector<model::PretrainExample> corpus = {ex};

  auto loss_of = [&ex](Net& n) {
    Activations acts;
    std::vector<std::int32_t> ids = ex.prompt;
    ids.insert(ids.end(), ex.response.begin(), ex.response.end());
    n.forward(ids, acts);
    double loss = 0.0;
    for (std::size_t pos = ex.prompt.size() - 1; pos + 1 < ids.size(); ++pos) {
      const double* row = acts.logits.data() + pos * 13;
      const double mx = kernels::vmax(row, 13);
      double sum = 0.0;
      for (int o = 0; o < 13; ++o) sum += std::exp(row[o] - mx);
      loss += std::log(sum) + mx - row[ids[pos + 1]];
    }
    return loss / static_cast<double>(ex.response.size());
  };

  const double before = loss_of(net);
  model::PretrainConfig pc;
  pc.steps = 1;
  pc.batch_size = 1;
  pc.lr = 1e-3;
  std::mt19937_64 rng(1);
  model::pretrain_supervised(net, corpus, pc, rng);
  CHECK(loss_of(net) < before);
}

TEST_CASE("pretraining memorizes a single sample") {
  Net net = Net::make(tiny_cfg(), 6);
  model::PretrainExample ex;
  ex.prompt = {1, 2, 3};
  ex.response = {4, 5, 6, 0};
  const std::vector<model::PretrainExample> corpus = {ex};
  model::PretrainConfig pc;
  pc.steps = 400;
  pc.batch_size = 1;
  pc.lr = 3e-3;
  std::mt19937_64 rng(1);
  const double final_loss = model::pretrain_supervised(net, corpus, pc, rng);
  CHECK(final_loss < 0.02);
}

TEST_CASE("parameter checksum is bit-sensitive") {
  Net a = Net::make(tiny_cfg(), 1);
  Net b = Net::make(tiny_cfg(), 1);
  CHECK(a.param_checksum() == b.param_checksum());
  b.params()[0] = std::nextafter(b.params()[0], 1e9);
  CHECK(a.param_checksum() != b.param_checksum());
}
