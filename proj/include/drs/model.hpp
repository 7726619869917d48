#ifndef DRS_MODEL_HPP_
#define DRS_MODEL_HPP_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "drs/vocab.hpp"

namespace drs::model {

struct SequenceTooLongError : std::runtime_error {
  SequenceTooLongError() : std::runtime_error("sequence exceeds max_seq") {}
};
struct VocabMismatchError : std::runtime_error {
  VocabMismatchError() : std::runtime_error("checkpoint vocabulary hash mismatch") {}
};

struct ModelConfig {
  std::int32_t vocab_size = 0;
  std::int32_t d_model = 64;
  std::int32_t n_layers = 2;
  std::int32_t n_heads = 4;
  std::int32_t max_seq = 160;
  std::int32_t head_out = 0;  // vocab_size for the policy, 1 for the value model

  std::int32_t d_ff() const { return 4 * d_model; }
  std::int32_t d_head() const { return d_model / n_heads; }
};

// Per-sequence forward caches kept for the hand-written backward pass.
struct Activations {
  std::int32_t T = 0;
  struct Layer {
    std::vector<double> x_in;      // T*d block input
    std::vector<double> n1hat;     // T*d pre-affine LN1 output
    std::vector<double> n1;        // T*d post-affine LN1 output
    std::vector<double> ln1_rstd;  // T
    std::vector<double> q, k, v;   // T*d
    std::vector<double> attw;      // heads*T*T softmaxed attention weights
    std::vector<double> ctx;       // T*d concatenated head outputs
    std::vector<double> x_mid;     // T*d after attention residual
    std::vector<double> n2hat, n2; // T*d
    std::vector<double> ln2_rstd;  // T
    std::vector<double> h1, hg;    // T*dff pre/post GELU
  };
  std::vector<Layer> layers;
  std::vector<double> x_final;          // T*d input to the final LN
  std::vector<double> nfhat, nf;        // T*d
  std::vector<double> lnf_rstd;         // T
  std::vector<double> logits;           // T*head_out
};

// Decoder-only pre-LN transformer: learned positional embeddings, causal
// multi-head self-attention, GELU MLP, untied output head. Parameters live
// in one flat double buffer (offset order documented in docs/checkpoint.md).
class Net {
 public:
  struct BlockOff {
    std::size_t ln1_g, ln1_b, wq, bq, wk, bk, wv, bv, wo, bo;
    std::size_t ln2_g, ln2_b, w1, b1, w2, b2;
  };

  static Net make(const ModelConfig& cfg, std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::vector<double>& grads() { return grads_; }
  void zero_grads();
  std::size_t param_count() const { return params_.size(); }
  // FNV-1a over the raw parameter bytes; bit-exact frozen-model check.
  std::uint64_t param_checksum() const;

  // Full causal forward for all positions. Throws SequenceTooLongError.
  void forward(const std::vector<std::int32_t>& ids, Activations& acts) const;
  // Accumulates parameter gradients for d(loss)/d(logits) given in
  // dlogits (T*head_out, same layout as Activations::logits).
  void backward(const std::vector<std::int32_t>& ids, const Activations& acts,
                const std::vector<double>& dlogits);

  // Incremental decoding with a KV cache. Produces the same logits as
  // forward() up to rounding.
  struct DecodeState {
    std::int32_t len = 0;
    std::vector<std::vector<double>> k, v;  // per layer: max_seq*d
  };
  DecodeState decode_start() const;
  // Feeds one token; fills logits_out (head_out) for the next position.
  void decode_step(DecodeState& st, std::int32_t id, std::vector<double>& logits_out) const;

  const BlockOff& block(std::int32_t l) const { return blocks_[static_cast<std::size_t>(l)]; }
  std::size_t off_wte() const { return wte_; }
  std::size_t off_wpe() const { return wpe_; }

 private:
  Net() = default;
  void layout();
  const double* p(std::size_t off) const { return params_.data() + off; }
  double* g(std::size_t off) { return grads_.data() + off; }

  ModelConfig cfg_;
  std::vector<double> params_, grads_;
  std::size_t wte_ = 0, wpe_ = 0, lnf_g_ = 0, lnf_b_ = 0, whead_ = 0, bhead_ = 0;
  std::vector<BlockOff> blocks_;
};

struct Adam {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t t = 0;
  std::vector<double> m, v;

  void step(std::vector<double>& params, const std::vector<double>& grads);
};

// Clips the gradient buffer to a maximum global L2 norm; returns the norm
// before clipping.
double clip_grad_norm(std::vector<double>& grads, double max_norm);

void save_checkpoint(const std::string& path, const Net& net, std::uint64_t vocab_hash);
Net load_checkpoint(const std::string& path, std::uint64_t expected_vocab_hash);

// Supervised next-token pretraining on prompt||response pairs with the loss
// masked to response positions. Returns the mean loss of the final batch.
struct PretrainExample {
  std::vector<std::int32_t> prompt;
  std::vector<std::int32_t> response;  // ends with EOS
};
struct PretrainConfig {
  std::int64_t steps = 1500;
  std::int32_t batch_size = 8;
  double lr = 3e-3;
  double grad_clip = 1.0;
};
double pretrain_supervised(Net& net, const std::vector<PretrainExample>& corpus,
                           const PretrainConfig& cfg, std::mt19937_64& rng,
                           Adam* optimizer = nullptr,
                           std::vector<double>* loss_log = nullptr);

}  // namespace drs::model

#endif  // DRS_MODEL_HPP_
