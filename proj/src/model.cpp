#include "drs/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "drs/kernels.hpp"

namespace drs::model {

namespace k = drs::kernels;

namespace {

constexpr double kLnEps = 1e-5;
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)

inline double gelu(double x) {
  const double u = kGeluC * (x + 0.044715 * x * x * x);
  return 0.5 * x * (1.0 + std::tanh(u));
}

inline double gelu_grad(double x) {
  const double u = kGeluC * (x + 0.044715 * x * x * x);
  const double th = std::tanh(u);
  const double du = kGeluC * (1.0 + 3.0 * 0.044715 * x * x);
  return 0.5 * (1.0 + th) + 0.5 * x * (1.0 - th * th) * du;
}

// y = g .* (x-mu)*rstd + b; returns rstd, writes nhat (pre-affine) and y.
inline double layernorm_row(const double* x, const double* gamma, const double* beta,
                            double* nhat, double* y, std::int32_t d) {
  const double mu = k::vsum(x, static_cast<std::size_t>(d)) / d;
  double var = 0.0;
  for (std::int32_t i = 0; i < d; ++i) {
    const double c = x[i] - mu;
    var += c * c;
  }
  var /= d;
  const double rstd = 1.0 / std::sqrt(var + kLnEps);
  for (std::int32_t i = 0; i < d; ++i) {
    nhat[i] = (x[i] - mu) * rstd;
    y[i] = gamma[i] * nhat[i] + beta[i];
  }
  return rstd;
}

// dy is the post-affine gradient; accumulates dgamma/dbeta, adds into dx.
inline void layernorm_backward_row(const double* dy, const double* nhat, double rstd,
                                   const double* gamma, double* dgamma, double* dbeta,
                                   double* dx, std::int32_t d) {
  double mean_dn = 0.0, mean_dn_nhat = 0.0;
  for (std::int32_t i = 0; i < d; ++i) {
    const double dn = dy[i] * gamma[i];
    mean_dn += dn;
    mean_dn_nhat += dn * nhat[i];
    dgamma[i] += dy[i] * nhat[i];
    dbeta[i] += dy[i];
  }
  mean_dn /= d;
  mean_dn_nhat /= d;
  for (std::int32_t i = 0; i < d; ++i) {
    const double dn = dy[i] * gamma[i];
    dx[i] += rstd * (dn - mean_dn - nhat[i] * mean_dn_nhat);
  }
}

// y = W x + b, W row-major [n_out x n_in]
inline void linear_row(const double* w, const double* b, const double* x, double* y,
                       std::int32_t n_out, std::int32_t n_in) {
  for (std::int32_t o = 0; o < n_out; ++o) {
    y[o] = k::dot(w + static_cast<std::size_t>(o) * n_in, x,
                  static_cast<std::size_t>(n_in)) +
           b[o];
  }
}

// Accumulates dW += dy ⊗ x, db += dy, dx += W^T dy.
inline void linear_backward_row(const double* w, const double* x, const double* dy,
                                double* dW, double* db, double* dx, std::int32_t n_out,
                                std::int32_t n_in) {
  for (std::int32_t o = 0; o < n_out; ++o) {
    const double g = dy[o];
    if (g == 0.0) continue;
    k::axpy(g, x, dW + static_cast<std::size_t>(o) * n_in,
            static_cast<std::size_t>(n_in));
    db[o] += g;
    k::axpy(g, w + static_cast<std::size_t>(o) * n_in, dx,
            static_cast<std::size_t>(n_in));
  }
}

}  // namespace

Net Net::make(const ModelConfig& cfg, std::uint64_t seed) {
  if (cfg.vocab_size <= 0 || cfg.head_out <= 0 || cfg.d_model % cfg.n_heads != 0) {
    throw std::invalid_argument("bad model config");
  }
  Net net;
  net.cfg_ = cfg;
  net.layout();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 0.02);
  for (double& p : net.params_) p = nd(rng);
  auto zero_at = [&net](std::size_t off, std::int32_t n) {
    for (std::int32_t i = 0; i < n; ++i) net.params_[off + static_cast<std::size_t>(i)] = 0.0;
  };
  auto one_at = [&net](std::size_t off, std::int32_t n) {
    for (std::int32_t i = 0; i < n; ++i) net.params_[off + static_cast<std::size_t>(i)] = 1.0;
  };
  const std::int32_t d = cfg.d_model, dff = cfg.d_ff();
  for (const BlockOff& b : net.blocks_) {
    one_at(b.ln1_g, d);
    zero_at(b.ln1_b, d);
    zero_at(b.bq, d);
    zero_at(b.bk, d);
    zero_at(b.bv, d);
    zero_at(b.bo, d);
    one_at(b.ln2_g, d);
    zero_at(b.ln2_b, d);
    zero_at(b.b1, dff);
    zero_at(b.b2, d);
  }
  one_at(net.lnf_g_, d);
  zero_at(net.lnf_b_, d);
  zero_at(net.bhead_, cfg.head_out);
  return net;
}

void Net::layout() {
  const auto d = static_cast<std::size_t>(cfg_.d_model);
  const auto dff = static_cast<std::size_t>(cfg_.d_ff());
  std::size_t cur = 0;
  auto take = [&cur](std::size_t n) {
    const std::size_t off = cur;
    cur += n;
    return off;
  };
  wte_ = take(static_cast<std::size_t>(cfg_.vocab_size) * d);
  wpe_ = take(static_cast<std::size_t>(cfg_.max_seq) * d);
  blocks_.clear();
  for (std::int32_t l = 0; l < cfg_.n_layers; ++l) {
    BlockOff b{};
    b.ln1_g = take(d);
    b.ln1_b = take(d);
    b.wq = take(d * d);
    b.bq = take(d);
    b.wk = take(d * d);
    b.bk = take(d);
    b.wv = take(d * d);
    b.bv = take(d);
    b.wo = take(d * d);
    b.bo = take(d);
    b.ln2_g = take(d);
    b.ln2_b = take(d);
    b.w1 = take(dff * d);
    b.b1 = take(dff);
    b.w2 = take(d * dff);
    b.b2 = take(d);
    blocks_.push_back(b);
  }
  lnf_g_ = take(d);
  lnf_b_ = take(d);
  whead_ = take(static_cast<std::size_t>(cfg_.head_out) * d);
  bhead_ = take(static_cast<std::size_t>(cfg_.head_out));
  params_.assign(cur, 0.0);
  grads_.assign(cur, 0.0);
}

void Net::zero_grads() { std::fill(grads_.begin(), grads_.end(), 0.0); }

std::uint64_t Net::param_checksum() const {
  std::uint64_t h = 1469598103934665603ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(params_.data());
  for (std::size_t i = 0; i < params_.size() * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

void Net::forward(const std::vector<std::int32_t>& ids, Activations& acts) const {
  const auto T = static_cast<std::int32_t>(ids.size());
  if (T > cfg_.max_seq) throw SequenceTooLongError();
  const std::int32_t d = cfg_.d_model, dff = cfg_.d_ff(), H = cfg_.n_heads,
                     dh = cfg_.d_head();
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));
  const auto td = static_cast<std::size_t>(T) * static_cast<std::size_t>(d);

  acts.T = T;
  acts.layers.resize(static_cast<std::size_t>(cfg_.n_layers));
  acts.x_final.assign(td, 0.0);
  acts.nfhat.assign(td, 0.0);
  acts.nf.assign(td, 0.0);
  acts.lnf_rstd.assign(static_cast<std::size_t>(T), 0.0);
  acts.logits.assign(static_cast<std::size_t>(T) * cfg_.head_out, 0.0);
  if (T == 0) return;

  std::vector<double> x(td);
  for (std::int32_t t = 0; t < T; ++t) {
    const auto id = static_cast<std::size_t>(ids[static_cast<std::size_t>(t)]);
    const double* te = p(wte_ + id * d);
    const double* pe = p(wpe_ + static_cast<std::size_t>(t) * d);
    double* xt = x.data() + static_cast<std::size_t>(t) * d;
    for (std::int32_t i = 0; i < d; ++i) xt[i] = te[i] + pe[i];
  }

  for (std::int32_t l = 0; l < cfg_.n_layers; ++l) {
    Activations::Layer& L = acts.layers[static_cast<std::size_t>(l)];
    const BlockOff& B = blocks_[static_cast<std::size_t>(l)];
    L.x_in = x;
    L.n1hat.assign(td, 0.0);
    L.n1.assign(td, 0.0);
    L.ln1_rstd.assign(static_cast<std::size_t>(T), 0.0);
    L.q.assign(td, 0.0);
    L.k.assign(td, 0.0);
    L.v.assign(td, 0.0);
    L.attw.assign(static_cast<std::size_t>(H) * T * T, 0.0);
    L.ctx.assign(td, 0.0);

    for (std::int32_t t = 0; t < T; ++t) {
      const std::size_t o = static_cast<std::size_t>(t) * d;
      L.ln1_rstd[static_cast<std::size_t>(t)] = layernorm_row(
          x.data() + o, p(B.ln1_g), p(B.ln1_b), L.n1hat.data() + o, L.n1.data() + o, d);
      linear_row(p(B.wq), p(B.bq), L.n1.data() + o, L.q.data() + o, d, d);
      linear_row(p(B.wk), p(B.bk), L.n1.data() + o, L.k.data() + o, d, d);
      linear_row(p(B.wv), p(B.bv), L.n1.data() + o, L.v.data() + o, d, d);
    }

    for (std::int32_t h = 0; h < H; ++h) {
      const std::size_t hs = static_cast<std::size_t>(h) * dh;
      for (std::int32_t t = 0; t < T; ++t) {
        double* aw = L.attw.data() +
                     (static_cast<std::size_t>(h) * T + static_cast<std::size_t>(t)) * T;
        const double* qt = L.q.data() + static_cast<std::size_t>(t) * d + hs;
        double mx = -1e300;
        for (std::int32_t s = 0; s <= t; ++s) {
          const double sc =
              k::dot(qt, L.k.data() + static_cast<std::size_t>(s) * d + hs,
                     static_cast<std::size_t>(dh)) *
              inv_sqrt_dh;
          aw[s] = sc;
          mx = sc > mx ? sc : mx;
        }
        double sum = 0.0;
        for (std::int32_t s = 0; s <= t; ++s) {
          aw[s] = std::exp(aw[s] - mx);
          sum += aw[s];
        }
        const double inv = 1.0 / sum;
        for (std::int32_t s = 0; s <= t; ++s) aw[s] *= inv;
        double* ct = L.ctx.data() + static_cast<std::size_t>(t) * d + hs;
        for (std::int32_t s = 0; s <= t; ++s) {
          k::axpy(aw[s], L.v.data() + static_cast<std::size_t>(s) * d + hs, ct,
                  static_cast<std::size_t>(dh));
        }
      }
    }

    L.x_mid.assign(td, 0.0);
    std::vector<double> ao(static_cast<std::size_t>(d));
    for (std::int32_t t = 0; t < T; ++t) {
      const std::size_t o = static_cast<std::size_t>(t) * d;
      linear_row(p(B.wo), p(B.bo), L.ctx.data() + o, ao.data(), d, d);
      for (std::int32_t i = 0; i < d; ++i) L.x_mid[o + i] = L.x_in[o + i] + ao[static_cast<std::size_t>(i)];
    }

    L.n2hat.assign(td, 0.0);
    L.n2.assign(td, 0.0);
    L.ln2_rstd.assign(static_cast<std::size_t>(T), 0.0);
    L.h1.assign(static_cast<std::size_t>(T) * dff, 0.0);
    L.hg.assign(static_cast<std::size_t>(T) * dff, 0.0);
    std::vector<double> f(static_cast<std::size_t>(d));
    for (std::int32_t t = 0; t < T; ++t) {
      const std::size_t o = static_cast<std::size_t>(t) * d;
      const std::size_t of = static_cast<std::size_t>(t) * dff;
      L.ln2_rstd[static_cast<std::size_t>(t)] =
          layernorm_row(L.x_mid.data() + o, p(B.ln2_g), p(B.ln2_b), L.n2hat.data() + o,
                        L.n2.data() + o, d);
      linear_row(p(B.w1), p(B.b1), L.n2.data() + o, L.h1.data() + of, dff, d);
      for (std::int32_t i = 0; i < dff; ++i) L.hg[of + i] = gelu(L.h1[of + i]);
      linear_row(p(B.w2), p(B.b2), L.hg.data() + of, f.data(), d, dff);
      for (std::int32_t i = 0; i < d; ++i) x[o + i] = L.x_mid[o + i] + f[static_cast<std::size_t>(i)];
    }
  }

  acts.x_final = x;
  for (std::int32_t t = 0; t < T; ++t) {
    const std::size_t o = static_cast<std::size_t>(t) * d;
    acts.lnf_rstd[static_cast<std::size_t>(t)] = layernorm_row(
        x.data() + o, p(lnf_g_), p(lnf_b_), acts.nfhat.data() + o, acts.nf.data() + o, d);
    linear_row(p(whead_), p(bhead_), acts.nf.data() + o,
               acts.logits.data() + static_cast<std::size_t>(t) * cfg_.head_out,
               cfg_.head_out, d);
  }
}

void Net::backward(const std::vector<std::int32_t>& ids, const Activations& acts,
                   const std::vector<double>& dlogits) {
  const std::int32_t T = acts.T;
  const std::int32_t d = cfg_.d_model, dff = cfg_.d_ff(), H = cfg_.n_heads,
                     dh = cfg_.d_head();
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));
  const auto td = static_cast<std::size_t>(T) * static_cast<std::size_t>(d);
  if (dlogits.size() != static_cast<std::size_t>(T) * cfg_.head_out) {
    throw std::invalid_argument("dlogits size mismatch");
  }
  if (T == 0) return;

  std::vector<double> dx(td, 0.0);
  {
    std::vector<double> dnf(static_cast<std::size_t>(d));
    for (std::int32_t t = 0; t < T; ++t) {
      const std::size_t o = static_cast<std::size_t>(t) * d;
      std::fill(dnf.begin(), dnf.end(), 0.0);
      linear_backward_row(p(whead_), acts.nf.data() + o,
                          dlogits.data() + static_cast<std::size_t>(t) * cfg_.head_out,
                          g(whead_), g(bhead_), dnf.data(), cfg_.head_out, d);
      layernorm_backward_row(dnf.data(), acts.nfhat.data() + o,
                             acts.lnf_rstd[static_cast<std::size_t>(t)], p(lnf_g_),
                             g(lnf_g_), g(lnf_b_), dx.data() + o, d);
    }
  }

  std::vector<double> dxmid(td), dn2(static_cast<std::size_t>(d)),
      dh1(static_cast<std::size_t>(dff)), dhg(static_cast<std::size_t>(dff)),
      dctx(td), dqv(td), dkv(td), dvv(td), dn1(static_cast<std::size_t>(d)),
      dao(static_cast<std::size_t>(d));

  for (std::int32_t l = cfg_.n_layers - 1; l >= 0; --l) {
    const Activations::Layer& L = acts.layers[static_cast<std::size_t>(l)];
    const BlockOff& B = blocks_[static_cast<std::size_t>(l)];

    // FFN backward; dx holds the gradient w.r.t. the block output.
    std::fill(dxmid.begin(), dxmid.end(), 0.0);
    for (std::int32_t t = 0; t < T; ++t) {
      const std::size_t o = static_cast<std::size_t>(t) * d;
      const std::size_t of = static_cast<std::size_t>(t) * dff;
      for (std::int32_t i = 0; i < d; ++i) dxmid[o + i] += dx[o + i];
      std::fill(dhg.begin(), dhg.end(), 0.0);
      linear_backward_row(p(B.w2), L.hg.data() + of, dx.data() + o, g(B.w2), g(B.b2),
                          dhg.data(), d, dff);
      for (std::int32_t i = 0; i < dff; ++i) {
        dh1[static_cast<std::size_t>(i)] =
            dhg[static_cast<std::size_t>(i)] * gelu_grad(L.h1[of + i]);
      }
      std::fill(dn2.begin(), dn2.end(), 0.0);
      linear_backward_row(p(B.w1), L.n2.data() + o, dh1.data(), g(B.w1), g(B.b1),
                          dn2.data(), dff, d);
      layernorm_backward_row(dn2.data(), L.n2hat.data() + o,
                             L.ln2_rstd[static_cast<std::size_t>(t)], p(B.ln2_g),
                             g(B.ln2_g), g(B.ln2_b), dxmid.data() + o, d);
    }

    // Attention backward; dxmid holds the gradient w.r.t. x_mid.
    std::fill(dx.begin(), dx.end(), 0.0);  // becomes the gradient w.r.t. x_in
    std::fill(dctx.begin(), dctx.end(), 0.0);
    for (std::int32_t t = 0; t < T; ++t) {
      const std::size_t o = static_cast<std::size_t>(t) * d;
      for (std::int32_t i = 0; i < d; ++i) dx[o + i] += dxmid[o + i];
      std::copy(dxmid.begin() + static_cast<std::ptrdiff_t>(o),
                dxmid.begin() + static_cast<std::ptrdiff_t>(o + d), dao.begin());
      linear_backward_row(p(B.wo), L.ctx.data() + o, dao.data(), g(B.wo), g(B.bo),
                          dctx.data() + o, d, d);
    }

    std::fill(dqv.begin(), dqv.end(), 0.0);
    std::fill(dkv.begin(), dkv.end(), 0.0);
    std::fill(dvv.begin(), dvv.end(), 0.0);
    std::vector<double> dscore(static_cast<std::size_t>(T));
    for (std::int32_t h = 0; h < H; ++h) {
      const std::size_t hs = static_cast<std::size_t>(h) * dh;
      for (std::int32_t t = 0; t < T; ++t) {
        const double* aw =
            L.attw.data() +
            (static_cast<std::size_t>(h) * T + static_cast<std::size_t>(t)) * T;
        const double* dct = dctx.data() + static_cast<std::size_t>(t) * d + hs;
        double sum_aw_ds = 0.0;
        for (std::int32_t s = 0; s <= t; ++s) {
          const double* vs = L.v.data() + static_cast<std::size_t>(s) * d + hs;
          dscore[static_cast<std::size_t>(s)] =
              k::dot(dct, vs, static_cast<std::size_t>(dh));
          k::axpy(aw[s], dct, dvv.data() + static_cast<std::size_t>(s) * d + hs,
                  static_cast<std::size_t>(dh));
          sum_aw_ds += aw[s] * dscore[static_cast<std::size_t>(s)];
        }
        const double* qt = L.q.data() + static_cast<std::size_t>(t) * d + hs;
        double* dqt = dqv.data() + static_cast<std::size_t>(t) * d + hs;
        for (std::int32_t s = 0; s <= t; ++s) {
          const double ds =
              aw[s] * (dscore[static_cast<std::size_t>(s)] - sum_aw_ds) * inv_sqrt_dh;
          if (ds == 0.0) continue;
          k::axpy(ds, L.k.data() + static_cast<std::size_t>(s) * d + hs, dqt,
                  static_cast<std::size_t>(dh));
          k::axpy(ds, qt, dkv.data() + static_cast<std::size_t>(s) * d + hs,
                  static_cast<std::size_t>(dh));
        }
      }
    }

    for (std::int32_t t = 0; t < T; ++t) {
      const std::size_t o = static_cast<std::size_t>(t) * d;
      std::fill(dn1.begin(), dn1.end(), 0.0);
      linear_backward_row(p(B.wq), L.n1.data() + o, dqv.data() + o, g(B.wq), g(B.bq),
                          dn1.data(), d, d);
      linear_backward_row(p(B.wk), L.n1.data() + o, dkv.data() + o, g(B.wk), g(B.bk),
                          dn1.data(), d, d);
      linear_backward_row(p(B.wv), L.n1.data() + o, dvv.data() + o, g(B.wv), g(B.bv),
                          dn1.data(), d, d);
      layernorm_backward_row(dn1.data(), L.n1hat.data() + o,
                             L.ln1_rstd[static_cast<std::size_t>(t)], p(B.ln1_g),
                             g(B.ln1_g), g(B.ln1_b), dx.data() + o, d);
    }
  }

  for (std::int32_t t = 0; t < T; ++t) {
    const std::size_t o = static_cast<std::size_t>(t) * d;
    const auto id = static_cast<std::size_t>(ids[static_cast<std::size_t>(t)]);
    k::axpy(1.0, dx.data() + o, g(wte_ + id * d), static_cast<std::size_t>(d));
    k::axpy(1.0, dx.data() + o, g(wpe_ + static_cast<std::size_t>(t) * d),
            static_cast<std::size_t>(d));
  }
}

Net::DecodeState Net::decode_start() const {
  DecodeState st;
  st.len = 0;
  st.k.assign(static_cast<std::size_t>(cfg_.n_layers),
              std::vector<double>(
                  static_cast<std::size_t>(cfg_.max_seq) * cfg_.d_model, 0.0));
  st.v = st.k;
  return st;
}

void Net::decode_step(DecodeState& st, std::int32_t id,
                      std::vector<double>& logits_out) const {
  if (st.len >= cfg_.max_seq) throw SequenceTooLongError();
  const std::int32_t d = cfg_.d_model, dff = cfg_.d_ff(), H = cfg_.n_heads,
                     dh = cfg_.d_head();
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));
  const std::int32_t t = st.len;

  std::vector<double> x(static_cast<std::size_t>(d));
  {
    const double* te = p(wte_ + static_cast<std::size_t>(id) * d);
    const double* pe = p(wpe_ + static_cast<std::size_t>(t) * d);
    for (std::int32_t i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = te[i] + pe[i];
  }

  std::vector<double> nhat(static_cast<std::size_t>(d)), n1(static_cast<std::size_t>(d)),
      q(static_cast<std::size_t>(d)), ctx(static_cast<std::size_t>(d)),
      ao(static_cast<std::size_t>(d)), h1(static_cast<std::size_t>(dff)),
      hg(static_cast<std::size_t>(dff)), f(static_cast<std::size_t>(d)),
      aw(static_cast<std::size_t>(t) + 1);

  for (std::int32_t l = 0; l < cfg_.n_layers; ++l) {
    const BlockOff& B = blocks_[static_cast<std::size_t>(l)];
    auto& K = st.k[static_cast<std::size_t>(l)];
    auto& V = st.v[static_cast<std::size_t>(l)];
    layernorm_row(x.data(), p(B.ln1_g), p(B.ln1_b), nhat.data(), n1.data(), d);
    linear_row(p(B.wq), p(B.bq), n1.data(), q.data(), d, d);
    linear_row(p(B.wk), p(B.bk), n1.data(), K.data() + static_cast<std::size_t>(t) * d, d, d);
    linear_row(p(B.wv), p(B.bv), n1.data(), V.data() + static_cast<std::size_t>(t) * d, d, d);

    std::fill(ctx.begin(), ctx.end(), 0.0);
    for (std::int32_t h = 0; h < H; ++h) {
      const std::size_t hs = static_cast<std::size_t>(h) * dh;
      double mx = -1e300;
      for (std::int32_t s = 0; s <= t; ++s) {
        const double sc =
            k::dot(q.data() + hs, K.data() + static_cast<std::size_t>(s) * d + hs,
                   static_cast<std::size_t>(dh)) *
            inv_sqrt_dh;
        aw[static_cast<std::size_t>(s)] = sc;
        mx = sc > mx ? sc : mx;
      }
      double sum = 0.0;
      for (std::int32_t s = 0; s <= t; ++s) {
        aw[static_cast<std::size_t>(s)] = std::exp(aw[static_cast<std::size_t>(s)] - mx);
        sum += aw[static_cast<std::size_t>(s)];
      }
      const double inv = 1.0 / sum;
      for (std::int32_t s = 0; s <= t; ++s) aw[static_cast<std::size_t>(s)] *= inv;
      for (std::int32_t s = 0; s <= t; ++s) {
        k::axpy(aw[static_cast<std::size_t>(s)],
                V.data() + static_cast<std::size_t>(s) * d + hs, ctx.data() + hs,
                static_cast<std::size_t>(dh));
      }
    }
    linear_row(p(B.wo), p(B.bo), ctx.data(), ao.data(), d, d);
    for (std::int32_t i = 0; i < d; ++i) {
      x[static_cast<std::size_t>(i)] += ao[static_cast<std::size_t>(i)];
    }

    layernorm_row(x.data(), p(B.ln2_g), p(B.ln2_b), nhat.data(), n1.data(), d);
    linear_row(p(B.w1), p(B.b1), n1.data(), h1.data(), dff, d);
    for (std::int32_t i = 0; i < dff; ++i) {
      hg[static_cast<std::size_t>(i)] = gelu(h1[static_cast<std::size_t>(i)]);
    }
    linear_row(p(B.w2), p(B.b2), hg.data(), f.data(), d, dff);
    for (std::int32_t i = 0; i < d; ++i) {
      x[static_cast<std::size_t>(i)] += f[static_cast<std::size_t>(i)];
    }
  }

  layernorm_row(x.data(), p(lnf_g_), p(lnf_b_), nhat.data(), n1.data(), d);
  logits_out.assign(static_cast<std::size_t>(cfg_.head_out), 0.0);
  linear_row(p(whead_), p(bhead_), n1.data(), logits_out.data(), cfg_.head_out, d);
  ++st.len;
}

void Adam::step(std::vector<double>& params, const std::vector<double>& grads) {
  if (m.size() != params.size()) {
    m.assign(params.size(), 0.0);
    v.assign(params.size(), 0.0);
  }
  ++t;
  const double inv_b1c = 1.0 / (1.0 - std::pow(beta1, static_cast<double>(t)));
  const double inv_b2c = 1.0 / (1.0 - std::pow(beta2, static_cast<double>(t)));
  k::adam_update(params.data(), grads.data(), m.data(), v.data(), params.size(), lr,
                 beta1, beta2, inv_b1c, inv_b2c, eps);
}

double clip_grad_norm(std::vector<double>& grads, double max_norm) {
  const double sq = k::dot(grads.data(), grads.data(), grads.size());
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    k::scale(max_norm / norm, grads.data(), grads.size());
  }
  return norm;
}

namespace {

struct CkptHeader {
  char magic[8];
  std::uint32_t version;
  std::uint64_t vocab_hash;
  std::int32_t vocab_size, d_model, n_layers, n_heads, max_seq, head_out;
  std::uint64_t n_params;
};

constexpr char kMagic[8] = {'D', 'R', 'S', 'C', 'K', 'P', 'T', '1'};

}  // namespace

void save_checkpoint(const std::string& path, const Net& net, std::uint64_t vocab_hash) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  const ModelConfig& c = net.config();
  CkptHeader h{};
  std::memcpy(h.magic, kMagic, 8);
  h.version = 1;
  h.vocab_hash = vocab_hash;
  h.vocab_size = c.vocab_size;
  h.d_model = c.d_model;
  h.n_layers = c.n_layers;
  h.n_heads = c.n_heads;
  h.max_seq = c.max_seq;
  h.head_out = c.head_out;
  h.n_params = net.param_count();
  out.write(reinterpret_cast<const char*>(&h), sizeof h);
  std::vector<float> buf(net.param_count());
  for (std::size_t i = 0; i < buf.size(); ++i) {
    buf[i] = static_cast<float>(net.params()[i]);
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) throw std::runtime_error("short write: " + path);
}

Net load_checkpoint(const std::string& path, std::uint64_t expected_vocab_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  CkptHeader h{};
  in.read(reinterpret_cast<char*>(&h), sizeof h);
  if (!in || std::memcmp(h.magic, kMagic, 8) != 0 || h.version != 1) {
    throw std::runtime_error("bad checkpoint header: " + path);
  }
  if (h.vocab_hash != expected_vocab_hash) throw VocabMismatchError();
  ModelConfig cfg;
  cfg.vocab_size = h.vocab_size;
  cfg.d_model = h.d_model;
  cfg.n_layers = h.n_layers;
  cfg.n_heads = h.n_heads;
  cfg.max_seq = h.max_seq;
  cfg.head_out = h.head_out;
  Net net = Net::make(cfg, 0);
  if (net.param_count() != h.n_params) {
    throw std::runtime_error("checkpoint parameter count mismatch");
  }
  std::vector<float> buf(net.param_count());
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!in) throw std::runtime_error("truncated checkpoint: " + path);
  for (std::size_t i = 0; i < buf.size(); ++i) {
    net.params()[i] = static_cast<double>(buf[i]);
  }
  return net;
}

double pretrain_supervised(Net& net, const std::vector<PretrainExample>& corpus,
                           const PretrainConfig& cfg, std::mt19937_64& rng,
                           Adam* optimizer, std::vector<double>* loss_log) {
  if (corpus.empty()) throw std::invalid_argument("empty pretraining corpus");
  Adam local;
  local.lr = cfg.lr;
  Adam& opt = optimizer != nullptr ? *optimizer : local;
  const std::int32_t V = net.config().head_out;

  Activations acts;
  double last_loss = 0.0;
  for (std::int64_t step = 0; step < cfg.steps; ++step) {
    net.zero_grads();
    double loss = 0.0;
    std::int64_t total_tokens = 0;
    std::vector<const PretrainExample*> batch;
    batch.reserve(static_cast<std::size_t>(cfg.batch_size));
    for (std::int32_t b = 0; b < cfg.batch_size; ++b) {
      const auto& ex = corpus[rng() % corpus.size()];
      batch.push_back(&ex);
      total_tokens += static_cast<std::int64_t>(ex.response.size());
    }
    for (const PretrainExample* ex : batch) {
      std::vector<std::int32_t> ids = ex->prompt;
      ids.insert(ids.end(), ex->response.begin(), ex->response.end());
      net.forward(ids, acts);
      const auto P = static_cast<std::int32_t>(ex->prompt.size());
      const auto T = static_cast<std::int32_t>(ids.size());
      std::vector<double> dlogits(static_cast<std::size_t>(T) * V, 0.0);
      for (std::int32_t pos = P - 1; pos < T - 1; ++pos) {
        const std::int32_t target = ids[static_cast<std::size_t>(pos) + 1];
        const double* row = acts.logits.data() + static_cast<std::size_t>(pos) * V;
        double* drow = dlogits.data() + static_cast<std::size_t>(pos) * V;
        const double mx = k::vmax(row, static_cast<std::size_t>(V));
        double sum = 0.0;
        for (std::int32_t o = 0; o < V; ++o) sum += std::exp(row[o] - mx);
        const double logz = std::log(sum) + mx;
        loss += (logz - row[target]) / static_cast<double>(total_tokens);
        const double scale = 1.0 / static_cast<double>(total_tokens);
        for (std::int32_t o = 0; o < V; ++o) drow[o] = std::exp(row[o] - logz) * scale;
        drow[target] -= scale;
      }
      net.backward(ids, acts, dlogits);
    }
    clip_grad_norm(net.grads(), cfg.grad_clip);
    opt.step(net.params(), net.grads());
    if (loss_log != nullptr) loss_log->push_back(loss);
    last_loss = loss;
  }
  return last_loss;
}

}  // namespace drs::model
