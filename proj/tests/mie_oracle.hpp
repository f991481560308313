#pragma once

// Straight-line forward computation of the label scorer, written from the
// equations with plain nested vectors. Reads weights from MieParams but shares
// no code with the library's forward pass.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "kgsmith/mie.hpp"

namespace oracle {

using Rows = std::vector<std::vector<double>>;

inline double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double at(const kgsmith::mie::Matrix& m, std::size_t r, std::size_t c) { return m.data[r * m.cols + c]; }

inline Rows lstm_direction(const Rows& x, const kgsmith::mie::LstmParams& p, bool reverse) {
  const std::size_t n = x.size();
  const std::size_t h = p.U.cols;
  Rows out(n, std::vector<double>(h, 0.0));
  std::vector<double> hprev(h, 0.0);
  std::vector<double> cprev(h, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t t = reverse ? n - 1 - s : s;
    std::vector<double> gate(4 * h);
    for (std::size_t r = 0; r < 4 * h; ++r) {
      double v = p.b[r];
      for (std::size_t k = 0; k < x[t].size(); ++k) v += at(p.W, r, k) * x[t][k];
      for (std::size_t k = 0; k < h; ++k) v += at(p.U, r, k) * hprev[k];
      gate[r] = v;
    }
    std::vector<double> hnew(h), cnew(h);
    for (std::size_t k = 0; k < h; ++k) {
      const double ig = sig(gate[k]);
      const double fg = sig(gate[h + k]);
      const double cand = std::tanh(gate[2 * h + k]);
      const double og = sig(gate[3 * h + k]);
      cnew[k] = fg * cprev[k] + ig * cand;
      hnew[k] = og * std::tanh(cnew[k]);
    }
    out[t] = hnew;
    hprev = hnew;
    cprev = cnew;
  }
  return out;
}

inline std::vector<double> softmax(const std::vector<double>& z) {
  double m = z[0];
  for (double v : z) m = v > m ? v : m;
  std::vector<double> e(z.size());
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    e[i] = std::exp(z[i] - m);
    total += e[i];
  }
  for (auto& v : e) v /= total;
  return e;
}

inline std::vector<double> weighted_rows(const std::vector<double>& a, const Rows& F) {
  std::vector<double> out(F[0].size(), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (std::size_t i = 0; i < F.size(); ++i) out[k] += a[i] * F[i][k];
  }
  return out;
}

struct Encoded {
  Rows F;
  std::vector<double> d;
};

inline Encoded encode_naive(const std::vector<std::uint32_t>& ids, const kgsmith::mie::Matrix& emb,
                      const kgsmith::mie::EncoderParams& e) {
  Rows x;
  for (auto id : ids) {
    std::vector<double> row(emb.cols);
    for (std::size_t k = 0; k < emb.cols; ++k) row[k] = at(emb, id, k);
    x.push_back(row);
  }
  const Rows fw = lstm_direction(x, e.fwd, false);
  const Rows bw = lstm_direction(x, e.bwd, true);
  Encoded out;
  for (std::size_t t = 0; t < x.size(); ++t) {
    std::vector<double> row = fw[t];
    row.insert(row.end(), bw[t].begin(), bw[t].end());
    out.F.push_back(row);
  }
  std::vector<double> logits;
  for (const auto& row : out.F) {
    double v = e.attn_b;
    for (std::size_t k = 0; k < row.size(); ++k) v += e.attn_w[k] * row[k];
    logits.push_back(v);
  }
  out.d = weighted_rows(softmax(logits), out.F);
  return out;
}

inline std::vector<double> attend(const std::vector<double>& d, const Rows& F) {
  std::vector<double> logits;
  for (const auto& row : F) {
    double v = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) v += d[k] * row[k];
    logits.push_back(v);
  }
  return weighted_rows(softmax(logits), F);
}

inline double scorer(const std::vector<double>& f, const kgsmith::mie::FcnnParams& p) {
  double out = p.b2;
  for (std::size_t r = 0; r < p.W1.rows; ++r) {
    double v = p.b1[r];
    for (std::size_t k = 0; k < f.size(); ++k) v += at(p.W1, r, k) * f[k];
    out += p.w2[r] * std::tanh(v);
  }
  return out;
}

inline double bounded_sigmoid(double s) {
  double y = s >= 0.0 ? 1.0 / (1.0 + std::exp(-s)) : std::exp(s) / (1.0 + std::exp(s));
  if (y <= 0.0) y = std::numeric_limits<double>::denorm_min();
  if (y >= 1.0) y = std::nextafter(1.0, 0.0);
  return y;
}

// y for one label against every utterance of the dialogue.
inline double label_probability(const std::vector<std::vector<std::uint32_t>>& utterances,
                                const std::vector<std::uint32_t>& c_ids, const std::vector<std::uint32_t>& s_ids,
                                const kgsmith::mie::MieParams& p) {
  const Encoded lc = encode_naive(c_ids, p.embedding, p.label_c);
  const Encoded ls = encode_naive(s_ids, p.embedding, p.label_s);
  double best = 0.0;
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    const Encoded uc = encode_naive(utterances[i], p.embedding, p.dialogue_c);
    const Encoded us = encode_naive(utterances[i], p.embedding, p.dialogue_s);
    std::vector<double> f = attend(lc.d, uc.F);
    const std::vector<double> qs = attend(ls.d, us.F);
    f.insert(f.end(), qs.begin(), qs.end());
    const double s = scorer(f, p.fcnn);
    if (i == 0 || s > best) best = s;
  }
  return bounded_sigmoid(best);
}

} // namespace oracle
