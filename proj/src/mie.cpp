#include "kgsmith/mie.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <unicode/uchar.h>

#include "kgsmith/error.hpp"
#include "kgsmith/text.hpp"

namespace kgsmith::mie {

namespace {

constexpr char magic[4] = {'K', 'G', 'M', 'W'};
constexpr std::uint32_t weights_version = 1;

void require(bool ok, const std::string& what) {
  if (!ok) {
    throw Error(ErrorCode::DimensionMismatch, what);
  }
}

bool finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void check_encoder(const EncoderParams& e, std::size_t input, std::size_t h, const char* name) {
  const std::string n(name);
  for (const LstmParams* p : {&e.fwd, &e.bwd}) {
    require(p->W.rows == 4 * h && p->W.cols == input, n + ": W must be 4h x input");
    require(p->U.rows == 4 * h && p->U.cols == h, n + ": U must be 4h x h");
    require(p->b.size() == 4 * h, n + ": b must have 4h entries");
    require(finite(p->W.data) && finite(p->U.data) && finite(p->b), n + ": non-finite LSTM weight");
  }
  require(e.attn_w.size() == 2 * h, n + ": attention weight must have 2h entries");
  require(finite(e.attn_w) && std::isfinite(e.attn_b), n + ": non-finite attention weight");
}

LstmParams lstm_shape(std::size_t input, std::size_t h) {
  return {Matrix(4 * h, input), Matrix(4 * h, h), Vector(4 * h, 0.0)};
}

EncoderParams encoder_shape(std::size_t input, std::size_t h) {
  return {lstm_shape(input, h), lstm_shape(input, h), Vector(2 * h, 0.0), 0.0};
}

// Visits every scalar in weights-file order.
template <class P, class Fn>
void for_each_scalar(P& p, Fn&& fn) {
  auto each = [&](auto& v) {
    for (auto& x : v) {
      fn(x);
    }
  };
  each(p.embedding.data);
  for (auto* e : {&p.dialogue_c, &p.dialogue_s, &p.label_c, &p.label_s}) {
    for (auto* l : {&e->fwd, &e->bwd}) {
      each(l->W.data);
      each(l->U.data);
      each(l->b);
    }
    each(e->attn_w);
    fn(e->attn_b);
  }
  each(p.fcnn.W1.data);
  each(p.fcnn.b1);
  each(p.fcnn.w2);
  fn(p.fcnn.b2);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

std::uint64_t get_le(std::string_view bytes, std::size_t& pos, int width) {
  if (pos + static_cast<std::size_t>(width) > bytes.size()) {
    throw Error(ErrorCode::MalformedFile, "weights file truncated");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  }
  pos += width;
  return v;
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

} // namespace

Vector Matrix::row(std::size_t r) const {
  return Vector(data.begin() + static_cast<std::ptrdiff_t>(r * cols),
                data.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols));
}

void Matrix::set_row(std::size_t r, const Vector& v) {
  std::copy(v.begin(), v.end(), data.begin() + static_cast<std::ptrdiff_t>(r * cols));
}

void MieParams::check() const {
  const auto& [vocab, emb, h, fc] = dims;
  require(vocab > 0 && emb > 0 && h > 0 && fc > 0, "all dimensions must be positive");
  require(embedding.rows == vocab && embedding.cols == emb, "embedding must be vocab x emb");
  require(finite(embedding.data), "non-finite embedding value");
  check_encoder(dialogue_c, emb, h, "dialogue_c");
  check_encoder(dialogue_s, emb, h, "dialogue_s");
  check_encoder(label_c, emb, h, "label_c");
  check_encoder(label_s, emb, h, "label_s");
  require(fcnn.W1.rows == fc && fcnn.W1.cols == 4 * h, "fcnn W1 must be fc_hidden x 4h");
  require(fcnn.b1.size() == fc && fcnn.w2.size() == fc, "fcnn bias/output sizes must equal fc_hidden");
  require(finite(fcnn.W1.data) && finite(fcnn.b1) && finite(fcnn.w2) && std::isfinite(fcnn.b2),
          "non-finite fcnn weight");
}

MieParams zero_params(const Dims& dims) {
  MieParams p;
  p.dims = dims;
  p.embedding = Matrix(dims.vocab, dims.emb);
  p.dialogue_c = encoder_shape(dims.emb, dims.hidden);
  p.dialogue_s = encoder_shape(dims.emb, dims.hidden);
  p.label_c = encoder_shape(dims.emb, dims.hidden);
  p.label_s = encoder_shape(dims.emb, dims.hidden);
  p.fcnn = {Matrix(dims.fc_hidden, 4 * dims.hidden), Vector(dims.fc_hidden, 0.0), Vector(dims.fc_hidden, 0.0), 0.0};
  return p;
}

MieParams seeded_params(const Dims& dims, std::uint64_t seed, double scale) {
  MieParams p = zero_params(dims);
  std::mt19937_64 rng(seed);
  for_each_scalar(p, [&](double& x) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53; // [0, 1)
    x = (2.0 * u - 1.0) * scale;
  });
  return p;
}

std::string serialize_weights(const MieParams& params) {
  params.check();
  std::string out(magic, sizeof magic);
  put_u32(out, weights_version);
  put_u64(out, params.dims.vocab);
  put_u64(out, params.dims.emb);
  put_u64(out, params.dims.hidden);
  put_u64(out, params.dims.fc_hidden);
  for_each_scalar(params, [&](double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); });
  return out;
}

MieParams deserialize_weights(std::string_view bytes) {
  if (bytes.size() < sizeof magic || bytes.substr(0, sizeof magic) != std::string_view(magic, sizeof magic)) {
    throw Error(ErrorCode::MalformedFile, "not a weights file");
  }
  std::size_t pos = sizeof magic;
  const auto version = get_le(bytes, pos, 4);
  if (version != weights_version) {
    throw Error(ErrorCode::MalformedFile, "unsupported weights version " + std::to_string(version));
  }
  Dims dims;
  dims.vocab = get_le(bytes, pos, 8);
  dims.emb = get_le(bytes, pos, 8);
  dims.hidden = get_le(bytes, pos, 8);
  dims.fc_hidden = get_le(bytes, pos, 8);
  constexpr std::size_t limit = std::size_t{1} << 24;
  if (dims.vocab > limit || dims.emb > 4096 || dims.hidden > 4096 || dims.fc_hidden > 4096) {
    throw Error(ErrorCode::MalformedFile, "weights file dimensions out of range");
  }
  MieParams p = zero_params(dims);
  for_each_scalar(p, [&](double& x) { x = std::bit_cast<double>(get_le(bytes, pos, 8)); });
  if (pos != bytes.size()) {
    throw Error(ErrorCode::MalformedFile, "trailing bytes in weights file");
  }
  p.check();
  return p;
}

void save_weights(const MieParams& params, const std::filesystem::path& path) {
  const std::string bytes = serialize_weights(params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  }
}

MieParams load_weights(const std::filesystem::path& path) {
  return deserialize_weights(read_all(path));
}

std::vector<std::string> tokenize(std::string_view input) {
  std::vector<std::string> tokens;
  std::string current;
  for (const auto& cp : text::decode_utf8(input)) {
    const auto c = static_cast<UChar32>(cp.value);
    if (u_isUWhiteSpace(c) || u_ispunct(c)) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
      continue;
    }
    text::append_utf8(current, static_cast<char32_t>(u_tolower(c)));
  }
  if (!current.empty()) {
    tokens.push_back(std::move(current));
  }
  return tokens;
}

Vocabulary::Vocabulary() {
  add("<pad>");
  add("<unk>");
}

void Vocabulary::add(std::string token) {
  if (ids_.contains(token)) {
    return;
  }
  ids_.emplace(token, static_cast<std::uint32_t>(tokens_.size()));
  tokens_.push_back(std::move(token));
}

Vocabulary Vocabulary::parse(std::string_view input) {
  Vocabulary v;
  std::istringstream lines{std::string(input)};
  std::string line;
  std::size_t index = 0;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (index < 2) {
      if (line != v.tokens_[index]) {
        throw Error(ErrorCode::MalformedFile, "vocabulary must start with <pad> and <unk>");
      }
    } else {
      v.add(line);
    }
    ++index;
  }
  return v;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  return parse(read_all(path));
}

Vocabulary Vocabulary::build(const std::vector<std::string>& corpus) {
  std::vector<std::string> all;
  for (const auto& doc : corpus) {
    for (auto& t : tokenize(doc)) {
      all.push_back(std::move(t));
    }
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  Vocabulary v;
  for (auto& t : all) {
    v.add(std::move(t));
  }
  return v;
}

std::uint32_t Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? unk_id : it->second;
}

std::vector<std::uint32_t> Vocabulary::encode(std::string_view input) const {
  std::vector<std::uint32_t> ids;
  for (const auto& t : tokenize(input)) {
    ids.push_back(id(t));
  }
  return ids;
}

std::string_view to_string(Speaker s) noexcept {
  return s == Speaker::doctor ? "doctor" : "patient";
}

Speaker speaker_from_string(std::string_view s) {
  const std::string folded = text::fold_case(s);
  if (folded == "doctor") {
    return Speaker::doctor;
  }
  if (folded == "patient") {
    return Speaker::patient;
  }
  throw Error(ErrorCode::InvalidArgument, "speaker must be doctor or patient, got '" + std::string(s) + "'");
}

std::string CandidateLabel::render() const {
  return c_part() + "-" + status;
}

std::string CandidateLabel::c_part() const {
  return category + ": " + item;
}

CandidateLabel CandidateLabel::parse(std::string_view rendered) {
  const auto colon = rendered.find(':');
  const auto dash = rendered.rfind('-');
  if (colon == std::string_view::npos || dash == std::string_view::npos || dash < colon) {
    throw Error(ErrorCode::InvalidArgument, "label must look like 'Category: Item-Status': " + std::string(rendered));
  }
  CandidateLabel l{text::trim(rendered.substr(0, colon)), text::trim(rendered.substr(colon + 1, dash - colon - 1)),
                   text::trim(rendered.substr(dash + 1))};
  if (l.category.empty() || l.item.empty() || l.status.empty()) {
    throw Error(ErrorCode::InvalidArgument, "label has an empty part: " + std::string(rendered));
  }
  return l;
}

std::vector<CandidateLabel> parse_label_catalog(std::string_view input) {
  std::vector<CandidateLabel> labels;
  std::istringstream lines{std::string(input)};
  std::string line;
  while (std::getline(lines, line)) {
    const std::string t = text::trim(line);
    if (t.empty() || t.front() == '#') {
      continue;
    }
    labels.push_back(CandidateLabel::parse(t));
  }
  return labels;
}

Matrix embed(const std::vector<std::uint32_t>& tokens, const Matrix& embedding) {
  Matrix X(tokens.size(), embedding.cols);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (tokens[t] >= embedding.rows) {
      throw Error(ErrorCode::DimensionMismatch, "token id " + std::to_string(tokens[t]) + " outside vocabulary");
    }
    std::copy_n(embedding.data.begin() + static_cast<std::ptrdiff_t>(tokens[t] * embedding.cols), embedding.cols,
                X.data.begin() + static_cast<std::ptrdiff_t>(t * embedding.cols));
  }
  return X;
}

Matrix bilstm_forward(const Matrix& X, const EncoderParams& enc) {
  const std::size_t h = enc.fwd.U.cols;
  require(X.rows > 0, "empty token sequence");
  require(enc.fwd.W.cols == X.cols && enc.bwd.W.cols == X.cols, "LSTM input width differs from embedding width");
  require(enc.fwd.W.rows == 4 * h && enc.bwd.W.rows == 4 * h && enc.bwd.U.cols == h && enc.fwd.b.size() == 4 * h &&
              enc.bwd.b.size() == 4 * h,
          "inconsistent LSTM shapes");

  Matrix F(X.rows, 2 * h);
  Vector z(4 * h);
  for (int dir = 0; dir < 2; ++dir) {
    const LstmParams& p = dir == 0 ? enc.fwd : enc.bwd;
    Vector hs(h, 0.0);
    Vector cs(h, 0.0);
    for (std::size_t step = 0; step < X.rows; ++step) {
      const std::size_t t = dir == 0 ? step : X.rows - 1 - step;
      for (std::size_t r = 0; r < 4 * h; ++r) {
        double acc = p.b[r];
        for (std::size_t k = 0; k < X.cols; ++k) {
          acc += p.W(r, k) * X(t, k);
        }
        for (std::size_t k = 0; k < h; ++k) {
          acc += p.U(r, k) * hs[k];
        }
        z[r] = acc;
      }
      for (std::size_t k = 0; k < h; ++k) {
        const double i = logistic(z[k]);
        const double f = logistic(z[h + k]);
        const double g = std::tanh(z[2 * h + k]);
        const double o = logistic(z[3 * h + k]);
        cs[k] = f * cs[k] + i * g;
        hs[k] = o * std::tanh(cs[k]);
        F(t, dir * h + k) = hs[k];
      }
    }
  }
  return F;
}

void attention_pool(const Matrix& F, const Vector& w, double b, Vector& a, Vector& d) {
  require(F.rows > 0, "attention over an empty sequence");
  require(w.size() == F.cols, "attention weight width differs from feature width");
  Vector logits(F.rows);
  for (std::size_t i = 0; i < F.rows; ++i) {
    double acc = b;
    for (std::size_t k = 0; k < F.cols; ++k) {
      acc += w[k] * F(i, k);
    }
    logits[i] = acc;
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  a.assign(F.rows, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < F.rows; ++i) {
    a[i] = std::exp(logits[i] - peak);
    total += a[i];
  }
  for (auto& x : a) {
    x /= total;
  }
  d.assign(F.cols, 0.0);
  for (std::size_t i = 0; i < F.rows; ++i) {
    for (std::size_t k = 0; k < F.cols; ++k) {
      d[k] += a[i] * F(i, k);
    }
  }
}

EncoderOutputs encode(const std::vector<std::uint32_t>& tokens, const Matrix& embedding, const EncoderParams& enc) {
  EncoderOutputs out;
  out.F = bilstm_forward(embed(tokens, embedding), enc);
  attention_pool(out.F, enc.attn_w, enc.attn_b, out.a, out.d);
  return out;
}

std::vector<UtteranceEncoding> encode_dialogue(const DialogueWindow& window, const MieParams& params) {
  std::vector<UtteranceEncoding> out;
  out.reserve(window.utterances.size());
  for (const auto& u : window.utterances) {
    out.push_back({encode(u.tokens, params.embedding, params.dialogue_c),
                   encode(u.tokens, params.embedding, params.dialogue_s)});
  }
  return out;
}

LabelEncoding encode_label(const CandidateLabel& label, const Vocabulary& vocab, const MieParams& params) {
  const auto c_tokens = vocab.encode(label.c_part());
  const auto s_tokens = vocab.encode(label.s_part());
  if (c_tokens.empty() || s_tokens.empty()) {
    throw Error(ErrorCode::UnknownToken, "label '" + label.render() + "' renders to no tokens");
  }
  return {encode(c_tokens, params.embedding, params.label_c), encode(s_tokens, params.embedding, params.label_s)};
}

MatchOutput match(const Vector& d, const std::vector<const Matrix*>& F) {
  MatchOutput out;
  out.q = Matrix(F.size(), d.size());
  out.a.resize(F.size());
  for (std::size_t i = 0; i < F.size(); ++i) {
    const Matrix& Fi = *F[i];
    require(Fi.rows > 0, "utterance without tokens");
    require(Fi.cols == d.size(), "label vector width differs from utterance feature width");
    Vector logits(Fi.rows);
    for (std::size_t j = 0; j < Fi.rows; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < Fi.cols; ++k) {
        acc += d[k] * Fi(j, k);
      }
      logits[j] = acc;
    }
    const double peak = *std::max_element(logits.begin(), logits.end());
    Vector& a = out.a[i];
    a.assign(Fi.rows, 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < Fi.rows; ++j) {
      a[j] = std::exp(logits[j] - peak);
      total += a[j];
    }
    for (auto& x : a) {
      x /= total;
    }
    for (std::size_t j = 0; j < Fi.rows; ++j) {
      for (std::size_t k = 0; k < Fi.cols; ++k) {
        out.q(i, k) += a[j] * Fi(j, k);
      }
    }
  }
  return out;
}

Matrix aggregate(const Matrix& q_c, const Matrix& q_s) {
  if (q_c.rows != q_s.rows) {
    throw Error(ErrorCode::LengthMismatch, "category and status matches cover different utterance counts");
  }
  Matrix f(q_c.rows, q_c.cols + q_s.cols);
  for (std::size_t i = 0; i < q_c.rows; ++i) {
    for (std::size_t k = 0; k < q_c.cols; ++k) {
      f(i, k) = q_c(i, k);
    }
    for (std::size_t k = 0; k < q_s.cols; ++k) {
      f(i, q_c.cols + k) = q_s(i, k);
    }
  }
  return f;
}

double fcnn(const Vector& f, const FcnnParams& p) {
  require(p.W1.cols == f.size(), "scorer input width differs from aggregated width");
  double out = p.b2;
  for (std::size_t r = 0; r < p.W1.rows; ++r) {
    double acc = p.b1[r];
    for (std::size_t k = 0; k < f.size(); ++k) {
      acc += p.W1(r, k) * f[k];
    }
    out += p.w2[r] * std::tanh(acc);
  }
  return out;
}

double sigmoid(double x) noexcept {
  const double y = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  constexpr double lo = std::numeric_limits<double>::denorm_min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(y, lo, hi);
}

ScoreOutput score(const Matrix& f, const FcnnParams& p) {
  require(f.rows > 0, "scoring needs at least one utterance");
  ScoreOutput out;
  out.s.resize(f.rows);
  for (std::size_t i = 0; i < f.rows; ++i) {
    out.s[i] = fcnn(f.row(i), p);
    if (i == 0 || out.s[i] > out.max_s) {
      out.max_s = out.s[i];
      out.argmax = i;
    }
  }
  out.y = sigmoid(out.max_s);
  return out;
}

std::vector<LabelScore> score_labels(const DialogueWindow& window, const std::vector<CandidateLabel>& catalog,
                                     const MieParams& params, const Vocabulary& vocab,
                                     std::optional<std::size_t> window_size) {
  if (window.utterances.empty()) {
    throw Error(ErrorCode::InvalidArgument, "dialogue has no utterances");
  }
  if (window_size && *window_size == 0) {
    throw Error(ErrorCode::InvalidArgument, "window size must be positive");
  }
  const auto utterances = encode_dialogue(window, params);
  std::vector<const Matrix*> F_c;
  std::vector<const Matrix*> F_s;
  for (const auto& u : utterances) {
    F_c.push_back(&u.c.F);
    F_s.push_back(&u.s.F);
  }
  const std::size_t k = utterances.size();
  const std::size_t w = window_size ? std::min(*window_size, k) : k;

  std::vector<LabelScore> out;
  out.reserve(catalog.size());
  for (const auto& label : catalog) {
    const LabelEncoding enc = encode_label(label, vocab, params);
    const Matrix f = aggregate(match(enc.c.d, F_c).q, match(enc.s.d, F_s).q);
    LabelScore best{label, 0.0, 0};
    for (std::size_t start = 0; start + w <= k; ++start) {
      Matrix part(w, f.cols);
      std::copy_n(f.data.begin() + static_cast<std::ptrdiff_t>(start * f.cols), w * f.cols, part.data.begin());
      const ScoreOutput s = score(part, params.fcnn);
      if (start == 0 || s.y > best.y) {
        best.y = s.y;
        best.utterance = start + s.argmax;
      }
    }
    out.push_back(std::move(best));
  }
  return out;
}

std::vector<LabelScore> predict_labels(const DialogueWindow& window, const std::vector<CandidateLabel>& catalog,
                                       const MieParams& params, const Vocabulary& vocab, double threshold,
                                       std::optional<std::size_t> window_size) {
  if (catalog.empty()) {
    throw Error(ErrorCode::InvalidArgument, "label catalog is empty");
  }
  auto scores = score_labels(window, catalog, params, vocab, window_size);
  std::erase_if(scores, [&](const LabelScore& s) { return !(s.y >= threshold); });
  return scores;
}

} // namespace kgsmith::mie
