#pragma once

// Forward-pass inference for the dialogue label extractor: shared embedding,
// four BiLSTM + attention-pooling encoders (dialogue/label x category/status),
// dot-product matching, concatenation, a one-hidden-layer scorer and a
// max-over-utterances sigmoid decision.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgsmith::mie {

using Vector = std::vector<double>;

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data; // row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  Vector row(std::size_t r) const;
  void set_row(std::size_t r, const Vector& v);

  bool operator==(const Matrix&) const = default;
};

// One LSTM direction; gate blocks are stacked i, f, g, o.
struct LstmParams {
  Matrix W; // 4h x input
  Matrix U; // 4h x h
  Vector b; // 4h

  bool operator==(const LstmParams&) const = default;
};

struct EncoderParams {
  LstmParams fwd;
  LstmParams bwd;
  Vector attn_w; // 2h
  double attn_b = 0.0;

  bool operator==(const EncoderParams&) const = default;
};

struct FcnnParams {
  Matrix W1; // hidden x 4h
  Vector b1;
  Vector w2; // hidden
  double b2 = 0.0;

  bool operator==(const FcnnParams&) const = default;
};

struct Dims {
  std::size_t vocab = 0;
  std::size_t emb = 0;
  std::size_t hidden = 0;
  std::size_t fc_hidden = 0;

  bool operator==(const Dims&) const = default;
};

struct MieParams {
  Dims dims;
  Matrix embedding; // vocab x emb
  EncoderParams dialogue_c;
  EncoderParams dialogue_s;
  EncoderParams label_c;
  EncoderParams label_s;
  FcnnParams fcnn;

  // Throws DimensionMismatch on inconsistent shapes or non-finite values.
  void check() const;

  bool operator==(const MieParams&) const = default;
};

MieParams zero_params(const Dims& dims);
// Uniform in [-scale, scale] from mt19937_64(seed), filled in weights-file order.
MieParams seeded_params(const Dims& dims, std::uint64_t seed, double scale = 0.5);

// Weights file: "KGMW", u32 version, u64 vocab/emb/hidden/fc_hidden, then every
// tensor row-major as little-endian f64 in declaration order.
std::string serialize_weights(const MieParams& params);
MieParams deserialize_weights(std::string_view bytes);
void save_weights(const MieParams& params, const std::filesystem::path& path);
MieParams load_weights(const std::filesystem::path& path);

class Vocabulary {
public:
  static constexpr std::uint32_t pad_id = 0;
  static constexpr std::uint32_t unk_id = 1;

  Vocabulary();
  // One token per line; lines 0 and 1 must be <pad> and <unk>.
  static Vocabulary parse(std::string_view text);
  static Vocabulary load(const std::filesystem::path& path);
  static Vocabulary build(const std::vector<std::string>& corpus);

  std::uint32_t id(std::string_view token) const;
  std::vector<std::uint32_t> encode(std::string_view text) const;
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

private:
  void add(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

// Lowercased runs of non-space, non-punctuation code points.
std::vector<std::string> tokenize(std::string_view text);

enum class Speaker { doctor, patient };
std::string_view to_string(Speaker s) noexcept;
Speaker speaker_from_string(std::string_view s);

struct Utterance {
  Speaker speaker = Speaker::patient;
  std::vector<std::uint32_t> tokens;
  std::string surface;
};

struct DialogueWindow {
  std::vector<Utterance> utterances;
};

struct CandidateLabel {
  std::string category;
  std::string item;
  std::string status;

  std::string render() const; // "Category: Item-Status"
  std::string c_part() const; // "Category: Item"
  const std::string& s_part() const { return status; }
  // Throws InvalidArgument.
  static CandidateLabel parse(std::string_view rendered);

  auto operator<=>(const CandidateLabel&) const = default;
};

// '#' comments and blank lines skipped.
std::vector<CandidateLabel> parse_label_catalog(std::string_view text);

struct EncoderOutputs {
  Matrix F; // n x 2h
  Vector a; // n
  Vector d; // 2h
};

// X holds one embedded token per row. Throws DimensionMismatch.
Matrix bilstm_forward(const Matrix& X, const EncoderParams& enc);
// a = softmax_i(w . F[i] + b), d = sum_i a[i] F[i].
void attention_pool(const Matrix& F, const Vector& w, double b, Vector& a, Vector& d);
Matrix embed(const std::vector<std::uint32_t>& tokens, const Matrix& embedding);
EncoderOutputs encode(const std::vector<std::uint32_t>& tokens, const Matrix& embedding, const EncoderParams& enc);

struct UtteranceEncoding {
  EncoderOutputs c;
  EncoderOutputs s;
};

std::vector<UtteranceEncoding> encode_dialogue(const DialogueWindow& window, const MieParams& params);

struct LabelEncoding {
  EncoderOutputs c;
  EncoderOutputs s;
};

// Throws UnknownToken if either part renders to no tokens.
LabelEncoding encode_label(const CandidateLabel& label, const Vocabulary& vocab, const MieParams& params);

struct MatchOutput {
  std::vector<Vector> a; // per utterance, per token
  Matrix q;              // one row per utterance
};

// a[i,j] = softmax_j(d . F[i][j]); q[i] = sum_j a[i,j] F[i][j].
MatchOutput match(const Vector& d, const std::vector<const Matrix*>& F);
// f[i] = q_c[i] || q_s[i]. Throws LengthMismatch.
Matrix aggregate(const Matrix& q_c, const Matrix& q_s);
double fcnn(const Vector& f, const FcnnParams& p);
double sigmoid(double x) noexcept;

struct ScoreOutput {
  Vector s;               // FCNN output per utterance
  double max_s = 0.0;
  std::size_t argmax = 0;
  double y = 0.0;         // sigmoid(max_s), strictly inside (0, 1)
};

ScoreOutput score(const Matrix& f, const FcnnParams& p);

struct LabelScore {
  CandidateLabel label;
  double y = 0.0;
  std::size_t utterance = 0;
};

inline constexpr double default_threshold = 0.5;

// Scores every candidate against the window. With window_size set, scores are
// taken over each run of window_size consecutive utterances (stride 1) and the
// best window is kept.
std::vector<LabelScore> score_labels(const DialogueWindow& window, const std::vector<CandidateLabel>& catalog,
                                     const MieParams& params, const Vocabulary& vocab,
                                     std::optional<std::size_t> window_size = std::nullopt);
// Candidates with y >= threshold, in catalog order. Throws InvalidArgument on
// an empty catalog or window.
std::vector<LabelScore> predict_labels(const DialogueWindow& window, const std::vector<CandidateLabel>& catalog,
                                       const MieParams& params, const Vocabulary& vocab,
                                       double threshold = default_threshold,
                                       std::optional<std::size_t> window_size = std::nullopt);

} // namespace kgsmith::mie
