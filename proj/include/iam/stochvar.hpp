#pragma once

// Random-variable arithmetic over Monte-Carlo sample vectors with a
// reverse-mode differentiation tape.
//
// A SampleValue is either deterministic (one scalar broadcast to every path)
// or stochastic (one value per path). Arithmetic is pathwise. When any operand
// is recorded on a Tape, the result is appended to that tape together with its
// local partial derivatives, so one reverse sweep yields the derivative of an
// output with respect to every recorded input.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

namespace iam::stochvar {

class Tape;

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

/// Immutable per-path storage. Default-constructed and scalar-constructed
/// samples are deterministic; vector-constructed samples are stochastic even
/// when they hold a single path.
class Samples {
 public:
  Samples(double value = 0.0) : scalar_(value) {}  // NOLINT(google-explicit-constructor)
  explicit Samples(std::vector<double> values)
      : vec_(std::make_shared<const std::vector<double>>(std::move(values))) {}

  bool deterministic() const { return !vec_; }
  std::size_t size() const { return vec_ ? vec_->size() : 1; }
  double operator[](std::size_t path) const { return vec_ ? (*vec_)[path] : scalar_; }
  std::span<const double> span() const {
    return vec_ ? std::span<const double>(*vec_) : std::span<const double>(&scalar_, 1);
  }

 private:
  double scalar_ = 0.0;
  std::shared_ptr<const std::vector<double>> vec_;
};

class SampleValue {
 public:
  SampleValue() = default;
  SampleValue(double value) : values_(value) {}  // NOLINT(google-explicit-constructor)
  explicit SampleValue(std::vector<double> samples) : values_(std::move(samples)) {}
  explicit SampleValue(Samples samples) : values_(std::move(samples)) {}

  bool is_deterministic() const { return values_.deterministic(); }
  /// 1 for deterministic values, P otherwise.
  std::size_t paths() const { return values_.size(); }
  double operator[](std::size_t path) const { return values_[path]; }
  /// The value of a deterministic quantity; throws for stochastic ones.
  double scalar() const;
  const Samples& samples() const { return values_; }
  std::vector<double> to_vector(std::size_t paths) const;

  bool recorded() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  NodeId node() const { return node_; }

  /// Same samples, disconnected from any tape.
  SampleValue detached() const { return SampleValue(values_); }

 private:
  friend class Tape;
  friend SampleValue record_result(Samples, const SampleValue*, Samples, const SampleValue*,
                                   Samples);

  Samples values_;
  Tape* tape_ = nullptr;
  NodeId node_ = kNoNode;
};

/// Adjoint values from one reverse sweep.
class Adjoints {
 public:
  /// Per-path adjoint of a recorded value (deterministic nodes yield a scalar).
  Samples of(const SampleValue& value) const;
  /// Adjoint summed over paths.
  double total(const SampleValue& value) const;
  double total(NodeId node) const;

 private:
  friend class Tape;
  const Tape* tape_ = nullptr;
  std::vector<double> scalar_;
  std::vector<std::vector<double>> vector_;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Registers an independent input.
  SampleValue variable(const SampleValue& value);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<NodeId>& inputs() const { return inputs_; }
  bool contains(const SampleValue& value) const {
    return value.tape_ == this && value.node_ >= 0 &&
           static_cast<std::size_t>(value.node_) < nodes_.size();
  }

  /// Reverse sweep from `output`, seeded with per-path weights (a scalar seed
  /// broadcasts to every path).
  Adjoints reverse(const SampleValue& output, const Samples& seed = Samples(1.0)) const;

  /// Appends a node; parents are kNoNode where an operand is not recorded.
  NodeId append(std::size_t width, bool stochastic, NodeId p0, Samples d0, NodeId p1, Samples d1);

 private:
  struct Node {
    std::array<NodeId, 2> parent{kNoNode, kNoNode};
    std::array<Samples, 2> partial;
    std::uint32_t width = 1;
    bool stochastic = false;
  };

  std::vector<Node> nodes_;
  std::vector<NodeId> inputs_;
};

// Arithmetic. Binary operations broadcast deterministic operands; two
// stochastic operands must carry the same number of paths.
SampleValue operator+(const SampleValue& a, const SampleValue& b);
SampleValue operator-(const SampleValue& a, const SampleValue& b);
SampleValue operator*(const SampleValue& a, const SampleValue& b);
SampleValue operator/(const SampleValue& a, const SampleValue& b);
SampleValue operator-(const SampleValue& a);
inline SampleValue& operator+=(SampleValue& a, const SampleValue& b) { return a = a + b; }
inline SampleValue& operator-=(SampleValue& a, const SampleValue& b) { return a = a - b; }
inline SampleValue& operator*=(SampleValue& a, const SampleValue& b) { return a = a * b; }

SampleValue exp(const SampleValue& x);
SampleValue log(const SampleValue& x);
SampleValue sqrt(const SampleValue& x);
SampleValue pow(const SampleValue& x, double exponent);
SampleValue pow(const SampleValue& x, const SampleValue& exponent);
/// Pathwise minimum; the derivative follows the selected branch, ties take `a`.
SampleValue min(const SampleValue& a, const SampleValue& b);
/// Pathwise maximum; the derivative follows the selected branch, ties take `a`.
SampleValue max(const SampleValue& a, const SampleValue& b);
/// 1/(1+exp(-x)).
SampleValue logistic(const SampleValue& x);

enum class ElementaryOp { add, sub, mul, div, exp, log, pow, min, max };

/// Dispatches one elementary operation over an argument list (1 or 2 args).
SampleValue apply_elementwise(ElementaryOp op, std::span<const SampleValue> args);

// Statistics.

enum class Tail { left, right };

struct Statistic {
  enum class Kind { expectation, expected_shortfall };
  Kind kind = Kind::expectation;
  double alpha = 1.0;
  Tail tail = Tail::left;

  static Statistic expectation() { return {}; }
  static Statistic shortfall(double alpha, Tail tail) {
    return {Kind::expected_shortfall, alpha, tail};
  }
};

/// Equally weighted mean over paths.
double expectation(const SampleValue& x);
/// Mean of the ceil(alpha*P) smallest (left) or largest (right) samples.
double expected_shortfall(const SampleValue& x, double alpha, Tail tail);
double apply(const Statistic& statistic, const SampleValue& x);

/// Indices (ascending) of the paths entering the expected shortfall.
std::vector<std::size_t> tail_paths(const SampleValue& x, double alpha, Tail tail);

/// Per-path weights w such that statistic(x) = sum_i w_i x_i with the tail
/// selection held fixed. Used to seed reverse sweeps.
Samples statistic_weights(const Statistic& statistic, const SampleValue& x);

/// d statistic(output) / d input for every registered input of `tape`.
/// Stochastic inputs report the derivative summed over their paths.
std::map<NodeId, double> gradient(const Tape& tape, const SampleValue& output,
                                  const Statistic& statistic = Statistic::expectation());

double variance(const SampleValue& x);
double stddev(const SampleValue& x);
/// Sample skewness (third standardized moment); 0 for degenerate samples.
double skewness(const SampleValue& x);

}  // namespace iam::stochvar
