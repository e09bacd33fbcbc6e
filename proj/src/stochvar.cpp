#include "iam/stochvar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "iam/error.hpp"

namespace iam::stochvar {

namespace {

std::size_t common_width(const Samples& a, const Samples& b) {
  if (a.deterministic()) return b.size();
  if (b.deterministic()) return a.size();
  if (a.size() != b.size()) {
    throw Error("path-count mismatch: " + std::to_string(a.size()) + " vs " +
                std::to_string(b.size()));
  }
  return a.size();
}

bool any_stochastic(const Samples& a, const Samples& b) {
  return !a.deterministic() || !b.deterministic();
}

template <class F>
Samples map_unary(const Samples& x, F f) {
  if (x.deterministic()) return Samples(f(x[0], 0));
  std::vector<double> out(x.size());
  const auto in = x.span();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i], i);
  return Samples(std::move(out));
}

template <class F>
Samples map_binary(const Samples& a, const Samples& b, F f) {
  const std::size_t n = common_width(a, b);
  if (!any_stochastic(a, b)) return Samples(f(a[0], b[0], 0));
  std::vector<double> out(n);
  if (a.deterministic()) {
    const double av = a[0];
    const auto bs = b.span();
    for (std::size_t i = 0; i < n; ++i) out[i] = f(av, bs[i], i);
  } else if (b.deterministic()) {
    const double bv = b[0];
    const auto as = a.span();
    for (std::size_t i = 0; i < n; ++i) out[i] = f(as[i], bv, i);
  } else {
    const auto as = a.span();
    const auto bs = b.span();
    for (std::size_t i = 0; i < n; ++i) out[i] = f(as[i], bs[i], i);
  }
  return Samples(std::move(out));
}

Tape* common_tape(const SampleValue* a, const SampleValue* b) {
  Tape* ta = a ? a->tape() : nullptr;
  Tape* tb = b ? b->tape() : nullptr;
  if (ta && tb && ta != tb) throw Error("operands recorded on different tapes");
  return ta ? ta : tb;
}

std::optional<std::size_t> path_of(const Samples& s, std::size_t i) {
  if (s.deterministic()) return std::nullopt;
  return i;
}

}  // namespace

SampleValue record_result(Samples result, const SampleValue* a, Samples da, const SampleValue* b,
                          Samples db) {
  SampleValue out(std::move(result));
  Tape* tape = common_tape(a, b);
  if (!tape) return out;
  const NodeId pa = (a && a->recorded()) ? a->node() : kNoNode;
  const NodeId pb = (b && b->recorded()) ? b->node() : kNoNode;
  out.node_ = tape->append(out.paths(), !out.is_deterministic(), pa, pa == kNoNode ? Samples() : std::move(da), pb,
                           pb == kNoNode ? Samples() : std::move(db));
  out.tape_ = tape;
  return out;
}

double SampleValue::scalar() const {
  if (!is_deterministic()) throw Error("scalar() on a stochastic value");
  return values_[0];
}

std::vector<double> SampleValue::to_vector(std::size_t paths) const {
  if (is_deterministic()) return std::vector<double>(paths, values_[0]);
  if (paths != values_.size()) throw Error("path-count mismatch in to_vector");
  auto s = values_.span();
  return {s.begin(), s.end()};
}

// Tape -------------------------------------------------------------------

SampleValue Tape::variable(const SampleValue& value) {
  SampleValue out(value.samples());
  out.node_ = append(value.paths(), !value.is_deterministic(), kNoNode, Samples(), kNoNode, Samples());
  out.tape_ = this;
  inputs_.push_back(out.node_);
  return out;
}

NodeId Tape::append(std::size_t width, bool stochastic, NodeId p0, Samples d0, NodeId p1, Samples d1) {
  Node node;
  node.parent = {p0, p1};
  node.partial = {std::move(d0), std::move(d1)};
  node.width = static_cast<std::uint32_t>(width);
  node.stochastic = stochastic;
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size() - 1);
}

Adjoints Tape::reverse(const SampleValue& output, const Samples& seed) const {
  if (!contains(output)) throw Error("reverse sweep from a value not recorded on this tape");
  Adjoints adj;
  adj.tape_ = this;
  adj.scalar_.assign(nodes_.size(), 0.0);
  adj.vector_.resize(nodes_.size());

  const NodeId root = output.node_;
  const Node& root_node = nodes_[root];
  if (!root_node.stochastic) {
    double s = 0.0;
    for (double w : seed.span()) s += w;
    adj.scalar_[root] = seed.deterministic() ? seed[0] : s;
  } else {
    auto& v = adj.vector_[root];
    v.resize(root_node.width);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = seed[seed.deterministic() ? 0 : i];
  }

  for (NodeId id = root; id >= 0; --id) {
    const Node& node = nodes_[id];
    if (node.parent[0] == kNoNode && node.parent[1] == kNoNode) continue;
    if (!node.stochastic) {
      const double a = adj.scalar_[id];
      if (a == 0.0) continue;
      for (int k = 0; k < 2; ++k) {
        const NodeId p = node.parent[k];
        if (p == kNoNode) continue;
        adj.scalar_[p] += node.partial[k][0] * a;
      }
      continue;
    }
    const auto& a = adj.vector_[id];
    if (a.empty()) continue;
    for (int k = 0; k < 2; ++k) {
      const NodeId p = node.parent[k];
      if (p == kNoNode) continue;
      const Samples& d = node.partial[k];
      if (!nodes_[p].stochastic) {
        double s = 0.0;
        if (d.deterministic()) {
          for (double ai : a) s += ai;
          s *= d[0];
        } else {
          const auto ds = d.span();
          for (std::size_t i = 0; i < a.size(); ++i) s += ds[i] * a[i];
        }
        adj.scalar_[p] += s;
      } else {
        auto& pa = adj.vector_[p];
        if (pa.empty()) pa.assign(a.size(), 0.0);
        if (d.deterministic()) {
          const double dv = d[0];
          for (std::size_t i = 0; i < a.size(); ++i) pa[i] += dv * a[i];
        } else {
          const auto ds = d.span();
          for (std::size_t i = 0; i < a.size(); ++i) pa[i] += ds[i] * a[i];
        }
      }
    }
  }
  return adj;
}

Samples Adjoints::of(const SampleValue& value) const {
  if (!tape_ || !tape_->contains(value)) throw Error("value not recorded on the swept tape");
  const auto id = static_cast<std::size_t>(value.node());
  if (!vector_[id].empty()) return Samples(vector_[id]);
  if (value.is_deterministic()) return Samples(scalar_[id]);
  return Samples(std::vector<double>(value.paths(), 0.0));
}

double Adjoints::total(const SampleValue& value) const {
  if (!tape_ || !tape_->contains(value)) throw Error("value not recorded on the swept tape");
  return total(value.node());
}

double Adjoints::total(NodeId node) const {
  const auto id = static_cast<std::size_t>(node);
  if (id >= scalar_.size()) throw Error("node handle not on the swept tape");
  if (vector_[id].empty()) return scalar_[id];
  double sum = 0.0;
  for (double v : vector_[id]) sum += v;
  return sum;
}

// Arithmetic -------------------------------------------------------------

SampleValue operator+(const SampleValue& a, const SampleValue& b) {
  auto r = map_binary(a.samples(), b.samples(), [](double x, double y, std::size_t) { return x + y; });
  return record_result(std::move(r), &a, Samples(1.0), &b, Samples(1.0));
}

SampleValue operator-(const SampleValue& a, const SampleValue& b) {
  auto r = map_binary(a.samples(), b.samples(), [](double x, double y, std::size_t) { return x - y; });
  return record_result(std::move(r), &a, Samples(1.0), &b, Samples(-1.0));
}

SampleValue operator*(const SampleValue& a, const SampleValue& b) {
  auto r = map_binary(a.samples(), b.samples(), [](double x, double y, std::size_t) { return x * y; });
  return record_result(std::move(r), &a, b.samples(), &b, a.samples());
}

SampleValue operator/(const SampleValue& a, const SampleValue& b) {
  const Samples& bs = b.samples();
  auto inv = map_unary(bs, [&](double y, std::size_t i) {
    if (y == 0.0) throw DomainError("division by zero", path_of(bs, i));
    return 1.0 / y;
  });
  auto r = map_binary(a.samples(), inv, [](double x, double yi, std::size_t) { return x * yi; });
  Samples db;
  if (b.recorded()) {
    db = map_binary(r, inv, [](double q, double yi, std::size_t) { return -q * yi; });
  }
  return record_result(std::move(r), &a, std::move(inv), &b, std::move(db));
}

SampleValue operator-(const SampleValue& a) {
  auto r = map_unary(a.samples(), [](double x, std::size_t) { return -x; });
  return record_result(std::move(r), &a, Samples(-1.0), nullptr, Samples());
}

SampleValue exp(const SampleValue& x) {
  auto r = map_unary(x.samples(), [](double v, std::size_t) { return std::exp(v); });
  Samples d = r;
  return record_result(std::move(r), &x, std::move(d), nullptr, Samples());
}

SampleValue log(const SampleValue& x) {
  const Samples& xs = x.samples();
  auto r = map_unary(xs, [&](double v, std::size_t i) {
    if (!(v > 0.0)) throw DomainError("log of non-positive sample " + std::to_string(v), path_of(xs, i));
    return std::log(v);
  });
  Samples d;
  if (x.recorded()) d = map_unary(xs, [](double v, std::size_t) { return 1.0 / v; });
  return record_result(std::move(r), &x, std::move(d), nullptr, Samples());
}

SampleValue sqrt(const SampleValue& x) {
  const Samples& xs = x.samples();
  auto r = map_unary(xs, [&](double v, std::size_t i) {
    if (v < 0.0) throw DomainError("sqrt of negative sample", path_of(xs, i));
    return std::sqrt(v);
  });
  Samples d;
  if (x.recorded()) d = map_unary(r, [](double v, std::size_t) { return 0.5 / v; });
  return record_result(std::move(r), &x, std::move(d), nullptr, Samples());
}

SampleValue pow(const SampleValue& x, double exponent) {
  const Samples& xs = x.samples();
  const bool integral = exponent == std::floor(exponent);
  auto r = map_unary(xs, [&](double v, std::size_t i) {
    if (v < 0.0 && !integral) throw DomainError("non-integral power of negative sample", path_of(xs, i));
    return std::pow(v, exponent);
  });
  Samples d;
  if (x.recorded()) {
    d = map_unary(xs, [&](double v, std::size_t) {
      if (exponent == 0.0) return 0.0;
      if (v == 0.0) return exponent > 1.0 ? 0.0 : (exponent == 1.0 ? 1.0 : HUGE_VAL);
      return exponent * std::pow(v, exponent - 1.0);
    });
  }
  return record_result(std::move(r), &x, std::move(d), nullptr, Samples());
}

SampleValue pow(const SampleValue& x, const SampleValue& exponent) {
  if (!exponent.recorded() && exponent.is_deterministic()) return pow(x, exponent.scalar());
  const Samples& xs = x.samples();
  auto r = map_binary(xs, exponent.samples(), [&](double v, double e, std::size_t i) {
    if (!(v > 0.0)) throw DomainError("power with variable exponent needs a positive base", path_of(xs, i));
    return std::pow(v, e);
  });
  Samples dx;
  Samples de;
  if (x.recorded()) {
    auto ratio = map_binary(exponent.samples(), xs, [](double e, double v, std::size_t) { return e / v; });
    dx = map_binary(r, ratio, [](double p, double q, std::size_t) { return p * q; });
  }
  if (exponent.recorded()) {
    de = map_binary(r, xs, [](double p, double v, std::size_t) { return p * std::log(v); });
  }
  return record_result(std::move(r), &x, std::move(dx), &exponent, std::move(de));
}

namespace {

SampleValue select(const SampleValue& a, const SampleValue& b, bool take_min) {
  const Samples& as = a.samples();
  const Samples& bs = b.samples();
  auto pick_a = map_binary(as, bs, [&](double x, double y, std::size_t) {
    return (take_min ? (x <= y) : (x >= y)) ? 1.0 : 0.0;
  });
  auto r = map_binary(as, bs, [&](double x, double y, std::size_t) {
    return take_min ? (x <= y ? x : y) : (x >= y ? x : y);
  });
  Samples db;
  if (b.recorded()) db = map_unary(pick_a, [](double p, std::size_t) { return 1.0 - p; });
  return record_result(std::move(r), &a, std::move(pick_a), &b, std::move(db));
}

}  // namespace

SampleValue min(const SampleValue& a, const SampleValue& b) { return select(a, b, true); }
SampleValue max(const SampleValue& a, const SampleValue& b) { return select(a, b, false); }

SampleValue logistic(const SampleValue& x) {
  auto r = map_unary(x.samples(), [](double v, std::size_t) {
    return v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  });
  Samples d;
  if (x.recorded()) d = map_unary(r, [](double s, std::size_t) { return s * (1.0 - s); });
  return record_result(std::move(r), &x, std::move(d), nullptr, Samples());
}

SampleValue apply_elementwise(ElementaryOp op, std::span<const SampleValue> args) {
  const std::size_t arity =
      (op == ElementaryOp::exp || op == ElementaryOp::log) ? 1 : 2;
  if (args.size() != arity) {
    throw Error("elementary operation expects " + std::to_string(arity) + " argument(s)");
  }
  switch (op) {
    case ElementaryOp::add: return args[0] + args[1];
    case ElementaryOp::sub: return args[0] - args[1];
    case ElementaryOp::mul: return args[0] * args[1];
    case ElementaryOp::div: return args[0] / args[1];
    case ElementaryOp::exp: return exp(args[0]);
    case ElementaryOp::log: return log(args[0]);
    case ElementaryOp::pow: return pow(args[0], args[1]);
    case ElementaryOp::min: return min(args[0], args[1]);
    case ElementaryOp::max: return max(args[0], args[1]);
  }
  throw Error("unknown elementary operation");
}

// Statistics -------------------------------------------------------------

double expectation(const SampleValue& x) {
  const auto s = x.samples().span();
  double sum = 0.0;
  for (double v : s) sum += v;
  return sum / static_cast<double>(s.size());
}

std::vector<std::size_t> tail_paths(const SampleValue& x, double alpha, Tail tail) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error("expected shortfall level must lie in (0,1], got " + std::to_string(alpha));
  }
  const auto s = x.samples().span();
  const std::size_t n = s.size();
  auto k = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n) - 1e-9));
  k = std::clamp<std::size_t>(k, 1, n);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (k < n) {
    auto cmp = [&](std::size_t i, std::size_t j) {
      if (s[i] != s[j]) return tail == Tail::left ? s[i] < s[j] : s[i] > s[j];
      return i < j;
    };
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), cmp);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
  }
  return idx;
}

double expected_shortfall(const SampleValue& x, double alpha, Tail tail) {
  const auto idx = tail_paths(x, alpha, tail);
  double sum = 0.0;
  for (std::size_t i : idx) sum += x[i];
  return sum / static_cast<double>(idx.size());
}

double apply(const Statistic& statistic, const SampleValue& x) {
  if (statistic.kind == Statistic::Kind::expectation) return expectation(x);
  return expected_shortfall(x, statistic.alpha, statistic.tail);
}

Samples statistic_weights(const Statistic& statistic, const SampleValue& x) {
  const std::size_t n = x.paths();
  if (x.is_deterministic()) return Samples(1.0);
  if (statistic.kind == Statistic::Kind::expectation) return Samples(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  const auto idx = tail_paths(x, statistic.alpha, statistic.tail);
  std::vector<double> w(n, 0.0);
  for (std::size_t i : idx) w[i] = 1.0 / static_cast<double>(idx.size());
  return Samples(std::move(w));
}

std::map<NodeId, double> gradient(const Tape& tape, const SampleValue& output, const Statistic& statistic) {
  std::map<NodeId, double> out;
  if (!output.recorded()) {
    for (NodeId id : tape.inputs()) out[id] = 0.0;
    return out;
  }
  if (!tape.contains(output)) throw Error("gradient requested for a value not on this tape");
  const Adjoints adj = tape.reverse(output, statistic_weights(statistic, output));
  for (NodeId id : tape.inputs()) out[id] = adj.total(id);
  return out;
}

double variance(const SampleValue& x) {
  if (x.is_deterministic()) return 0.0;
  const double m = expectation(x);
  double s = 0.0;
  for (double v : x.samples().span()) s += (v - m) * (v - m);
  return s / static_cast<double>(x.paths());
}

double stddev(const SampleValue& x) { return std::sqrt(variance(x)); }

double skewness(const SampleValue& x) {
  if (x.is_deterministic()) return 0.0;
  const double m = expectation(x);
  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : x.samples().span()) {
    const double d = v - m;
    m2 += d * d;
    m3 += d * d * d;
  }
  const double n = static_cast<double>(x.paths());
  m2 /= n;
  m3 /= n;
  if (m2 <= 0.0) return 0.0;
  return m3 / std::pow(m2, 1.5);
}

}  // namespace iam::stochvar
