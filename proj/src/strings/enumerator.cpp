#include "fzeta/strings/enumerator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <utility>

#include "fzeta/numeric/special.hpp"

namespace fzeta::strings {

namespace {

using numeric::real_pow;

double group_power(const LengthGroup& g, double sigma) {
  return std::exp(std::log(g.multiplicity) + sigma * std::log(g.length));
}

class FiniteEnumerator final : public LengthEnumerator {
 public:
  explicit FiniteEnumerator(std::shared_ptr<const std::vector<LengthGroup>> groups)
      : holder_(std::move(groups)), groups_(*holder_) {}

  std::optional<LengthGroup> next() override {
    if (pos_ >= groups_.size()) return std::nullopt;
    return groups_[pos_++];
  }

  double tail_bound(double sigma) const override {
    double acc = 0.0;
    for (std::size_t i = pos_; i < groups_.size(); ++i) acc += group_power(groups_[i], sigma);
    return acc;
  }

  Estimate<cplx> tail_estimate(cplx s) const override {
    cplx acc = 0.0;
    for (std::size_t i = pos_; i < groups_.size(); ++i)
      acc += groups_[i].multiplicity * real_pow(groups_[i].length, s);
    return {acc, 0.0};
  }

 private:
  std::shared_ptr<const std::vector<LengthGroup>> holder_;
  const std::vector<LengthGroup>& groups_;
  std::size_t pos_ = 0;
};

// Multiplicities are counts; undo the rounding of exp(log m) when m is a representable integer.
double count_from_log(double log_m) {
  const double m = std::exp(log_m);
  const double r = std::round(m);
  return (m < 0x1p53 && std::abs(m - r) <= 1e-9 * m) ? r : m;
}

class LatticeEnumerator final : public LengthEnumerator {
 public:
  LatticeEnumerator(double first, double ratio, std::function<double(long)> log_mult)
      : log_first_(std::log(first)), log_ratio_(std::log(ratio)), log_mult_(std::move(log_mult)) {}

  std::optional<LengthGroup> next() override {
    const double log_len = log_first_ + static_cast<double>(k_) * log_ratio_;
    if (log_len < -700.0) return std::nullopt;
    LengthGroup g{std::exp(log_len), count_from_log(log_mult_(k_))};
    ++k_;
    return g;
  }

  double tail_bound(double sigma) const override { return bound_from(k_, sigma); }

  // Direct summation of the remaining groups; they decay geometrically once bounded.
  Estimate<cplx> tail_estimate(cplx s) const override {
    const double sigma = s.real();
    if (!std::isfinite(bound_from(k_, sigma))) return {cplx{0.0}, kInf};
    cplx acc = 0.0;
    long k = k_;
    for (int i = 0; i < 100000; ++i, ++k) {
      const double log_len = log_first_ + static_cast<double>(k) * log_ratio_;
      if (log_len < -700.0) return {acc, 0.0};
      const double rest = bound_from(k, sigma);
      if (rest <= 1e-17 * std::abs(acc)) return {acc, rest};
      acc += std::exp(log_mult_(k) + s * log_len);
    }
    return {acc, bound_from(k, sigma)};
  }

 private:
  double bound_from(long k, double sigma) const {
    const double log_len = log_first_ + static_cast<double>(k) * log_ratio_;
    if (log_len < -700.0) return 0.0;
    const double log_term = log_mult_(k) + sigma * log_len;
    const double log_q = log_mult_(k + 1) - log_mult_(k) + sigma * log_ratio_;
    if (log_q >= 0.0) return kInf;
    return std::exp(log_term) / (1.0 - std::exp(log_q));
  }

  double log_first_;
  double log_ratio_;
  std::function<double(long)> log_mult_;
  long k_ = 0;
};

class AStringEnumerator final : public LengthEnumerator {
 public:
  explicit AStringEnumerator(double a) : a_(a) {}

  std::optional<LengthGroup> next() override {
    ++j_;
    const double j = static_cast<double>(j_);
    const double len = -std::pow(j, -a_) * std::expm1(-a_ * std::log1p(1.0 / j));
    if (!(len > 0.0)) return std::nullopt;
    return LengthGroup{len, 1.0};
  }

  double tail_bound(double sigma) const override {
    // ℓ_j ≤ a j^{-a-1}; compare Σ_{j>J} j^{-p} with the integral from J+1.
    const double p = (a_ + 1.0) * sigma;
    if (p <= 1.0) return kInf;
    const double j1 = static_cast<double>(j_ + 1);
    return std::pow(a_, sigma) * (std::pow(j1, -p) + std::pow(j1, 1.0 - p) / (p - 1.0));
  }

  Estimate<cplx> tail_estimate(cplx s) const override {
    if (j_ < 64) return {cplx{0.0}, tail_bound(s.real())};
    return a_string_tail(a_, s, j_);
  }

 private:
  double a_;
  long j_ = 0;
};

// Words over the ratio list, grouped by distinct ratio value.
class MoranEnumerator final : public LengthEnumerator {
 public:
  explicit MoranEnumerator(const std::vector<double>& ratios) {
    std::map<double, int> counts;
    for (double r : ratios) ++counts[r];
    for (const auto& [r, c] : counts) {
      log_ratio_.push_back(std::log(r));
      log_count_.push_back(std::log(static_cast<double>(c)));
    }
    ratios_ = ratios;
    push(std::vector<int>(log_ratio_.size(), 0));
  }

  std::optional<LengthGroup> next() override {
    if (heap_.empty()) return std::nullopt;
    const double top = heap_.top().log_value;
    if (top < -700.0) return std::nullopt;
    double mult = 0.0;
    while (!heap_.empty() && std::abs(heap_.top().log_value - top) <= 1e-12 * std::max(1.0, -top)) {
      Node node = heap_.top();
      heap_.pop();
      mult += count_from_log(node.log_mult);
      for (std::size_t i = 0; i < node.exps.size(); ++i) {
        auto child = node.exps;
        ++child[i];
        push(std::move(child));
      }
    }
    LengthGroup g{std::exp(top), mult};
    emitted_.push_back(g);
    return g;
  }

  double tail_bound(double sigma) const override {
    double sum = 0.0;
    for (double r : ratios_) sum += std::pow(r, sigma);
    if (sum >= 1.0) return kInf;
    const double total = 1.0 / (1.0 - sum);
    double done = 0.0;
    for (const auto& g : emitted_) done += group_power(g, sigma);
    // rounding slack for the subtraction
    return std::max(0.0, total - done) + 8.0 * std::numeric_limits<double>::epsilon() * total;
  }

 private:
  struct Node {
    double log_value;
    double log_mult;
    std::vector<int> exps;
    bool operator<(const Node& other) const { return log_value < other.log_value; }
  };

  void push(std::vector<int> exps) {
    if (!visited_.insert(exps).second) return;
    double log_value = 0.0;
    double log_mult = 0.0;
    int total = 0;
    for (std::size_t i = 0; i < exps.size(); ++i) {
      log_value += exps[i] * log_ratio_[i];
      log_mult += exps[i] * log_count_[i] - std::lgamma(exps[i] + 1.0);
      total += exps[i];
    }
    log_mult += std::lgamma(total + 1.0);
    heap_.push(Node{log_value, log_mult, std::move(exps)});
  }

  std::vector<double> ratios_;
  std::vector<double> log_ratio_;
  std::vector<double> log_count_;
  std::priority_queue<Node> heap_;
  std::set<std::vector<int>> visited_;
  std::vector<LengthGroup> emitted_;
};

class ScaledEnumerator final : public LengthEnumerator {
 public:
  ScaledEnumerator(double c, std::unique_ptr<LengthEnumerator> inner) : c_(c), inner_(std::move(inner)) {}

  std::optional<LengthGroup> next() override {
    auto g = inner_->next();
    if (g) g->length *= c_;
    return g;
  }

  double tail_bound(double sigma) const override { return std::pow(c_, sigma) * inner_->tail_bound(sigma); }

  Estimate<cplx> tail_estimate(cplx s) const override {
    auto e = inner_->tail_estimate(s);
    return {real_pow(c_, s) * e.value, std::pow(c_, s.real()) * e.error};
  }

 private:
  double c_;
  std::unique_ptr<LengthEnumerator> inner_;
};

class UnionEnumerator final : public LengthEnumerator {
 public:
  UnionEnumerator(std::vector<std::unique_ptr<LengthEnumerator>> parts, std::function<double(double)> omitted)
      : parts_(std::move(parts)), omitted_(std::move(omitted)) {
    for (auto& p : parts_) pending_.push_back(p->next());
  }

  std::optional<LengthGroup> next() override {
    std::size_t best = parts_.size();
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (pending_[i] && (best == parts_.size() || pending_[i]->length > pending_[best]->length)) best = i;
    }
    if (best == parts_.size()) return std::nullopt;
    auto g = pending_[best];
    pending_[best] = parts_[best]->next();
    return g;
  }

  double tail_bound(double sigma) const override {
    double acc = omitted_ ? omitted_(sigma) : 0.0;
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (pending_[i]) acc += group_power(*pending_[i], sigma);
      acc += parts_[i]->tail_bound(sigma);
    }
    return acc;
  }

  Estimate<cplx> tail_estimate(cplx s) const override {
    Estimate<cplx> acc{cplx{0.0}, omitted_ ? omitted_(s.real()) : 0.0};
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (pending_[i]) acc.value += pending_[i]->multiplicity * real_pow(pending_[i]->length, s);
      const auto e = parts_[i]->tail_estimate(s);
      acc.value += e.value;
      acc.error += e.error;
    }
    return acc;
  }

 private:
  std::vector<std::unique_ptr<LengthEnumerator>> parts_;
  std::vector<std::optional<LengthGroup>> pending_;
  std::function<double(double)> omitted_;
};

// Materializes both factors on demand and walks the product grid best-first:
// popping (i, j) pushes (i, j+1), and (i+1, 0) when j == 0.
class TensorEnumerator final : public LengthEnumerator {
 public:
  TensorEnumerator(std::unique_ptr<LengthEnumerator> left, std::unique_ptr<LengthEnumerator> right)
      : left_(std::move(left)), right_(std::move(right)) {
    if (have(left_, a_, 0) && have(right_, b_, 0)) {
      heap_.push(Cell{a_[0].length * b_[0].length, 0, 0});
      row_next_.push_back(0);
    }
  }

  std::optional<LengthGroup> next() override {
    if (heap_.empty()) return std::nullopt;
    const Cell cell = heap_.top();
    heap_.pop();
    const std::size_t i = cell.i, j = cell.j;
    if (have(right_, b_, j + 1)) {
      heap_.push(Cell{a_[i].length * b_[j + 1].length, i, j + 1});
      row_next_[i] = j + 1;
    } else {
      row_next_[i] = kDone;
    }
    if (j == 0 && have(left_, a_, i + 1)) {
      heap_.push(Cell{a_[i + 1].length * b_[0].length, i + 1, 0});
      row_next_.push_back(0);
    }
    return LengthGroup{cell.value, a_[i].multiplicity * b_[j].multiplicity};
  }

  double tail_bound(double sigma) const override {
    std::vector<double> prefix_b(b_.size() + 1, 0.0);
    for (std::size_t j = 0; j < b_.size(); ++j) prefix_b[j + 1] = prefix_b[j] + group_power(b_[j], sigma);
    const double b_total = prefix_b.back() + right_->tail_bound(sigma);
    double a_total = left_->tail_bound(sigma);
    for (const auto& g : a_) a_total += group_power(g, sigma);
    if (!std::isfinite(a_total) || !std::isfinite(b_total)) return kInf;

    double acc = 0.0;
    double rows_seen = 0.0;
    for (std::size_t i = 0; i < row_next_.size(); ++i) {
      const double ai = group_power(a_[i], sigma);
      rows_seen += ai;
      if (row_next_[i] != kDone) acc += ai * (b_total - prefix_b[row_next_[i]]);
    }
    acc += std::max(0.0, a_total - rows_seen) * b_total;
    return acc;
  }

  // Opened rows still owe a_i^s times the b-tail from their pending column;
  // unopened rows and the unread left tail owe a full ζ_b each.
  Estimate<cplx> tail_estimate(cplx s) const override {
    const auto rb = right_->tail_estimate(s);
    const auto ra = left_->tail_estimate(s);
    std::vector<cplx> suffix_b(b_.size() + 1, cplx{0.0});
    for (std::size_t j = b_.size(); j-- > 0;)
      suffix_b[j] = suffix_b[j + 1] + b_[j].multiplicity * real_pow(b_[j].length, s);
    const cplx zb = suffix_b[0] + rb.value;

    cplx acc = 0.0;
    double err = 0.0;
    cplx unopened = ra.value;
    double unopened_abs = std::abs(ra.value);
    for (std::size_t i = 0; i < a_.size(); ++i) {
      const cplx ai = a_[i].multiplicity * real_pow(a_[i].length, s);
      if (i >= row_next_.size()) {
        unopened += ai;
        unopened_abs += std::abs(ai);
      } else if (row_next_[i] != kDone) {
        acc += ai * (suffix_b[row_next_[i]] + rb.value);
        err += std::abs(ai) * rb.error;
      }
    }
    acc += unopened * zb;
    err += unopened_abs * rb.error + ra.error * (std::abs(zb) + rb.error);
    if (!std::isfinite(err)) return {cplx{0.0}, tail_bound(s.real())};
    return {acc, std::min(err, tail_bound(s.real()))};
  }

 private:
  static constexpr std::size_t kDone = static_cast<std::size_t>(-1);

  struct Cell {
    double value;
    std::size_t i, j;
    bool operator<(const Cell& other) const { return value < other.value; }
  };

  static bool have(const std::unique_ptr<LengthEnumerator>& src, std::vector<LengthGroup>& store, std::size_t idx) {
    while (store.size() <= idx) {
      auto g = src->next();
      if (!g) return false;
      store.push_back(*g);
    }
    return true;
  }

  std::unique_ptr<LengthEnumerator> left_, right_;
  std::vector<LengthGroup> a_, b_;
  std::priority_queue<Cell> heap_;
  std::vector<std::size_t> row_next_;
};

}  // namespace

EnumeratorFactory finite_lengths(std::vector<LengthGroup> groups) {
  std::stable_sort(groups.begin(), groups.end(),
                   [](const LengthGroup& x, const LengthGroup& y) { return x.length > y.length; });
  auto shared = std::make_shared<const std::vector<LengthGroup>>(std::move(groups));
  return [shared]() -> std::unique_ptr<LengthEnumerator> { return std::make_unique<FiniteEnumerator>(shared); };
}

EnumeratorFactory lattice_lengths(double first, double ratio, std::function<double(long)> log_mult) {
  return [=]() -> std::unique_ptr<LengthEnumerator> {
    return std::make_unique<LatticeEnumerator>(first, ratio, log_mult);
  };
}

EnumeratorFactory a_string_lengths(double a) {
  return [a]() -> std::unique_ptr<LengthEnumerator> { return std::make_unique<AStringEnumerator>(a); };
}

EnumeratorFactory moran_lengths(std::vector<double> ratios) {
  return [ratios = std::move(ratios)]() -> std::unique_ptr<LengthEnumerator> {
    return std::make_unique<MoranEnumerator>(ratios);
  };
}

EnumeratorFactory scaled_lengths(double c, EnumeratorFactory inner) {
  return [c, inner = std::move(inner)]() -> std::unique_ptr<LengthEnumerator> {
    return std::make_unique<ScaledEnumerator>(c, inner());
  };
}

EnumeratorFactory union_lengths(std::vector<EnumeratorFactory> parts, std::function<double(double)> omitted_tail) {
  return [parts = std::move(parts), omitted_tail = std::move(omitted_tail)]() -> std::unique_ptr<LengthEnumerator> {
    std::vector<std::unique_ptr<LengthEnumerator>> live;
    live.reserve(parts.size());
    for (const auto& p : parts) live.push_back(p());
    return std::make_unique<UnionEnumerator>(std::move(live), omitted_tail);
  };
}

EnumeratorFactory tensor_lengths(EnumeratorFactory left, EnumeratorFactory right) {
  return [left = std::move(left), right = std::move(right)]() -> std::unique_ptr<LengthEnumerator> {
    return std::make_unique<TensorEnumerator>(left(), right());
  };
}

Estimate<cplx> a_string_tail(double a, cplx s, long J) {
  // ℓ(x) = a x^{-a-1} (1 + Σ_k e_k x^{-k}),  ℓ(x)^s = a^s Σ_k p_k x^{-(a+1)s-k}
  constexpr int kTerms = 18;
  std::vector<cplx> e(kTerms, 0.0);
  for (int k = 1; k < kTerms; ++k) e[k] = -numeric::binomial(-a, k + 1) / a;
  const auto p = numeric::series_pow1p(e, s);

  const cplx base = real_pow(a, s);
  const double q = static_cast<double>(J + 1);
  cplx acc = 0.0;
  double err = 0.0;
  double last = 0.0;
  for (int k = 0; k < kTerms; ++k) {
    const auto hz = numeric::hurwitz_zeta((a + 1.0) * s + static_cast<double>(k), q);
    const cplx term = base * p[k] * hz.value;
    acc += term;
    err += std::abs(base * p[k]) * hz.error;
    last = std::abs(term);
  }
  return {acc, err + last};
}

}  // namespace fzeta::strings
