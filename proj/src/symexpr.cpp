#include "fliess/symexpr.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "fliess/error.hpp"

namespace fliess::sym {

class Node {
 public:
  NodeKind kind;
  double value = 0.0;
  int arg = 0;  // variable index or exponent
  std::vector<Expr> children;
  std::uint64_t hash = 0;
  std::uint64_t vars = 0;
};

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  // splitmix-style combine; deterministic across runs.
  v += 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  v ^= v >> 30;
  v *= 0xbf58476d1ce4e5b9ULL;
  v ^= v >> 27;
  v *= 0x94d049bb133111ebULL;
  v ^= v >> 31;
  return h ^ v;
}

}  // namespace

class NodePool {
 public:
  static NodePool& instance() {
    static NodePool pool;
    return pool;
  }

  Expr intern(NodeKind kind, double value, int arg, std::vector<Expr> children) {
    if (value == 0.0) value = 0.0;  // fold -0
    std::uint64_t h = mix(0x51ed270b27b9f2cbULL, static_cast<std::uint64_t>(kind));
    h = mix(h, std::bit_cast<std::uint64_t>(value));
    h = mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(arg)));
    std::uint64_t vars = 0;
    if (kind == NodeKind::kVariable) vars = std::uint64_t{1} << std::min(arg, 63);
    for (const Expr& c : children) {
      h = mix(h, c.hash());
      vars |= c.variables();
    }
    std::lock_guard<std::mutex> lock(mutex_);
    auto range = table_.equal_range(h);
    for (auto it = range.first; it != range.second; ++it) {
      const Node& n = *it->second;
      if (n.kind == kind && std::bit_cast<std::uint64_t>(n.value) == std::bit_cast<std::uint64_t>(value) &&
          n.arg == arg && n.children.size() == children.size() &&
          std::equal(n.children.begin(), n.children.end(), children.begin())) {
        return Expr(it->second);
      }
    }
    auto node = std::make_shared<Node>();
    node->kind = kind;
    node->value = value;
    node->arg = arg;
    node->children = std::move(children);
    node->hash = h;
    node->vars = vars;
    std::shared_ptr<const Node> shared = node;
    table_.emplace(h, shared);
    return Expr(shared);
  }

 private:
  std::mutex mutex_;
  std::unordered_multimap<std::uint64_t, std::shared_ptr<const Node>> table_;
};

namespace {

Expr raw(NodeKind kind, std::vector<Expr> children, int arg = 0) {
  return NodePool::instance().intern(kind, 0.0, arg, std::move(children));
}

// Total order used to canonicalize the children of sums and products:
// constants first, then by structural hash, ties broken structurally.
int compare(const Expr& a, const Expr& b) {
  if (a == b) return 0;
  const bool ca = a.is_constant(), cb = b.is_constant();
  if (ca != cb) return ca ? -1 : 1;
  if (a.hash() != b.hash()) return a.hash() < b.hash() ? -1 : 1;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  if (a.value() != b.value()) return a.value() < b.value() ? -1 : 1;
  if (a.kind() == NodeKind::kVariable && a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  if (a.kind() == NodeKind::kPower && a.exponent() != b.exponent()) {
    return a.exponent() < b.exponent() ? -1 : 1;
  }
  const auto ka = a.children(), kb = b.children();
  if (ka.size() != kb.size()) return ka.size() < kb.size() ? -1 : 1;
  for (std::size_t i = 0; i < ka.size(); ++i) {
    const int c = compare(ka[i], kb[i]);
    if (c != 0) return c;
  }
  return 0;
}

bool expr_less(const Expr& a, const Expr& b) { return compare(a, b) < 0; }

struct PtrHash {
  std::size_t operator()(const Node* p) const noexcept { return std::hash<const Node*>{}(p); }
};

Expr make_power(const Expr& base, int n);
Expr make_product(std::vector<Expr> factors);

// (coefficient, rest) with rest free of a leading constant factor.
std::pair<double, Expr> split_coeff(const Expr& e) {
  if (e.kind() != NodeKind::kProduct) return {1.0, e};
  const auto ch = e.children();
  if (!ch.front().is_constant()) return {1.0, e};
  if (ch.size() == 2) return {ch.front().value(), ch[1]};
  return {ch.front().value(), raw(NodeKind::kProduct, std::vector<Expr>(ch.begin() + 1, ch.end()))};
}

Expr make_sum(std::vector<Expr> terms) {
  double constant = 0.0;
  std::vector<std::pair<Expr, double>> groups;
  std::unordered_map<const Node*, std::size_t, PtrHash> where;
  std::function<void(const Expr&)> add = [&](const Expr& t) {
    if (t.kind() == NodeKind::kSum) {
      for (const Expr& c : t.children()) add(c);
      return;
    }
    if (t.is_constant()) {
      constant += t.value();
      return;
    }
    auto [c, rest] = split_coeff(t);
    auto [it, inserted] = where.try_emplace(rest.node(), groups.size());
    if (inserted) {
      groups.emplace_back(rest, c);
    } else {
      groups[it->second].second += c;
    }
  };
  for (const Expr& t : terms) add(t);

  std::vector<Expr> out;
  for (const auto& [rest, c] : groups) {
    if (c == 0.0) continue;
    out.push_back(c == 1.0 ? rest : make_product({Expr::constant(c), rest}));
  }
  if (constant != 0.0) out.push_back(Expr::constant(constant));
  if (out.empty()) return Expr::constant(0.0);
  if (out.size() == 1) return out.front();
  std::sort(out.begin(), out.end(), expr_less);
  return raw(NodeKind::kSum, std::move(out));
}

Expr make_product(std::vector<Expr> factors) {
  double coeff = 1.0;
  std::vector<std::pair<Expr, int>> groups;
  std::unordered_map<const Node*, std::size_t, PtrHash> where;
  std::function<void(const Expr&)> add = [&](const Expr& f) {
    if (f.kind() == NodeKind::kProduct) {
      for (const Expr& c : f.children()) add(c);
      return;
    }
    if (f.is_constant()) {
      coeff *= f.value();
      return;
    }
    Expr base = f;
    int n = 1;
    if (f.kind() == NodeKind::kPower) {
      base = f.children().front();
      n = f.exponent();
    }
    auto [it, inserted] = where.try_emplace(base.node(), groups.size());
    if (inserted) {
      groups.emplace_back(base, n);
    } else {
      groups[it->second].second += n;
    }
  };
  for (const Expr& f : factors) add(f);
  if (coeff == 0.0) return Expr::constant(0.0);

  std::vector<Expr> out;
  for (const auto& [base, n] : groups) {
    if (n == 0) continue;
    out.push_back(n == 1 ? base : raw(NodeKind::kPower, {base}, n));
  }
  if (out.empty()) return Expr::constant(coeff);
  if (coeff == 1.0 && out.size() == 1) return out.front();
  if (coeff != 1.0) out.push_back(Expr::constant(coeff));
  std::sort(out.begin(), out.end(), expr_less);
  return raw(NodeKind::kProduct, std::move(out));
}

Expr make_power(const Expr& base, int n) {
  if (n == 0) return Expr::constant(1.0);
  if (n == 1) return base;
  if (base.is_constant()) {
    if (base.value() == 0.0 && n < 0) throw std::domain_error("negative power of constant zero");
    return Expr::constant(std::pow(base.value(), n));
  }
  if (base.kind() == NodeKind::kPower) return make_power(base.children().front(), base.exponent() * n);
  if (base.kind() == NodeKind::kProduct) {
    std::vector<Expr> f;
    for (const Expr& c : base.children()) f.push_back(make_power(c, n));
    return make_product(std::move(f));
  }
  return raw(NodeKind::kPower, {base}, n);
}

Expr make_unary(NodeKind kind, const Expr& a) {
  if (a.is_constant()) {
    const double v = a.value();
    switch (kind) {
      case NodeKind::kSin:
        return Expr::constant(std::sin(v));
      case NodeKind::kCos:
        return Expr::constant(std::cos(v));
      case NodeKind::kTan:
        if (std::abs(std::cos(v)) >= kPoleTolerance) return Expr::constant(std::tan(v));
        break;
      default:
        break;
    }
  }
  return raw(kind, {a});
}

class Simplifier {
 public:
  Expr operator()(const Expr& e) {
    auto it = memo_.find(e.node());
    if (it != memo_.end()) return it->second;
    Expr out = build(e);
    memo_.emplace(e.node(), out);
    return out;
  }

 private:
  Expr build(const Expr& e) {
    switch (e.kind()) {
      case NodeKind::kConstant:
      case NodeKind::kVariable:
        return e;
      case NodeKind::kSum: {
        std::vector<Expr> c;
        for (const Expr& x : e.children()) c.push_back((*this)(x));
        return make_sum(std::move(c));
      }
      case NodeKind::kProduct: {
        std::vector<Expr> c;
        for (const Expr& x : e.children()) c.push_back((*this)(x));
        return make_product(std::move(c));
      }
      case NodeKind::kPower:
        return make_power((*this)(e.children().front()), e.exponent());
      case NodeKind::kSin:
      case NodeKind::kCos:
      case NodeKind::kTan:
        return make_unary(e.kind(), (*this)(e.children().front()));
    }
    return e;
  }

  std::unordered_map<const Node*, Expr, PtrHash> memo_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Expr

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double value) {
  if (!std::isfinite(value)) throw std::domain_error("Expr::constant: non-finite value");
  return NodePool::instance().intern(NodeKind::kConstant, value, 0, {});
}

Expr Expr::variable(int index) {
  if (index < 0) throw std::invalid_argument("Expr::variable: negative index");
  return NodePool::instance().intern(NodeKind::kVariable, 0.0, index, {});
}

NodeKind Expr::kind() const noexcept { return node_->kind; }
double Expr::value() const noexcept { return node_->value; }
int Expr::index() const noexcept { return node_->arg; }
int Expr::exponent() const noexcept { return node_->arg; }
std::span<const Expr> Expr::children() const noexcept { return node_->children; }
std::uint64_t Expr::variables() const noexcept { return node_->vars; }
std::uint64_t Expr::hash() const noexcept { return node_->hash; }

Expr operator+(const Expr& a, const Expr& b) { return raw(NodeKind::kSum, {a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }
Expr operator*(const Expr& a, const Expr& b) { return raw(NodeKind::kProduct, {a, b}); }
Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw std::domain_error("division by the constant 0");
  return a * pow(b, -1);
}
Expr operator-(const Expr& a) { return Expr::constant(-1.0) * a; }

Expr pow(const Expr& base, int exponent) {
  if (exponent < 0 && base.is_zero()) throw std::domain_error("negative power of the constant 0");
  return raw(NodeKind::kPower, {base}, exponent);
}
Expr sin(const Expr& a) { return raw(NodeKind::kSin, {a}); }
Expr cos(const Expr& a) { return raw(NodeKind::kCos, {a}); }
Expr tan(const Expr& a) { return raw(NodeKind::kTan, {a}); }

Expr simplify(const Expr& e) { return Simplifier{}(e); }
Expr sum(std::vector<Expr> terms) { return make_sum(std::move(terms)); }
Expr product(std::vector<Expr> factors) { return make_product(std::move(factors)); }

// ---------------------------------------------------------------------------
// Differentiation

struct Differentiator::Impl {
  struct Key {
    const Node* node;
    int var;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      return std::hash<const Node*>{}(k.node) * 31u + static_cast<std::size_t>(k.var);
    }
  };

  Simplifier simplify;
  std::unordered_map<Key, Expr, KeyHash> memo;

  Expr diff(const Expr& e, int var) {
    const std::uint64_t bit = std::uint64_t{1} << std::min(var, 63);
    if ((e.variables() & bit) == 0) return Expr::constant(0.0);
    const Key key{e.node(), var};
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    Expr out = build(e, var);
    memo.emplace(key, out);
    return out;
  }

  Expr build(const Expr& e, int var) {
    const auto ch = e.children();
    switch (e.kind()) {
      case NodeKind::kConstant:
        return Expr::constant(0.0);
      case NodeKind::kVariable:
        return Expr::constant(e.index() == var ? 1.0 : 0.0);
      case NodeKind::kSum: {
        std::vector<Expr> terms;
        for (const Expr& c : ch) terms.push_back(diff(c, var));
        return make_sum(std::move(terms));
      }
      case NodeKind::kProduct: {
        std::vector<Expr> terms;
        for (std::size_t i = 0; i < ch.size(); ++i) {
          Expr d = diff(ch[i], var);
          if (d.is_zero()) continue;
          std::vector<Expr> f(ch.begin(), ch.end());
          f[i] = d;
          terms.push_back(make_product(std::move(f)));
        }
        return make_sum(std::move(terms));
      }
      case NodeKind::kPower: {
        const Expr& b = ch.front();
        const int n = e.exponent();
        return make_product({Expr::constant(n), make_power(b, n - 1), diff(b, var)});
      }
      case NodeKind::kSin:
        return make_product({make_unary(NodeKind::kCos, ch.front()), diff(ch.front(), var)});
      case NodeKind::kCos:
        return make_product(
            {Expr::constant(-1.0), make_unary(NodeKind::kSin, ch.front()), diff(ch.front(), var)});
      case NodeKind::kTan:
        return make_product({make_power(make_unary(NodeKind::kCos, ch.front()), -2),
                             diff(ch.front(), var)});
    }
    return Expr::constant(0.0);
  }
};

Differentiator::Differentiator() : impl_(std::make_unique<Impl>()) {}
Differentiator::~Differentiator() = default;

Expr Differentiator::operator()(const Expr& e, int var) {
  if (var < 0) throw std::invalid_argument("differentiate: negative variable index");
  return impl_->diff(impl_->simplify(e), var);
}

Expr differentiate(const Expr& e, int var) { return Differentiator{}(e, var); }

// ---------------------------------------------------------------------------
// Evaluation

CompiledExprs::CompiledExprs(std::span<const Expr> roots) {
  std::unordered_map<const Node*, std::uint32_t, PtrHash> slot;
  std::function<std::uint32_t(const Expr&)> visit = [&](const Expr& e) -> std::uint32_t {
    auto it = slot.find(e.node());
    if (it != slot.end()) return it->second;
    std::vector<std::uint32_t> kids;
    for (const Expr& c : e.children()) kids.push_back(visit(c));
    Op op{e.kind(), 0, 0.0, static_cast<std::uint32_t>(child_slots_.size()),
          static_cast<std::uint32_t>(kids.size())};
    if (e.kind() == NodeKind::kConstant) op.value = e.value();
    if (e.kind() == NodeKind::kVariable) {
      op.arg = e.index();
      required_dim_ = std::max(required_dim_, e.index() + 1);
    }
    if (e.kind() == NodeKind::kPower) op.arg = e.exponent();
    child_slots_.insert(child_slots_.end(), kids.begin(), kids.end());
    const auto id = static_cast<std::uint32_t>(ops_.size());
    ops_.push_back(op);
    slot.emplace(e.node(), id);
    return id;
  };
  for (const Expr& r : roots) roots_.push_back(visit(r));
}

void CompiledExprs::evaluate(std::span<const double> z, std::span<double> out) const {
  if (static_cast<int>(z.size()) < required_dim_) {
    throw std::invalid_argument("evaluate: point has dimension " + std::to_string(z.size()) +
                                ", expression needs " + std::to_string(required_dim_));
  }
  if (out.size() != roots_.size()) throw std::invalid_argument("evaluate: output size mismatch");
  std::vector<double> v(ops_.size());
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const Op& op = ops_[i];
    const std::uint32_t* kids = child_slots_.data() + op.first_child;
    double r = 0.0;
    switch (op.kind) {
      case NodeKind::kConstant:
        r = op.value;
        break;
      case NodeKind::kVariable:
        r = z[static_cast<std::size_t>(op.arg)];
        break;
      case NodeKind::kSum:
        for (std::uint32_t k = 0; k < op.child_count; ++k) r += v[kids[k]];
        break;
      case NodeKind::kProduct:
        r = 1.0;
        for (std::uint32_t k = 0; k < op.child_count; ++k) r *= v[kids[k]];
        break;
      case NodeKind::kPower: {
        const double b = v[kids[0]];
        if (op.arg < 0 && std::abs(b) < kPoleTolerance) {
          throw SingularityError("evaluate: division by (near) zero");
        }
        r = std::pow(b, op.arg);
        break;
      }
      case NodeKind::kSin:
        r = std::sin(v[kids[0]]);
        break;
      case NodeKind::kCos:
        r = std::cos(v[kids[0]]);
        break;
      case NodeKind::kTan: {
        const double a = v[kids[0]];
        if (std::abs(std::cos(a)) < kPoleTolerance) throw SingularityError("evaluate: tan pole");
        r = std::tan(a);
        break;
      }
    }
    if (!std::isfinite(r)) throw SingularityError("evaluate: non-finite intermediate value");
    v[i] = r;
  }
  for (std::size_t k = 0; k < roots_.size(); ++k) out[k] = v[roots_[k]];
}

std::vector<double> CompiledExprs::evaluate(std::span<const double> z) const {
  std::vector<double> out(roots_.size());
  evaluate(z, out);
  return out;
}

double evaluate(const Expr& e, std::span<const double> z) {
  const Expr roots[] = {e};
  return CompiledExprs(roots).evaluate(z).front();
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest representation that round-trips.
  for (int p = 1; p <= 17; ++p) {
    char shorter[32];
    std::snprintf(shorter, sizeof shorter, "%.*g", p, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

bool is_atomic(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::kVariable:
    case NodeKind::kSin:
    case NodeKind::kCos:
    case NodeKind::kTan:
      return true;
    case NodeKind::kConstant:
      return e.value() >= 0.0;
    default:
      return false;
  }
}

std::string print(const Expr& e);

std::string wrapped(const Expr& e) { return is_atomic(e) ? print(e) : "(" + print(e) + ")"; }

std::string print(const Expr& e) {
  const auto ch = e.children();
  switch (e.kind()) {
    case NodeKind::kConstant:
      return format_number(e.value());
    case NodeKind::kVariable:
      return "z" + std::to_string(e.index() + 1);
    case NodeKind::kSum: {
      std::string s;
      for (std::size_t i = 0; i < ch.size(); ++i) s += (i ? " + " : "") + print(ch[i]);
      return s;
    }
    case NodeKind::kProduct: {
      std::string s;
      for (std::size_t i = 0; i < ch.size(); ++i) {
        const bool sum_child = ch[i].kind() == NodeKind::kSum;
        s += (i ? "*" : "") + (sum_child ? "(" + print(ch[i]) + ")" : wrapped(ch[i]));
      }
      return s;
    }
    case NodeKind::kPower:
      return wrapped(ch.front()) + "^" + std::to_string(e.exponent());
    case NodeKind::kSin:
      return "sin(" + print(ch.front()) + ")";
    case NodeKind::kCos:
      return "cos(" + print(ch.front()) + ")";
    case NodeKind::kTan:
      return "tan(" + print(ch.front()) + ")";
  }
  return "?";
}

}  // namespace

std::string to_string(const Expr& e) { return print(e); }

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view text, int state_dim) : text_(text), state_dim_(state_dim) {}

  Expr parse_all() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("parse error at position " + std::to_string(pos_) + ": " + what +
                                " in \"" + std::string(text_) + "\"");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + term();
      } else if (accept('-')) {
        lhs = lhs - term();
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * unary();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Expr rhs = unary();
        if (rhs.is_zero()) {
          pos_ = at;
          fail("division by the constant 0");
        }
        lhs = lhs / rhs;
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (!accept('^')) return base;
    skip_ws();
    int sign = 1;
    if (accept('-')) {
      sign = -1;
    } else {
      accept('+');
    }
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer exponent");
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      fail("exponents must be integers");
    }
    const int n = sign * std::stoi(std::string(text_.substr(start, pos_ - start)));
    if (n < 0 && base.is_zero()) fail("negative power of the constant 0");
    return pow(base, n);
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == "z") return variable();
      if (name == "sin" || name == "cos" || name == "tan") {
        expect('(');
        Expr arg = expr();
        expect(')');
        if (name == "sin") return sin(arg);
        if (name == "cos") return cos(arg);
        return tan(arg);
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr number() {
    const std::string rest(text_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    return Expr::constant(v);
  }

  Expr variable() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a variable index after 'z'");
    const int k = std::stoi(std::string(text_.substr(start, pos_ - start)));
    if (k < 1) {
      pos_ = start;
      fail("variables are numbered from z1");
    }
    if (state_dim_ > 0 && k > state_dim_) {
      pos_ = start;
      fail("variable z" + std::to_string(k) + " exceeds state dimension " + std::to_string(state_dim_));
    }
    return Expr::variable(k - 1);
  }

  std::string_view text_;
  int state_dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, int state_dim) { return Parser(text, state_dim).parse_all(); }

}  // namespace fliess::sym
