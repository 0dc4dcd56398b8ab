#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fliess::sym {

enum class NodeKind : std::uint8_t { kConstant, kVariable, kSum, kProduct, kPower, kSin, kCos, kTan };

/// Denominators and cosines (for tan) smaller than this in magnitude are
/// reported as singular during evaluation.
inline constexpr double kPoleTolerance = 1e-12;

class Node;

/// Handle to an immutable, interned expression node. Structurally equal
/// expressions share one node, so pointer equality is structural equality.
///
/// Quotients are stored as a product with an integer power of -1; sec is 1/cos.
/// The node pool is process-wide, guarded by a mutex, and never shrinks.
class Expr {
 public:
  Expr();  // the constant 0
  static Expr constant(double value);
  /// Zero-based state index: variable(0) prints and parses as z1.
  static Expr variable(int index);

  NodeKind kind() const noexcept;
  double value() const noexcept;    // kConstant
  int index() const noexcept;       // kVariable
  int exponent() const noexcept;    // kPower
  std::span<const Expr> children() const noexcept;
  /// Bit i set when the expression depends on variable i (indices >= 64 share bit 63).
  std::uint64_t variables() const noexcept;
  std::uint64_t hash() const noexcept;

  bool is_constant() const noexcept { return kind() == NodeKind::kConstant; }
  bool is_constant(double v) const noexcept { return is_constant() && value() == v; }
  bool is_zero() const noexcept { return is_constant(0.0); }

  const Node* node() const noexcept { return node_.get(); }
  bool operator==(const Expr& other) const noexcept { return node_ == other.node_; }

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  /// Throws std::domain_error when `b` is the constant 0.
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

 private:
  friend class NodePool;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr tan(const Expr& a);

/// Constant folding, 0/1 identities, flattening of nested sums and products,
/// collection of like terms and like factors. No trigonometric rewriting.
Expr simplify(const Expr& e);

/// Canonical sum and product of operands that are already simplified; cheaper
/// than simplify() on a raw tree when building large expressions bottom-up.
Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);

/// Exact partial derivative with respect to variable `var` (simplified).
Expr differentiate(const Expr& e, int var);

/// Point evaluation; throws SingularityError on poles or non-finite values.
double evaluate(const Expr& e, std::span<const double> z);

/// Text form accepted by parse(): z1..zn, sin/cos/tan, + - * / ^.
std::string to_string(const Expr& e);

/// Parses the textual syntax. `state_dim` > 0 bounds the variable indices.
/// Throws std::invalid_argument with the offending position on bad input.
Expr parse(std::string_view text, int state_dim = 0);

/// Memoizing partial-derivative engine shared across many expressions.
class Differentiator {
 public:
  Differentiator();
  ~Differentiator();
  Differentiator(const Differentiator&) = delete;
  Differentiator& operator=(const Differentiator&) = delete;

  Expr operator()(const Expr& e, int var);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// A set of expressions flattened into one evaluation tape; shared
/// subexpressions are evaluated once per point.
class CompiledExprs {
 public:
  CompiledExprs() = default;
  explicit CompiledExprs(std::span<const Expr> roots);

  std::size_t size() const noexcept { return roots_.size(); }
  std::size_t tape_size() const noexcept { return ops_.size(); }
  /// Highest variable index referenced, plus one.
  int required_dim() const noexcept { return required_dim_; }

  /// Writes one value per root into `out`; throws SingularityError.
  void evaluate(std::span<const double> z, std::span<double> out) const;
  std::vector<double> evaluate(std::span<const double> z) const;

 private:
  struct Op {
    NodeKind kind;
    int arg;  // variable index or exponent
    double value;
    std::uint32_t first_child;
    std::uint32_t child_count;
  };
  std::vector<Op> ops_;
  std::vector<std::uint32_t> child_slots_;
  std::vector<std::uint32_t> roots_;
  int required_dim_ = 0;
};

}  // namespace fliess::sym
