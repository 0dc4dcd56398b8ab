#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fliess/series.hpp"
#include "fliess/symexpr.hpp"

namespace fliess {

/// Input-affine model  z' = g0(z) + sum_i g_i(z) u_i,  y = h(z),  z(0) = z0.
class Realization {
 public:
  /// `fields` holds g0 (drift) followed by one field per input, each with
  /// z0.size() components. Throws std::invalid_argument on inconsistent sizes
  /// or on variables outside z1..zn.
  Realization(std::vector<std::vector<sym::Expr>> fields, std::vector<sym::Expr> outputs,
              Eigen::VectorXd z0);

  int state_dim() const noexcept { return static_cast<int>(z0_.size()); }
  int input_count() const noexcept { return static_cast<int>(fields_.size()) - 1; }
  int output_count() const noexcept { return static_cast<int>(outputs_.size()); }

  const std::vector<std::vector<sym::Expr>>& fields() const noexcept { return fields_; }
  const std::vector<sym::Expr>& outputs() const noexcept { return outputs_; }
  const Eigen::VectorXd& z0() const noexcept { return z0_; }

  Realization with_initial_state(Eigen::VectorXd z0) const;

 private:
  std::vector<std::vector<sym::Expr>> fields_;
  std::vector<sym::Expr> outputs_;
  Eigen::VectorXd z0_;
};

/// Symbolic iterated Lie derivatives L_{g_eta} h_i for every word |eta| <= N.
/// Built once per model structure and evaluated at any number of initial
/// states. The coefficient of x_{j1} ... x_{jk} is L_{g_{jk}} ... L_{g_{j1}} h,
/// i.e. the leftmost letter is differentiated first.
class GeneratingSeriesTable {
 public:
  GeneratingSeriesTable(const Realization& model, int max_degree);

  int max_degree() const noexcept { return max_degree_; }
  int alphabet_size() const noexcept { return alphabet_; }
  /// Words whose Lie derivative is not identically zero.
  std::size_t word_count() const noexcept { return keys_.size(); }
  std::size_t tape_size() const noexcept { return tape_.tape_size(); }

  /// Series of each output at state z; throws SingularityError on poles.
  VectorSeries evaluate(std::span<const double> z) const;
  VectorSeries evaluate(const Eigen::VectorXd& z) const {
    return evaluate(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())));
  }

  /// The symbolic coefficient of output i on word w (zero if absent).
  sym::Expr coefficient(std::size_t output, const Word& w) const;

 private:
  int alphabet_;
  int max_degree_;
  std::size_t outputs_;
  std::vector<std::size_t> owner_;  // output index per entry
  std::vector<WordKey> keys_;
  std::vector<sym::Expr> exprs_;
  sym::CompiledExprs tape_;
};

/// (c_i, eta) = L_{g_eta} h_i(z0) for all |eta| <= N.
VectorSeries generating_series(const Realization& model, int max_degree);

/// Inputs u_1..u_m on [0, horizon]; u_0 == 1 is implicit.
class ControlSignal {
 public:
  /// Per input, coefficients in the series convention: u(t) = sum c_k t^k / k!.
  static ControlSignal polynomial(std::vector<std::vector<double>> coeffs, double horizon);
  /// Constant inputs.
  static ControlSignal constant(std::vector<double> values, double horizon);
  /// Samples on t_k = k * horizon / (samples - 1), linearly interpolated.
  static ControlSignal sampled(std::vector<std::vector<double>> samples, double horizon);

  int input_count() const noexcept { return static_cast<int>(data_.size()); }
  double horizon() const noexcept { return horizon_; }
  /// u_i(t) for i = 1..m; i = 0 gives 1. Times outside [0, horizon] are clamped.
  double value(int input, double t) const;

 private:
  ControlSignal(bool sampled, std::vector<std::vector<double>> data, double horizon);
  bool sampled_;
  std::vector<std::vector<double>> data_;
  double horizon_;
};

/// Time-gridded record. states and inputs may be empty (e.g. pure operator
/// evaluation); otherwise every row has one entry per time.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> outputs;
  std::vector<Eigen::VectorXd> inputs;

  std::size_t size() const noexcept { return times.size(); }
};

/// Uniform grid of `points` times on [0, horizon].
std::vector<double> uniform_grid(double horizon, std::size_t points);

/// Truncated Fliess operator sum (c, eta) E_eta[u](t) on a uniform grid
/// starting at 0, with iterated integrals by the trapezoid rule. Each E_eta is
/// computed once from its suffix.
Trajectory fliess_eval(const VectorSeries& c, const ControlSignal& u, std::span<const double> grid);
/// Single output series.
std::vector<double> fliess_eval(const Series& c, const ControlSignal& u, std::span<const double> grid);

/// Classical RK4 on [0, horizon] with `steps` equal steps; throws
/// SingularityError (naming the time) on poles or non-finite states.
Trajectory rk4_simulate(const Realization& model, const ControlSignal& u, double horizon, int steps);

/// Conservative constants with |(c_i, eta)| <= K M^|eta| |eta|! over the
/// stored words of c.
struct GrowthEstimate {
  double k;
  double m;
};
GrowthEstimate estimate_growth(const VectorSeries& c);

/// CSV with header t,z1..zn,y1..yl and 15 significant digits.
void write_csv(std::ostream& os, const Trajectory& traj);

}  // namespace fliess
