#include "fliess/realization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "fliess/error.hpp"

namespace fliess {

namespace {

void check_vars(const sym::Expr& e, int n, const char* what) {
  if (n >= 64) return;
  const std::uint64_t allowed = n == 0 ? 0 : (~std::uint64_t{0} >> (64 - n));
  if ((e.variables() & ~allowed) != 0) {
    throw std::invalid_argument(std::string(what) + " \"" + sym::to_string(e) +
                                "\" uses a variable beyond z" + std::to_string(n));
  }
}

}  // namespace

Realization::Realization(std::vector<std::vector<sym::Expr>> fields, std::vector<sym::Expr> outputs,
                         Eigen::VectorXd z0)
    : z0_(std::move(z0)) {
  const int n = static_cast<int>(z0_.size());
  if (n == 0) throw std::invalid_argument("Realization: empty state");
  if (fields.empty()) throw std::invalid_argument("Realization: missing drift field");
  if (outputs.empty()) throw std::invalid_argument("Realization: no outputs");
  for (std::size_t j = 0; j < fields.size(); ++j) {
    if (static_cast<int>(fields[j].size()) != n) {
      throw std::invalid_argument("Realization: field g" + std::to_string(j) + " has " +
                                  std::to_string(fields[j].size()) + " components, state has " +
                                  std::to_string(n));
    }
    std::vector<sym::Expr> g;
    for (const sym::Expr& e : fields[j]) {
      check_vars(e, n, "field component");
      g.push_back(sym::simplify(e));
    }
    fields_.push_back(std::move(g));
  }
  for (const sym::Expr& e : outputs) {
    check_vars(e, n, "output");
    outputs_.push_back(sym::simplify(e));
  }
}

Realization Realization::with_initial_state(Eigen::VectorXd z0) const {
  if (z0.size() != z0_.size()) throw std::invalid_argument("with_initial_state: dimension mismatch");
  Realization copy = *this;
  copy.z0_ = std::move(z0);
  return copy;
}

// ---------------------------------------------------------------------------
// Generating series

GeneratingSeriesTable::GeneratingSeriesTable(const Realization& model, int max_degree)
    : alphabet_(model.input_count() + 1),
      max_degree_(max_degree),
      outputs_(static_cast<std::size_t>(model.output_count())) {
  if (max_degree < 0) throw std::invalid_argument("GeneratingSeriesTable: negative degree");
  const WordCodec codec(alphabet_);
  if (max_degree > codec.max_length()) throw std::invalid_argument("GeneratingSeriesTable: degree too large");
  const int n = model.state_dim();
  sym::Differentiator diff;
  std::vector<std::unordered_map<const sym::Node*, sym::Expr>> lie(static_cast<std::size_t>(alphabet_));

  auto lie_derivative = [&](const sym::Expr& phi, int letter) {
    auto& memo = lie[static_cast<std::size_t>(letter)];
    auto it = memo.find(phi.node());
    if (it != memo.end()) return it->second;
    const auto& g = model.fields()[static_cast<std::size_t>(letter)];
    std::vector<sym::Expr> terms;
    for (int l = 0; l < n; ++l) {
      const sym::Expr& gl = g[static_cast<std::size_t>(l)];
      if (gl.is_zero() || (phi.variables() & (std::uint64_t{1} << std::min(l, 63))) == 0) continue;
      const sym::Expr d = diff(phi, l);
      if (!d.is_zero()) terms.push_back(sym::product({gl, d}));
    }
    sym::Expr out = sym::sum(std::move(terms));
    memo.emplace(phi.node(), out);
    return out;
  };

  for (std::size_t i = 0; i < outputs_; ++i) {
    std::vector<std::pair<WordKey, sym::Expr>> level{{WordKey{0}, model.outputs()[i]}};
    for (int len = 0; !level.empty(); ++len) {
      std::vector<std::pair<WordKey, sym::Expr>> next;
      for (const auto& [key, phi] : level) {
        owner_.push_back(i);
        keys_.push_back(key);
        exprs_.push_back(phi);
        if (len == max_degree || phi.is_constant()) continue;
        for (int letter = 0; letter < alphabet_; ++letter) {
          sym::Expr child = lie_derivative(phi, letter);
          if (!child.is_zero()) next.emplace_back(codec.append(key, letter), child);
        }
      }
      level = std::move(next);
    }
  }
  tape_ = sym::CompiledExprs(exprs_);
}

VectorSeries GeneratingSeriesTable::evaluate(std::span<const double> z) const {
  const std::vector<double> values = tape_.evaluate(z);
  std::vector<std::vector<Term>> terms(outputs_);
  for (std::size_t k = 0; k < keys_.size(); ++k) terms[owner_[k]].push_back({keys_[k], values[k]});
  std::vector<Series> comps;
  for (auto& t : terms) comps.push_back(Series::from_keys(alphabet_, max_degree_, std::move(t)));
  return VectorSeries(std::move(comps));
}

sym::Expr GeneratingSeriesTable::coefficient(std::size_t output, const Word& w) const {
  const WordKey key = WordCodec(alphabet_).encode(w);
  for (std::size_t k = 0; k < keys_.size(); ++k) {
    if (owner_[k] == output && keys_[k] == key) return exprs_[k];
  }
  return sym::Expr::constant(0.0);
}

VectorSeries generating_series(const Realization& model, int max_degree) {
  return GeneratingSeriesTable(model, max_degree).evaluate(model.z0());
}

// ---------------------------------------------------------------------------
// Inputs

ControlSignal::ControlSignal(bool sampled, std::vector<std::vector<double>> data, double horizon)
    : sampled_(sampled), data_(std::move(data)), horizon_(horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("ControlSignal: horizon must be positive");
}

ControlSignal ControlSignal::polynomial(std::vector<std::vector<double>> coeffs, double horizon) {
  return ControlSignal(false, std::move(coeffs), horizon);
}

ControlSignal ControlSignal::constant(std::vector<double> values, double horizon) {
  std::vector<std::vector<double>> coeffs;
  for (double v : values) coeffs.push_back({v});
  return polynomial(std::move(coeffs), horizon);
}

ControlSignal ControlSignal::sampled(std::vector<std::vector<double>> samples, double horizon) {
  for (const auto& s : samples) {
    if (s.size() < 2) throw std::invalid_argument("ControlSignal: need at least two samples per input");
    if (s.size() != samples.front().size()) throw std::invalid_argument("ControlSignal: ragged sample grids");
  }
  return ControlSignal(true, std::move(samples), horizon);
}

double ControlSignal::value(int input, double t) const {
  if (input == 0) return 1.0;
  if (input < 0 || input > input_count()) throw std::out_of_range("ControlSignal: no input " + std::to_string(input));
  t = std::clamp(t, 0.0, horizon_);
  const std::vector<double>& d = data_[static_cast<std::size_t>(input - 1)];
  if (!sampled_) {
    double acc = 0.0;
    for (std::size_t k = d.size(); k-- > 0;) acc = acc * t / static_cast<double>(k + 1) + d[k];
    return acc;
  }
  const double pos = t / horizon_ * static_cast<double>(d.size() - 1);
  const std::size_t lo = std::min(static_cast<std::size_t>(pos), d.size() - 2);
  const double frac = pos - static_cast<double>(lo);
  return d[lo] + frac * (d[lo + 1] - d[lo]);
}

// ---------------------------------------------------------------------------
// Operator evaluation

std::vector<double> uniform_grid(double horizon, std::size_t points) {
  if (points < 2) throw std::invalid_argument("uniform_grid: need at least two points");
  std::vector<double> out(points);
  for (std::size_t k = 0; k < points; ++k) {
    out[k] = horizon * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  return out;
}

namespace {

void check_grid(std::span<const double> grid) {
  if (grid.size() < 2) throw std::invalid_argument("fliess_eval: grid needs at least two points");
  if (grid.front() != 0.0) throw std::invalid_argument("fliess_eval: grid must start at 0");
  const double dt = grid[1] - grid[0];
  if (!(dt > 0.0)) throw std::invalid_argument("fliess_eval: grid must be increasing");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (std::abs((grid[k] - grid[k - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(grid.back()))) {
      throw std::invalid_argument("fliess_eval: grid must be uniform");
    }
  }
}

class IteratedIntegrals {
 public:
  IteratedIntegrals(const std::vector<Series>& c, const ControlSignal& u, std::span<const double> grid)
      : c_(c), codec_(c.front().codec()), grid_(grid), out_(c.size(), std::vector<double>(grid.size(), 0.0)) {
    if (u.input_count() + 1 < codec_.alphabet_size()) {
      throw std::invalid_argument("fliess_eval: series needs " + std::to_string(codec_.alphabet_size() - 1) +
                                  " inputs, signal has " + std::to_string(u.input_count()));
    }
    for (int letter = 0; letter < codec_.alphabet_size(); ++letter) {
      std::vector<double> samples(grid.size());
      for (std::size_t k = 0; k < grid.size(); ++k) samples[k] = u.value(letter, grid[k]);
      inputs_.push_back(std::move(samples));
    }
    for (const Series& s : c) {
      for (const Term& t : s.terms()) {
        const int len = WordCodec::length(t.key);
        for (int k = 0; k <= len; ++k) suffixes_.insert(codec_.drop_front(t.key, k));
      }
    }
  }

  std::vector<std::vector<double>> run() {
    visit(WordKey{0}, std::vector<double>(grid_.size(), 1.0));
    return std::move(out_);
  }

 private:
  void visit(WordKey s, const std::vector<double>& e) {
    for (std::size_t i = 0; i < c_.size(); ++i) {
      const double w = c_[i].coeff(s);
      if (w == 0.0) continue;
      for (std::size_t k = 0; k < e.size(); ++k) out_[i][k] += w * e[k];
    }
    for (int letter = 0; letter < codec_.alphabet_size(); ++letter) {
      const WordKey child = codec_.prepend(letter, s);
      if (WordCodec::length(child) > codec_.max_length() || !suffixes_.contains(child)) continue;
      const std::vector<double>& u = inputs_[static_cast<std::size_t>(letter)];
      std::vector<double> next(e.size(), 0.0);
      for (std::size_t k = 1; k < e.size(); ++k) {
        const double h = grid_[k] - grid_[k - 1];
        next[k] = next[k - 1] + 0.5 * h * (u[k - 1] * e[k - 1] + u[k] * e[k]);
      }
      visit(child, next);
    }
  }

  const std::vector<Series>& c_;
  const WordCodec& codec_;
  std::span<const double> grid_;
  std::vector<std::vector<double>> inputs_;
  std::unordered_set<WordKey> suffixes_;
  std::vector<std::vector<double>> out_;
};

}  // namespace

Trajectory fliess_eval(const VectorSeries& c, const ControlSignal& u, std::span<const double> grid) {
  if (c.size() == 0) throw std::invalid_argument("fliess_eval: empty series");
  check_grid(grid);
  const auto y = IteratedIntegrals(c.components(), u, grid).run();
  Trajectory out;
  out.times.assign(grid.begin(), grid.end());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    Eigen::VectorXd row(static_cast<Eigen::Index>(c.size()));
    for (std::size_t i = 0; i < c.size(); ++i) row(static_cast<Eigen::Index>(i)) = y[i][k];
    out.outputs.push_back(std::move(row));
  }
  return out;
}

std::vector<double> fliess_eval(const Series& c, const ControlSignal& u, std::span<const double> grid) {
  check_grid(grid);
  return IteratedIntegrals({c}, u, grid).run().front();
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

Trajectory rk4_simulate(const Realization& model, const ControlSignal& u, double horizon, int steps) {
  if (steps < 1) throw std::invalid_argument("rk4_simulate: steps must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("rk4_simulate: horizon must be positive");
  const int n = model.state_dim();
  const int m = model.input_count();
  if (u.input_count() < m) {
    throw std::invalid_argument("rk4_simulate: model has " + std::to_string(m) + " inputs, signal has " +
                                std::to_string(u.input_count()));
  }
  std::vector<sym::Expr> roots;
  for (const auto& g : model.fields()) roots.insert(roots.end(), g.begin(), g.end());
  const sym::CompiledExprs fields(roots);
  const sym::CompiledExprs outputs(model.outputs());
  std::vector<double> buf(roots.size());

  auto rhs = [&](const Eigen::VectorXd& z, double t) {
    try {
      fields.evaluate(std::span<const double>(z.data(), static_cast<std::size_t>(n)), buf);
    } catch (const SingularityError& e) {
      throw SingularityError("rk4_simulate: singular vector field at t = " + fmt(t) + ": " + e.what());
    }
    Eigen::VectorXd dz = Eigen::VectorXd::Zero(n);
    for (int j = 0; j <= m; ++j) {
      const double uj = u.value(j, t);
      for (int l = 0; l < n; ++l) dz(l) += buf[static_cast<std::size_t>(j * n + l)] * uj;
    }
    return dz;
  };
  auto record = [&](Trajectory& tr, const Eigen::VectorXd& z, double t) {
    if (!z.allFinite()) throw SingularityError("rk4_simulate: non-finite state at t = " + fmt(t));
    tr.times.push_back(t);
    tr.states.push_back(z);
    std::vector<double> y;
    try {
      y = outputs.evaluate(std::span<const double>(z.data(), static_cast<std::size_t>(n)));
    } catch (const SingularityError& e) {
      throw SingularityError("rk4_simulate: singular output at t = " + fmt(t) + ": " + e.what());
    }
    tr.outputs.push_back(Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())));
    Eigen::VectorXd in(m);
    for (int j = 1; j <= m; ++j) in(j - 1) = u.value(j, t);
    tr.inputs.push_back(std::move(in));
  };

  Trajectory tr;
  const double h = horizon / steps;
  Eigen::VectorXd z = model.z0();
  record(tr, z, 0.0);
  for (int s = 0; s < steps; ++s) {
    const double t = s * h;
    const Eigen::VectorXd k1 = rhs(z, t);
    const Eigen::VectorXd k2 = rhs(z + 0.5 * h * k1, t + 0.5 * h);
    const Eigen::VectorXd k3 = rhs(z + 0.5 * h * k2, t + 0.5 * h);
    const Eigen::VectorXd k4 = rhs(z + h * k3, t + h);
    z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    record(tr, z, s + 1 == steps ? horizon : (s + 1) * h);
  }
  return tr;
}

GrowthEstimate estimate_growth(const VectorSeries& c) {
  GrowthEstimate g{0.0, 0.0};
  for (const Series& s : c.components()) g.k = std::max(g.k, std::abs(s.constant_term()));
  const double k = std::max(g.k, 1.0);
  for (const Series& s : c.components()) {
    for (const Term& t : s.terms()) {
      const int len = WordCodec::length(t.key);
      if (len == 0) continue;
      const double bound = std::abs(t.coeff) / (k * std::tgamma(len + 1.0));
      g.m = std::max(g.m, std::pow(bound, 1.0 / len));
    }
  }
  g.k = std::max(g.k, 1.0);
  return g;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t n = traj.states.empty() ? 0 : static_cast<std::size_t>(traj.states.front().size());
  const std::size_t l = traj.outputs.empty() ? 0 : static_cast<std::size_t>(traj.outputs.front().size());
  os << "t";
  for (std::size_t i = 1; i <= n; ++i) os << ",z" << i;
  for (std::size_t i = 1; i <= l; ++i) os << ",y" << i;
  os << '\n';
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.15g", v);
    os << buf;
  };
  for (std::size_t k = 0; k < traj.size(); ++k) {
    put(traj.times[k]);
    for (std::size_t i = 0; i < n; ++i) {
      os << ',';
      put(traj.states[k](static_cast<Eigen::Index>(i)));
    }
    for (std::size_t i = 0; i < l; ++i) {
      os << ',';
      put(traj.outputs[k](static_cast<Eigen::Index>(i)));
    }
    os << '\n';
  }
}

}  // namespace fliess
