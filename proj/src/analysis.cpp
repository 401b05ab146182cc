#include "pgibbs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/gamma.hpp>
#include <json.hpp>

#include "pgibbs/chain.hpp"
#include "pgibbs/errors.hpp"

namespace pgibbs {

namespace {

std::size_t checked_power(std::size_t base, std::size_t exp, std::size_t cap, const char* what) {
  std::size_t dim = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (dim > cap / base) throw SizeError(std::string(what) + " dimension exceeds the cap of " + std::to_string(cap));
    dim *= base;
  }
  return dim;
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

std::string names_of(const Network& net, std::span<const NodeIndex> unknowns) {
  std::string out;
  for (NodeIndex i : unknowns) {
    if (!out.empty()) out += ' ';
    out += net.node(i).name;
  }
  return out;
}

}  // namespace

std::string to_string(StateSpace space) { return space == StateSpace::Original ? "original" : "summary"; }

StateSpace parse_state_space(std::string_view text) {
  if (text == "original") return StateSpace::Original;
  if (text == "summary") return StateSpace::Summary;
  throw ParseError("state space must be 'original' or 'summary'");
}

std::string state_label(StateSpace space, std::size_t digits, std::size_t index) {
  const std::size_t base = space == StateSpace::Original ? 2 : 3;
  std::string out(digits, '0');
  for (std::size_t b = digits; b-- > 0;) {
    const auto d = index % base;
    out[b] = d == 0 ? '0' : d == 1 ? '1' : '?';
    index /= base;
  }
  return out;
}

StateCodec::StateCodec(const Network& net, StateSpace space)
    : space_(space), base_(evidence_configuration(net)) {
  const auto u = net.unknowns();
  unknowns_.assign(u.begin(), u.end());
  const std::size_t base = space == StateSpace::Original ? 2 : 3;
  dim_ = checked_power(base, unknowns_.size(), std::numeric_limits<std::size_t>::max() / 4, "state space");
}

std::string StateCodec::label(std::size_t index) const { return state_label(space_, unknowns_.size(), index); }

std::size_t StateCodec::index_of(const Configuration& x) const {
  const std::size_t base = space_ == StateSpace::Original ? 2 : 3;
  std::size_t index = 0;
  for (NodeIndex i : unknowns_) index = index * base + x[i];
  return index;
}

std::size_t StateCodec::index_of(const SummaryState& s) const {
  if (space_ != StateSpace::Summary) throw ContractError("summary states index only the summary space");
  std::size_t index = 0;
  for (NodeIndex i : unknowns_) index = index * 3 + static_cast<std::size_t>(s[i]);
  return index;
}

Configuration StateCodec::configuration(std::size_t index) const {
  if (space_ != StateSpace::Original) throw ContractError("configuration() needs the original space");
  Configuration x = base_;
  for (std::size_t b = unknowns_.size(); b-- > 0;) {
    x[unknowns_[b]] = static_cast<std::uint8_t>(index & 1U);
    index >>= 1;
  }
  return x;
}

SummaryState StateCodec::summary(std::size_t index) const {
  SummaryState s = from_configuration(base_);
  const std::size_t base = space_ == StateSpace::Original ? 2 : 3;
  for (std::size_t b = unknowns_.size(); b-- > 0;) {
    s[unknowns_[b]] = static_cast<Trit>(index % base);
    index /= base;
  }
  return s;
}

double Spectrum::second_largest_magnitude() const {
  if (eigenvalues.size() < 2) return 0.0;
  std::size_t unit = 0;
  for (std::size_t i = 1; i < eigenvalues.size(); ++i) {
    if (std::abs(eigenvalues[i] - 1.0) < std::abs(eigenvalues[unit] - 1.0)) unit = i;
  }
  double best = 0.0;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    if (i != unit) best = std::max(best, std::abs(eigenvalues[i]));
  }
  return best;
}

std::vector<std::complex<double>> Spectrum::nonzero(double tol) const {
  std::vector<std::complex<double>> out;
  for (const auto& z : eigenvalues) {
    if (std::abs(z) > tol) out.push_back(z);
  }
  return out;
}

Distribution exact_posterior(const Network& net, std::size_t cap) {
  const auto unknowns = net.unknowns();
  if (unknowns.size() > cap) {
    throw SizeError("posterior enumeration over " + std::to_string(unknowns.size()) + " unknowns exceeds the cap of " +
                    std::to_string(cap));
  }
  const StateCodec codec(net, StateSpace::Original);
  Distribution d{StateSpace::Original, {unknowns.begin(), unknowns.end()}, std::vector<double>(codec.dim(), 0.0)};
  double total = 0.0;
  for (std::size_t index = 0; index < codec.dim(); ++index) {
    const Configuration x = codec.configuration(index);
    double joint = 1.0;
    for (NodeIndex i = 0; i < net.size() && joint > 0.0; ++i) {
      const double on = noisy_or_prob_in(net, i, x.values);
      joint *= x[i] ? on : 1.0 - on;
    }
    d.masses[index] = joint;
    total += joint;
  }
  if (!(total > 0.0)) throw ImpossibleEvidenceError("evidence has zero probability under the network");
  for (auto& m : d.masses) m /= total;
  return d;
}

ProbabilityBounds brute_force_bounds(const Network& net, const SummaryState& s, NodeIndex k, std::size_t cap) {
  if (net.is_observed(k)) throw ContractError("cannot update observed node '" + net.node(k).name + "'");
  ProbabilityBounds b{1.0, 0.0};
  for (const auto& x : beta_expand(s, cap)) {
    const double p = gibbs_conditional(net, x, k);
    b.pmin = std::min(b.pmin, p);
    b.pmax = std::max(b.pmax, p);
  }
  return b;
}

TransitionMatrix transition_matrix(const Network& net, StateSpace space, std::size_t dim_cap) {
  const auto unknowns = net.unknowns();
  const std::size_t u = unknowns.size();
  const std::size_t base = space == StateSpace::Original ? 2 : 3;
  const std::size_t dim = checked_power(base, u, dim_cap, "transition matrix");
  const StateCodec codec(net, space);

  // Per (state, variable) update probabilities: P(set to 1) and, for the
  // summary space, P(set to 0). The remainder goes to '?'.
  std::vector<double> to_one(dim * u), to_zero(dim * u);
  for (std::size_t i = 0; i < dim; ++i) {
    if (space == StateSpace::Original) {
      const Configuration x = codec.configuration(i);
      for (std::size_t b = 0; b < u; ++b) {
        const double p = gibbs_conditional(net, x, unknowns[b]);
        to_one[i * u + b] = p;
        to_zero[i * u + b] = 1.0 - p;
      }
    } else {
      const SummaryState s = codec.summary(i);
      for (std::size_t b = 0; b < u; ++b) {
        const auto bounds = summary_conditional_bounds(net, s, unknowns[b]);
        to_one[i * u + b] = bounds.pmin;
        to_zero[i * u + b] = 1.0 - bounds.pmax;
      }
    }
  }

  std::vector<std::size_t> place(u);
  for (std::size_t b = 0, p = 1; b < u; ++b, p *= base) place[u - 1 - b] = p;

  TransitionMatrix m{space, {unknowns.begin(), unknowns.end()}, dim, std::vector<double>(dim * dim, 0.0)};
  std::vector<double> cur(dim), next(dim);
  for (std::size_t row = 0; row < dim; ++row) {
    std::fill(cur.begin(), cur.end(), 0.0);
    cur[row] = 1.0;
    for (std::size_t b = 0; b < u; ++b) {
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t j = 0; j < dim; ++j) {
        const double mass = cur[j];
        if (mass == 0.0) continue;
        const std::size_t digit = (j / place[b]) % base;
        const std::size_t cleared = j - digit * place[b];
        const double one = to_one[j * u + b];
        const double zero = to_zero[j * u + b];
        next[cleared] += mass * zero;
        next[cleared + place[b]] += mass * one;
        if (base == 3) next[cleared + 2 * place[b]] += mass * (1.0 - one - zero);
      }
      std::swap(cur, next);
    }
    std::copy(cur.begin(), cur.end(), m.entries.begin() + static_cast<std::ptrdiff_t>(row * dim));
  }
  return m;
}

Spectrum eigen_spectrum(const TransitionMatrix& m) {
  if (m.dim == 0) throw ContractError("empty transition matrix");
  if (m.dim > kMatrixDimCap) throw SizeError("matrix dimension exceeds the cap of " + std::to_string(kMatrixDimCap));
  const auto n = static_cast<Eigen::Index>(m.dim);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> mat(
      m.entries.data(), n, n);

  Spectrum spec;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(mat, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalue iteration did not converge for a " + std::to_string(m.dim) + "x" +
                         std::to_string(m.dim) + " matrix");
  }
  const auto& ev = solver.eigenvalues();
  spec.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(spec.eigenvalues.begin(), spec.eigenvalues.end(), [](const auto& a, const auto& b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  const double largest = std::abs(spec.eigenvalues.front());
  if (std::abs(largest - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "largest eigenvalue magnitude is " << largest << ", expected 1 for a stochastic matrix";
    throw NumericalError(msg.str());
  }

  // Inverse iteration on the transpose just off the eigenvalue 1.
  const Eigen::MatrixXd shifted =
      mat.transpose() - (1.0 + 1e-10) * Eigen::MatrixXd::Identity(n, n);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(shifted);
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (int iter = 0; iter < 3; ++iter) {
    v = lu.solve(v);
    const double s = v.sum();
    if (!std::isfinite(s) || s == 0.0) throw NumericalError("inverse iteration for the stationary vector failed");
    v /= s;
  }
  spec.stationary.resize(m.dim);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = std::abs(v[i]) < 1e-15 ? 0.0 : v[i];
    spec.stationary[static_cast<std::size_t>(i)] = x;
    total += x;
  }
  for (auto& x : spec.stationary) x /= total;
  return spec;
}

Distribution distribution_at_time(const Distribution& p0, const TransitionMatrix& m, std::size_t t) {
  if (p0.size() != m.dim || p0.space != m.space) {
    throw ContractError("distribution of size " + std::to_string(p0.size()) + " does not fit a " +
                        std::to_string(m.dim) + "-state " + to_string(m.space) + " matrix");
  }
  Distribution p = p0;
  std::vector<double> next(m.dim);
  for (std::size_t step = 0; step < t; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < m.dim; ++i) {
      const double mass = p.masses[i];
      if (mass == 0.0) continue;
      const double* row = m.entries.data() + i * m.dim;
      for (std::size_t j = 0; j < m.dim; ++j) next[j] += mass * row[j];
    }
    p.masses.swap(next);
  }
  return p;
}

double total_variation(const Distribution& p, const Distribution& q) {
  if (p.space != q.space || p.unknowns != q.unknowns || p.size() != q.size()) {
    throw ContractError("total variation needs distributions over the same states");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p.masses[i] - q.masses[i]);
  return 0.5 * sum;
}

Distribution embed_in_summary(const Distribution& p) {
  if (p.space != StateSpace::Original) throw ContractError("embed_in_summary expects an original-space distribution");
  const std::size_t u = p.unknowns.size();
  Distribution out{StateSpace::Summary, p.unknowns, {}};
  std::size_t dim = 1;
  for (std::size_t b = 0; b < u; ++b) dim *= 3;
  out.masses.assign(dim, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::size_t index = 0;
    for (std::size_t b = 0; b < u; ++b) index = index * 3 + ((i >> (u - 1 - b)) & 1U);
    out.masses[index] = p.masses[i];
  }
  return out;
}

double chi_square_upper_tail(double statistic, std::size_t dof) {
  if (dof == 0) return 1.0;
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * statistic);
}

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> counts, std::span<const double> expected) {
  if (counts.size() != expected.size()) throw ContractError("counts and expected masses differ in length");
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw ContractError("chi-square test needs at least one observation");

  ChiSquareResult r;
  std::size_t outcomes = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (expected[i] < 0.0) throw ContractError("negative expected mass");
    if (expected[i] == 0.0) {
      if (counts[i] != 0) {
        throw ImpossibleOutcomeError("outcome " + std::to_string(i) + " has zero expected mass but was observed " +
                                     std::to_string(counts[i]) + " times");
      }
      continue;
    }
    const double e = expected[i] * static_cast<double>(total);
    const double d = static_cast<double>(counts[i]) - e;
    r.statistic += d * d / e;
    ++outcomes;
  }
  r.dof = outcomes > 0 ? outcomes - 1 : 0;
  r.p_value = chi_square_upper_tail(r.statistic, r.dof);
  return r;
}

std::string distribution_json(const Distribution& p, const Network& net) {
  nlohmann::ordered_json j;
  j["space"] = to_string(p.space);
  j["unknowns"] = nlohmann::ordered_json::array();
  for (NodeIndex i : p.unknowns) j["unknowns"].push_back(net.node(i).name);
  j["masses"] = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < p.size(); ++i) j["masses"][state_label(p.space, p.unknowns.size(), i)] = p.masses[i];
  return j.dump(2) + "\n";
}

std::string spectrum_json(const Spectrum& s, const TransitionMatrix& m, const Network& net) {
  nlohmann::ordered_json j;
  j["space"] = to_string(m.space);
  j["dim"] = m.dim;
  j["unknowns"] = nlohmann::ordered_json::array();
  for (NodeIndex i : m.unknowns) j["unknowns"].push_back(net.node(i).name);
  j["second_largest_magnitude"] = s.second_largest_magnitude();
  j["eigenvalues"] = nlohmann::ordered_json::array();
  for (const auto& z : s.eigenvalues) j["eigenvalues"].push_back({z.real(), z.imag()});
  j["stationary"] = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < s.stationary.size(); ++i) {
    j["stationary"][state_label(m.space, m.unknowns.size(), i)] = s.stationary[i];
  }
  return j.dump(2) + "\n";
}

std::string matrix_csv(const TransitionMatrix& m, const Network& net) {
  std::ostringstream out;
  out << "# space=" << to_string(m.space) << " digits="
      << (m.space == StateSpace::Original ? "0,1" : "0,1,?") << " order=" << names_of(net, m.unknowns)
      << " (first most significant)\n";
  out << "state";
  for (std::size_t j = 0; j < m.dim; ++j) out << ',' << state_label(m.space, m.unknowns.size(), j);
  out << '\n';
  for (std::size_t i = 0; i < m.dim; ++i) {
    out << state_label(m.space, m.unknowns.size(), i);
    for (std::size_t j = 0; j < m.dim; ++j) out << ',' << format_double(m.at(i, j));
    out << '\n';
  }
  return out.str();
}

}  // namespace pgibbs
