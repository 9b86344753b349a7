#include "symham/xxchain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace symham {
namespace xxchain {

namespace {
constexpr double kPi = std::numbers::pi;

void check(const HoppingChain& c) {
  if (c.length < 2) throw std::invalid_argument("HoppingChain: length must be >= 2");
}

// v_m(j) = sqrt(2/(L+1)) sin(pi m j / (L+1)), eigenvalue 2 J cos(pi m/(L+1))
double mode(int L, int m, int j) {
  return std::sqrt(2.0 / (L + 1)) * std::sin(kPi * m * j / (L + 1));
}
}  // namespace

SparseOperator hopping_operator(const HoppingChain& chain) {
  check(chain);
  std::vector<Triplet> t;
  for (Index i = 0; i + 1 < chain.length; ++i) {
    t.push_back({i, i + 1, chain.coupling});
    t.push_back({i + 1, i, chain.coupling});
  }
  return SparseOperator::from_triplets(chain.length, std::move(t), Symmetry::Hermitian);
}

std::vector<double> analytic_spectrum(const HoppingChain& chain) {
  check(chain);
  const int L = chain.length;
  std::vector<double> eigs(static_cast<size_t>(L));
  for (int m = 1; m <= L; ++m)
    eigs[static_cast<size_t>(m) - 1] = 2.0 * chain.coupling * std::cos(kPi * m / (L + 1));
  std::sort(eigs.begin(), eigs.end());
  return eigs;
}

Complex transfer_amplitude(const HoppingChain& chain, int from, int to, double t) {
  check(chain);
  const int L = chain.length;
  if (from < 1 || from > L || to < 1 || to > L)
    throw std::out_of_range("transfer_amplitude: site out of range");
  if (t == 0.0) return Complex(from == to ? 1.0 : 0.0, 0.0);
  Complex amp(0.0, 0.0);
  for (int m = 1; m <= L; ++m) {
    const double lambda = 2.0 * chain.coupling * std::cos(kPi * m / (L + 1));
    amp += mode(L, m, to) * mode(L, m, from) * std::exp(Complex(0.0, -lambda * t));
  }
  return amp;
}

double arrival_probability(const HoppingChain& chain, double t) {
  return std::norm(transfer_amplitude(chain, 1, chain.length, t));
}

ArrivalMax max_arrival(const HoppingChain& chain, double t_window) {
  check(chain);
  if (t_window <= 0) throw std::invalid_argument("max_arrival: t_window must be positive");
  const double step = std::min(0.05, t_window / 8.0);
  const long n = static_cast<long>(std::ceil(t_window / step));
  double best_t = 0.0, best_p = 0.0;
  for (long i = 0; i <= n; ++i) {
    const double t = std::min(t_window, i * step);
    const double p = arrival_probability(chain, t);
    if (p > best_p) {
      best_p = p;
      best_t = t;
    }
  }
  // golden-section refinement around the best grid point
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::max(0.0, best_t - step), b = std::min(t_window, best_t + step);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = arrival_probability(chain, c), fd = arrival_probability(chain, d);
  while (b - a > 1e-4) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = arrival_probability(chain, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = arrival_probability(chain, d);
    }
  }
  const double tm = 0.5 * (a + b);
  const double pm = arrival_probability(chain, tm);
  if (pm > best_p) {
    best_p = pm;
    best_t = tm;
  }
  return {best_t, best_p};
}

double loglog_slope(const std::vector<double>& l_values, const std::vector<double>& p_values) {
  if (l_values.size() != p_values.size() || l_values.size() < 2)
    throw std::invalid_argument("loglog_slope: need matching lists of >= 2 points");
  const size_t n = l_values.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double x = std::log(l_values[i]);
    const double y = std::log(p_values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) throw std::invalid_argument("loglog_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

double fit_arrival_exponent(const std::vector<int>& l_values) {
  if (l_values.size() < 5) throw std::invalid_argument("fit_arrival_exponent: need >= 5 lengths");
  const auto [mn, mx] = std::minmax_element(l_values.begin(), l_values.end());
  if (*mx < 8 * *mn) throw std::invalid_argument("fit_arrival_exponent: lengths must span a factor 8");
  std::vector<double> ls, ps;
  for (int L : l_values) {
    const HoppingChain c{L, 1.0};
    ls.push_back(L);
    ps.push_back(max_arrival(c, 2.0 * L).p);
  }
  return loglog_slope(ls, ps);
}

TransferTrace heralded_transfer(const HoppingChain& chain, double epsilon, double measure_period,
                                int start, int target, long max_rounds, double period_jitter) {
  check(chain);
  if (epsilon <= 0.0 || epsilon >= 1.0)
    throw std::invalid_argument("heralded_transfer: epsilon must be in (0,1)");
  if (measure_period <= 0.0)
    throw std::invalid_argument("heralded_transfer: measure_period must be positive");
  if (period_jitter < 0.0)
    throw std::invalid_argument("heralded_transfer: period_jitter must be >= 0");
  const int L = chain.length;
  if (target == 0) target = L;
  if (start < 1 || start > L || target < 1 || target > L || start == target)
    throw std::invalid_argument("heralded_transfer: bad start/target");

  // exact single-excitation propagation in the sine eigenbasis
  Eigen::MatrixXd modes(L, L);
  Eigen::VectorXd lambdas(L);
  for (int m = 1; m <= L; ++m) {
    for (int j = 1; j <= L; ++j) modes(j - 1, m - 1) = mode(L, m, j);
    lambdas(m - 1) = 2.0 * chain.coupling * std::cos(kPi * m / (L + 1));
  }

  ComplexVector psi = ComplexVector::Zero(L);
  psi[start - 1] = 1.0;

  TransferTrace trace;
  double cumulative = 0.0;
  double clock = 0.0;
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (long round = 1; round <= max_rounds; ++round) {
    const double tau =
        measure_period * (1.0 + period_jitter * std::fmod(round * golden, 1.0));
    clock += tau;
    ComplexVector coeffs = modes.transpose().cast<Complex>() * psi;
    for (int m = 0; m < L; ++m) coeffs[m] *= std::exp(Complex(0.0, -lambdas(m) * tau));
    psi = modes.cast<Complex>() * coeffs;

    const double p = std::norm(psi[target - 1]);
    cumulative += (1.0 - cumulative) * p;
    trace.times.push_back(clock);
    trace.arrival_probability.push_back(p);
    trace.cumulative_success.push_back(cumulative);
    trace.rounds = static_cast<int>(round);
    trace.total_time = clock;
    if (cumulative >= 1.0 - epsilon) {
      trace.succeeded = true;
      return trace;
    }
    // failed herald: project the excitation out of the target and renormalize
    psi[target - 1] = 0.0;
    const double nrm = psi.norm();
    if (nrm < 1e-300) throw std::runtime_error("heralded_transfer: state annihilated by projection");
    psi /= nrm;
  }
  trace.succeeded = false;
  return trace;
}

double default_measure_period(const HoppingChain& chain) {
  return max_arrival(chain, 2.0 * chain.length).t;
}

}  // namespace xxchain
}  // namespace symham
