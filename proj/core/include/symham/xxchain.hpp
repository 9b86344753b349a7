#pragma once

#include "symham/sparse_operator.hpp"

namespace symham {
namespace xxchain {

// Uniform nearest-neighbor hopping chain in the one-excitation sector.
// Site indices are 1-based.
struct HoppingChain {
  int length = 2;
  double coupling = 1.0;
};

struct TransferTrace {
  std::vector<double> times;                // measurement instants
  std::vector<double> arrival_probability;  // p at the target just before each measurement
  std::vector<double> cumulative_success;   // non-decreasing herald success probability
  int rounds = 0;
  double total_time = 0.0;
  bool succeeded = false;
};

SparseOperator hopping_operator(const HoppingChain& chain);

// {2 cos(pi m / (L+1)) : m = 1..L}, ascending.
std::vector<double> analytic_spectrum(const HoppingChain& chain);

// <to| e^{-iHt} |from>, computed in the analytic sine eigenbasis.
Complex transfer_amplitude(const HoppingChain& chain, int from, int to, double t);

// |<L| e^{-iHt} |1>|^2
double arrival_probability(const HoppingChain& chain, double t);

// Grid search (step <= 0.05) plus golden-section refinement (dt <= 1e-4)
// of arrival_probability over [0, t_window].
struct ArrivalMax {
  double t = 0.0;
  double p = 0.0;
};
ArrivalMax max_arrival(const HoppingChain& chain, double t_window);

// Least-squares slope of log(p) against log(L); the generic fit helper is
// exposed for synthetic-data tests.
double loglog_slope(const std::vector<double>& l_values, const std::vector<double>& p_values);

// Slope of log max-arrival probability vs log L, window t <= 2L per L.
// Requires >= 5 lengths spanning at least a factor 8.
double fit_arrival_exponent(const std::vector<int>& l_values);

// Repeated projective measurement of `target` every measure_period, starting
// from `start`; failure projects the excitation out of the target site and
// renormalizes.  Stops once cumulative success reaches 1 - epsilon.
//
// A fixed period can resonate with the chain spectrum and leave slowly
// decaying dark modes; period_jitter > 0 detunes round k by the factor
// (1 + jitter * frac(k*phi)) with the golden ratio phi, which is
// deterministic and breaks every such resonance.
TransferTrace heralded_transfer(const HoppingChain& chain, double epsilon, double measure_period,
                                int start = 1, int target = 0 /* 0 = chain end */,
                                long max_rounds = 1000000, double period_jitter = 0.0);

// Measurement period used when none is given: the time of the first arrival
// peak.  Half the fundamental period (L+1)/2 looks natural but sits on a
// stroboscopic trap already at L = 16.
double default_measure_period(const HoppingChain& chain);

}  // namespace xxchain
}  // namespace symham
