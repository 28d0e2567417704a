// Seeded Monte Carlo estimators for the model's scalar quantities and the
// experiment procedures built on them.
//
// Every estimator derives one independent seed per replication from
// (master seed, estimator tag, replication index) and aggregates per-rep
// results by index, so output is bit-identical regardless of the number of
// worker threads. Root clusters are explored lazily (cell lists for bounded
// support, dense candidate scans otherwise) against the same keyed pair
// uniforms the graph builder uses.
#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "rcm/connection.hpp"
#include "rcm/geometry.hpp"
#include "rcm/sampler.hpp"
#include "rcm/stats.hpp"

namespace rcm::est {

// psi_n(lambda) = P[|C_0| >= n] for each requested n, from `reps` rooted
// samples in a window of side L centered at the origin. Exploration is
// capped at max(n_values).
std::map<int, Estimate> estimate_psi(const ConnectionFunction& g, double lambda,
                                     const std::vector<int>& n_values,
                                     double window_side, std::uint64_t reps,
                                     std::uint64_t seed, unsigned threads = 1);

// m_h(lambda) = P[the root cluster contains a green vertex].
Estimate estimate_mh(const ConnectionFunction& g, double lambda, double h,
                     double window_side, std::uint64_t reps, std::uint64_t seed,
                     unsigned threads = 1);

// Same event in the box-supremum graph over an s-lattice on the window of
// side K, drawn against tensor-keyed uniforms.
Estimate estimate_mhat(const ConnectionFunction& g, double lambda, double h, double K,
                       double s, std::uint64_t reps, std::uint64_t seed,
                       unsigned threads = 1);

// P[the coupled graphs G_g and G_{g-hat_s} differ] per lattice pitch s.
std::map<double, Estimate> estimate_coupling_disagreement(
    const ConnectionFunction& g, double lambda, double K,
    const std::vector<double>& s_values, std::uint64_t reps, std::uint64_t seed,
    unsigned threads = 1);

// P[|C_0^R| = k and C_0 != C_0^R] under the shared-uniform cutoff coupling,
// per (R, k). The same replication serves every R (common random numbers).
std::map<std::pair<double, int>, Estimate> estimate_cutoff_discrepancy(
    const ConnectionFunction& g, double lambda, const std::vector<double>& r_values,
    const std::vector<int>& k_values, double window_side, std::uint64_t reps,
    std::uint64_t seed, unsigned threads = 1);

// Root-cluster size histogram with sizes censored at `cap` (counts indexed
// 1..cap). n_factor == 1 samples the model directly; n_factor > 1 runs the
// thinning construction at intensity n_factor * lambda with keep probability
// 1/n_factor.
std::vector<std::uint64_t> cluster_size_histogram(const ConnectionFunction& g,
                                                  double lambda, int n_factor,
                                                  double window_side, std::uint32_t cap,
                                                  std::uint64_t reps, std::uint64_t seed,
                                                  unsigned threads = 1);

struct Theorem2Row {
    int n = 0;
    double lhs = 0.0;      // psi_n(lambda')
    double lhs_se = 0.0;
    double rhs = 0.0;      // psi_n(lambda) e^{-hn} / (1 - m_h)
    double rhs_se = 0.0;
    double margin_sigma = 0.0;  // (rhs - lhs) / combined se; >= -3 passes
};
struct Theorem2Report {
    Estimate m_h;
    double lambda_prime = 0.0;
    bool inconclusive = false;  // m_h interval touches 1
    bool holds = false;
    std::vector<Theorem2Row> rows;
};
// Estimates m_h, sets lambda' = lambda (1 - m_h), and checks
// psi_n(lambda') <= psi_n(lambda) e^{-hn} / (1 - m_h) for n = 1..n_max on
// independent seed streams.
Theorem2Report verify_theorem2(const ConnectionFunction& g, double lambda, double h,
                               int n_max, double window_side, std::uint64_t reps,
                               std::uint64_t seed, unsigned threads = 1);

struct TransitivityRow {
    int n_factor = 0;
    double median_max = 0.0;
    double q1_max = 0.0;
    double q3_max = 0.0;
    double mean_max = 0.0;
    std::vector<double> max_stats;  // one per outer rep
};
struct TransitivityReport {
    Estimate m_h_reference;
    std::vector<TransitivityRow> rows;
};
// Per outer rep: sample eta at intensity N*lambda in a window of side K;
// for up to subsample_max vertices x, estimate over inner_reps draws of
// (sites at 1/N, ghost at h) the probability that x connects to a green
// vertex through open vertices; record the max over the subsample.
TransitivityReport transitivity_experiment(const ConnectionFunction& g, double lambda,
                                           double h, double K,
                                           const std::vector<int>& n_factors,
                                           std::uint64_t outer_reps,
                                           std::uint64_t inner_reps, std::uint64_t seed,
                                           unsigned threads = 1,
                                           std::uint32_t subsample_max = 200,
                                           std::uint64_t reference_reps = 200000);

struct REventRow {
    int n_factor = 0;
    Estimate frequency;
    double bound = 0.0;  // may be <= 0 (vacuous)
};
// Frequency of the event that every lattice box count stays strictly inside
// (1 +- alpha) lambda s^d N, against the evaluated lower bound.
std::vector<REventRow> r_event_frequency(double lambda, double K, double s,
                                         double alpha, const std::vector<int>& n_factors,
                                         std::uint64_t reps, std::uint64_t seed, int dim,
                                         unsigned threads = 1);

struct MeckeReport {
    double empirical_mean = 0.0;
    double empirical_se = 0.0;
    double reference = 0.0;  // (lambda^2 / 2) double integral of g over the window
    double z = 0.0;
    std::uint64_t reps = 0;
};
// Mean edge count of G_g(eta) against the quadrature reference.
MeckeReport mecke_edge_check(const ConnectionFunction& g, double lambda,
                             double window_side, std::uint64_t reps, std::uint64_t seed,
                             unsigned threads = 1);

// Quadrature reference used by mecke_edge_check, exposed for tests:
// int_{W} int_{W} g(x - y) dx dy for the origin-centered cube of side L.
double window_pair_integral(const ConnectionFunction& g, double window_side,
                            double rel_tol = 1e-7);

}  // namespace rcm::est
