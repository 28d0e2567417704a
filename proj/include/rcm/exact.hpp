// Brute-force enumeration oracles for small instances: exact connectedness
// probabilities, exact cluster laws, Le Cam total variation, up-set
// enumeration and stochastic domination, and the pivotality lemma made
// literal at desk scale.
#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rcm/connection.hpp"
#include "rcm/sampler.hpp"

namespace rcm::exact {

// A probability measure on {0,1}^m, indexed by bitmask (bit i = site i).
struct FiniteMeasure {
    int m = 0;
    std::vector<double> prob;  // size 2^m

    static FiniteMeasure product_bernoulli(int m, double p);
    static FiniteMeasure point_mass(int m, std::uint32_t state);

    // Total mass of a set of states given as a bitmask over state indices.
    double mass(std::uint32_t state_set) const;
    void validate() const;  // entries >= 0, sum 1 within 1e-12
};

// Convenience constructor for small explicit graphs.
RcmGraph make_graph(std::uint32_t n,
                    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                    std::optional<std::uint32_t> root = std::nullopt);

// Probability that the RCM on exactly these k points (2 <= k <= 6) is
// connected: sum over all edge subsets that connect the points.
double g2_exact(const std::vector<std::vector<double>>& points,
                const ConnectionFunction& g);

// Exact joint law of (|C_0|, C_0 disjoint from the ghost field) and the
// conditional law of the site configuration given ghost-freeness, by full
// enumeration over edge, site and ghost indicators. At most 5 points.
struct ClusterLaw {
    std::vector<double> p_size_ghostfree;  // P(|C0| = k, C0 cap G = empty), k = 1..n
    std::vector<double> p_size_ghosthit;
    std::vector<double> size_pmf;          // P(|C0| = k)
    double p_ghostfree = 0.0;
    FiniteMeasure omega_given_ghostfree;   // sites in ascending non-root id order
};
ClusterLaw cluster_law_exact(const std::vector<std::vector<double>>& points,
                             std::size_t root_index, const ConnectionFunction& g,
                             double p, double h);

// Exact total variation distance between Binomial(n,p) and Poisson(np).
double tv_binomial_poisson(int n, double p);

// Product Poisson pmf: prod_z e^{-mu} mu^{N(z)} / N(z)!.
double poisson_product_pmf(double mu, const std::vector<long long>& counts);

// A discrete graph pattern on lattice boxes, z0 first, with the
// box-supremum value attached to every vertex pair.
struct DiscreteGraphPattern {
    std::vector<std::uint64_t> vertices;                      // z0 first
    std::vector<std::pair<int, int>> edges;                   // index pairs
    std::vector<std::vector<double>> ghat;                    // symmetric m x m
};
// prod over edges of ghat * prod over non-edges of (1 - ghat).
double ghat_pattern_prob(const DiscreteGraphPattern& f);

// All up-closed subsets of {0,1}^m, m <= 4, each as a bitmask over the 2^m
// states.
std::vector<std::uint32_t> enumerate_upsets(int m);

struct DominationResult {
    bool dominates = false;
    std::optional<std::uint32_t> witness_upset;  // a violating up-set on failure
    double worst_gap = 0.0;                      // max over up-sets of mu(U) - nu(U)
};
// nu dominates mu iff mu(U) <= nu(U) + 1e-10 for every up-set U.
DominationResult stochastic_dominates(const FiniteMeasure& mu, const FiniteMeasure& nu);

// Exact conditional pivotality probabilities for the event
// A = {root cluster contains no green vertex} under the cluster-first
// exploration in ascending id order. Conditioning is on reachable prefixes
// with positive probability of A.
struct PivotalPrefix {
    std::vector<std::uint32_t> prefix_vertices;
    std::vector<std::uint8_t> prefix_states;
    std::uint32_t next_vertex = 0;
    double pivotal_prob = 0.0;  // P[next pivotal | A, Expl_k]
};
struct PivotalEpsilon {
    double epsilon = 0.0;
    std::vector<PivotalPrefix> table;
};
PivotalEpsilon max_pivotal_epsilon(const RcmGraph& graph, std::uint32_t root, double p,
                                   double h);

// Checks the pivotality lemma statement on one graph: with eps from
// max_pivotal_epsilon, the product measure at p(1-eps) must be
// stochastically dominated by the conditional site law given A.
struct LemmaPivotalReport {
    double epsilon = 0.0;
    double p_event = 0.0;  // P(A)
    bool vacuous = false;  // P(A) == 0, nothing to check
    bool dominates = false;
    std::optional<std::uint32_t> witness_upset;
};
LemmaPivotalReport verify_lemma_pivotal(const RcmGraph& graph, std::uint32_t root,
                                        double p, double h);

// Connected rooted graphs (root id 0) with at most max_nonroot non-root
// vertices, one representative per isomorphism class fixing the root.
std::vector<RcmGraph> enumerate_rooted_graphs(int max_nonroot);

// Rate-function inequalities used by the box-count large deviations bound:
// (1+a)log(1+a) - a >= a^2/4 and a + (1-a)log(1-a) >= a^2/12.
bool cramer_rate_check(const std::vector<double>& alphas);

// Lower bound 1 - 2 (K/s)^d exp(-lambda s^d alpha^2 N / 24); may be <= 0.
double ldp_bound_eval(double lambda, double s, double alpha, double window_side,
                      double n_factor, int dim);

}  // namespace rcm::exact
