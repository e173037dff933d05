#pragma once

#include <span>

#include "san/demand.hpp"

namespace san {

/// Empirical entropies of a demand, in bits (all logs base 2).
struct EntropyReport {
  double entropy_bits = 0;         // joint entropy over (src, dst) pairs
  double source_entropy_bits = 0;  // marginal over sources
  double dest_entropy_bits = 0;    // marginal over destinations
  double conditional_yx_bits = 0;  // H(dst | src)
  double conditional_xy_bits = 0;  // H(src | dst)
};

/// Shannon entropy of a frequency vector, in bits. Entries must be
/// nonnegative with a positive total; zero entries contribute 0.
/// Throws std::invalid_argument on empty or all-zero input.
double empirical_entropy(std::span<const double> counts);

/// Joint, marginal and conditional entropies of the aggregated demand.
EntropyReport sequence_entropies(const DemandSequence& seq);

/// Same, computed directly from a demand graph.
EntropyReport graph_entropies(const DemandGraph& g);

/// H(dst | src) = sum over sources u of p(u) * H(destination distribution
/// of u), where p(u) is u's share of the total demand weight.
double conditional_entropy(const DemandGraph& g);

}  // namespace san
