/// The simulated pipeline: letter-wise adder across senders, a memoryless
/// noisy channel, and a uniform random permutation of the block, plus the
/// exact output-marginal computation used as a test oracle.

#pragma once

#include <vector>

#include "pamac/model.hpp"
#include "pamac/rng.hpp"

namespace pamac {

/// Every intermediate of one transmission, retained when recording is on.
struct TransmissionRecord {
  std::vector<Codeword> x;  ///< d×n sender symbols
  Codeword w;               ///< adder output
  Codeword z;               ///< noisy-channel output
  Codeword y;               ///< permuted output
  std::vector<int> sigma;   ///< sampled permutation: y[j] = z[sigma[j]]
};

/// Letter-wise column sums across the d senders.  Every symbol must lie in
/// [0, p−1]; the output alphabet is [0, d(p−1)].
/// Throws std::invalid_argument on ragged input or out-of-range symbols.
Codeword adder(const std::vector<Codeword>& x, int p);

/// Passes each letter independently through the channel kernel: z_j is drawn
/// from row w_j of spec.P by inverse-CDF sampling over precomputed row sums.
Codeword apply_dmc(const Codeword& w, const ChannelSpec& spec, Rng& rng);

/// Uniformly random permutation of {0, …, n−1} (Fisher-Yates).
std::vector<int> random_permutation(int n, Rng& rng);

/// Applies a uniformly sampled permutation: the multiset of symbols is
/// preserved exactly.  `sigma_out`, when non-null, receives the permutation.
Codeword permute(const Codeword& z, Rng& rng, std::vector<int>* sigma_out = nullptr);

/// Full pipeline: permute ∘ channel ∘ adder.  The channel and the permutation
/// consume independent streams so either stage can be replayed in isolation.
/// With skip_permutation the last stage is the identity (every implemented
/// decoder depends on y only through its empirical distribution, so this is a
/// pure speed knob; it defaults off for pipeline fidelity).  When `record` is
/// non-null all intermediates are stored there.
Codeword transmit(const std::vector<Codeword>& x, const ChannelSpec& spec, Rng& dmc_rng,
                  Rng& perm_rng, bool skip_permutation = false,
                  TransmissionRecord* record = nullptr);

/// Empirical distribution [p̂]_t = #{j : y_j = t}/n over {0,…,alphabet_size−1}.
/// Throws std::invalid_argument on an empty codeword or out-of-range symbols.
Distribution empirical_distribution(const Codeword& y, int alphabet_size);

/// Exact per-letter output marginal of the permuted block: the weighted
/// mixture Σ_i weights_i · components_i.  Weights must sum to 1 (1e−12) and
/// all components must share one alphabet.
Distribution marginal_y_exact(const std::vector<Distribution>& components,
                              const std::vector<double>& weights);

}  // namespace pamac
