/// Domain types shared by every other module: the channel description, rate
/// tuples, distributions, and codewords, plus their validation rules.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pamac/linalg.hpp"

namespace pamac {

/// The memoryless channel acting on adder outputs: a q×q row-stochastic,
/// entry-wise strictly positive, invertible kernel, with q = d(p−1)+1.
struct ChannelSpec {
  int d = 0;      ///< sender count (≥ 2)
  int p = 0;      ///< per-sender alphabet size (≥ 2)
  int q = 0;      ///< channel alphabet size, d(p−1)+1
  DenseMatrix P;  ///< q×q transition kernel, row w → distribution of z

  /// Mixing noise level when the spec was built by default_channel;
  /// negative when an explicit matrix was supplied.
  double epsilon = -1.0;
};

/// Result of validate_channel: empty `violations` means the spec is usable.
struct ChannelValidation {
  bool ok = false;
  std::vector<std::string> violations;
  double sigma_min = 0.0;  ///< smallest singular value of P (0 when shape is wrong)
};

/// Checks dimensions, row-stochasticity (1e−12), strict positivity, and
/// invertibility (σ_min > 1e−10).  Shape problems are reported as violations,
/// never thrown.
ChannelValidation validate_channel(const ChannelSpec& spec);

/// The q-state mixing channel P = (1−ε)·I + (ε/q)·J.  Strictly positive,
/// row-stochastic, and invertible for every ε ∈ (0,1); σ_min = 1−ε.
/// Throws std::invalid_argument when d < 2, p < 2, or ε ∉ (0,1).
ChannelSpec default_channel(int d, int p, double epsilon);

/// Per-sender rates, measured as exponents of the blocklength: R_i =
/// log|M_i| / log n.
struct RateTuple {
  std::vector<double> R;

  double sum() const;
};

enum class RegionPosition { inside, boundary, outside };

/// Classifies ΣR_i against the sum-rate threshold d(p−1)/2 with tolerance
/// 1e−12.  Strictly less → inside; within tolerance → boundary; greater →
/// outside.
RegionPosition rate_region_check(const RateTuple& rates, int d, int p);

std::string to_string(RegionPosition pos);

/// How a Distribution's entries should be interpreted.
enum class DistributionKind {
  exact,      ///< true PMF; sums to 1, entries ≥ 0
  empirical,  ///< frequency counts / n; sums to 1, entries ≥ 0
  pseudo      ///< result of inverting a channel; sums to 1 but may go negative
};

/// A PMF (or pseudo-PMF) over the zero-indexed alphabet {0, …, w.size()−1}.
/// The pseudo kind exists because the root decoder computes p̂_Z·P⁻¹, which
/// can leave the simplex; typing it prevents accidental re-normalization.
struct Distribution {
  std::vector<double> w;
  DistributionKind kind = DistributionKind::exact;

  double sum() const;
  /// True when the kind's invariant holds (simplex membership for
  /// exact/empirical within 1e−12; sum-to-one only for pseudo within 1e−6).
  bool valid() const;
};

/// A length-n word over a zero-indexed alphabet; symbol bounds are enforced
/// by the operations that produce and consume them.
using Codeword = std::vector<int>;

/// Serialization of a ChannelSpec: `d`, `p`, and exactly one of `epsilon`
/// (mixing channel) or `matrix` (explicit q×q rows).
nlohmann::json channel_to_json(const ChannelSpec& spec);
ChannelSpec channel_from_json(const nlohmann::json& j);

}  // namespace pamac
