#include "pamac/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace pamac {

Codeword adder(const std::vector<Codeword>& x, int p) {
  if (x.empty()) throw std::invalid_argument("adder: no senders");
  const std::size_t n = x.front().size();
  Codeword w(n, 0);
  for (const Codeword& row : x) {
    if (row.size() != n) throw std::invalid_argument("adder: ragged sender matrix");
    for (std::size_t j = 0; j < n; ++j) {
      const int s = row[j];
      if (s < 0 || s > p - 1) throw std::invalid_argument("adder: symbol out of [0, p-1]");
      w[j] += s;
    }
  }
  return w;
}

Codeword apply_dmc(const Codeword& w, const ChannelSpec& spec, Rng& rng) {
  const int q = spec.q;
  // Precompute one cumulative row per input letter value.
  std::vector<std::vector<double>> cdf(static_cast<std::size_t>(q));
  for (int r = 0; r < q; ++r) {
    auto& row = cdf[static_cast<std::size_t>(r)];
    row.resize(static_cast<std::size_t>(q));
    double acc = 0.0;
    for (int c = 0; c < q; ++c) {
      acc += spec.P.at(r, c);
      row[static_cast<std::size_t>(c)] = acc;
    }
  }
  Codeword z(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    const int s = w[j];
    if (s < 0 || s >= q) throw std::invalid_argument("apply_dmc: letter out of [0, q-1]");
    z[j] = rng.categorical_from_cdf(cdf[static_cast<std::size_t>(s)]);
  }
  return z;
}

std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> sigma(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) sigma[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(sigma[static_cast<std::size_t>(i)], sigma[static_cast<std::size_t>(j)]);
  }
  return sigma;
}

Codeword permute(const Codeword& z, Rng& rng, std::vector<int>* sigma_out) {
  const int n = static_cast<int>(z.size());
  std::vector<int> sigma = random_permutation(n, rng);
  Codeword y(z.size());
  for (int j = 0; j < n; ++j) {
    y[static_cast<std::size_t>(j)] = z[static_cast<std::size_t>(sigma[static_cast<std::size_t>(j)])];
  }
  if (sigma_out != nullptr) *sigma_out = std::move(sigma);
  return y;
}

Codeword transmit(const std::vector<Codeword>& x, const ChannelSpec& spec, Rng& dmc_rng,
                  Rng& perm_rng, bool skip_permutation, TransmissionRecord* record) {
  Codeword w = adder(x, spec.p);
  Codeword z = apply_dmc(w, spec, dmc_rng);
  Codeword y;
  std::vector<int> sigma;
  if (skip_permutation) {
    y = z;
  } else {
    y = permute(z, perm_rng, record != nullptr ? &sigma : nullptr);
  }
  if (record != nullptr) {
    record->x = x;
    record->w = std::move(w);
    record->z = std::move(z);
    record->y = y;
    record->sigma = std::move(sigma);
  }
  return y;
}

Distribution empirical_distribution(const Codeword& y, int alphabet_size) {
  if (y.empty()) throw std::invalid_argument("empirical_distribution: empty codeword");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(alphabet_size), 0);
  for (int s : y) {
    if (s < 0 || s >= alphabet_size) {
      throw std::invalid_argument("empirical_distribution: symbol outside alphabet");
    }
    ++counts[static_cast<std::size_t>(s)];
  }
  Distribution out;
  out.kind = DistributionKind::empirical;
  out.w.resize(static_cast<std::size_t>(alphabet_size));
  // Divide per entry: IEEE division is correctly rounded, so count/n lands on
  // the representable value nearest the true frequency (reciprocal-multiply
  // does not, e.g. 3 * (1.0/5.0) != 3.0/5.0).
  const double n_samples = static_cast<double>(y.size());
  for (int t = 0; t < alphabet_size; ++t) {
    out.w[static_cast<std::size_t>(t)] = static_cast<double>(counts[static_cast<std::size_t>(t)]) / n_samples;
  }
  return out;
}

Distribution marginal_y_exact(const std::vector<Distribution>& components,
                              const std::vector<double>& weights) {
  if (components.size() != weights.size()) {
    throw std::invalid_argument("marginal_y_exact: component/weight count mismatch");
  }
  if (components.empty()) throw std::invalid_argument("marginal_y_exact: no components");
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  if (std::abs(wsum - 1.0) > 1e-12) {
    throw std::invalid_argument("marginal_y_exact: weights must sum to 1");
  }
  const std::size_t alphabet = components.front().w.size();
  Distribution out;
  out.kind = DistributionKind::exact;
  out.w.assign(alphabet, 0.0);
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].w.size() != alphabet) {
      throw std::invalid_argument("marginal_y_exact: components on different alphabets");
    }
    for (std::size_t t = 0; t < alphabet; ++t) out.w[t] += weights[i] * components[i].w[t];
  }
  return out;
}

}  // namespace pamac
