#include "pamac/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pamac {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kSigmaMinThreshold = 1e-10;
constexpr double kRegionTol = 1e-12;

}  // namespace

ChannelValidation validate_channel(const ChannelSpec& spec) {
  ChannelValidation report;
  const int q = spec.d * (spec.p - 1) + 1;
  if (spec.d < 2 || spec.p < 2) {
    report.violations.push_back("parameters: require d >= 2 and p >= 2");
  }
  if (spec.q != q) {
    std::ostringstream os;
    os << "alphabet: q = " << spec.q << " but d(p-1)+1 = " << q;
    report.violations.push_back(os.str());
  }
  if (spec.P.rows != q || spec.P.cols != q) {
    std::ostringstream os;
    os << "shape: P is " << spec.P.rows << "x" << spec.P.cols << ", expected " << q << "x" << q;
    report.violations.push_back(os.str());
    return report;  // further checks are meaningless on the wrong shape
  }
  for (int r = 0; r < q; ++r) {
    double s = 0.0;
    for (int c = 0; c < q; ++c) s += spec.P.at(r, c);
    if (std::abs(s - 1.0) > kRowSumTol) {
      std::ostringstream os;
      os << "row-stochasticity: row " << r << " sums to " << s;
      report.violations.push_back(os.str());
    }
  }
  for (int r = 0; r < q; ++r) {
    for (int c = 0; c < q; ++c) {
      if (!(spec.P.at(r, c) > 0.0)) {
        std::ostringstream os;
        os << "positivity: entry (" << r << "," << c << ") = " << spec.P.at(r, c);
        report.violations.push_back(os.str());
      }
    }
  }
  report.sigma_min = min_singular_value(spec.P);
  if (!(report.sigma_min > kSigmaMinThreshold)) {
    std::ostringstream os;
    os << "invertibility: sigma_min = " << report.sigma_min << " <= 1e-10";
    report.violations.push_back(os.str());
  }
  report.ok = report.violations.empty();
  return report;
}

ChannelSpec default_channel(int d, int p, double epsilon) {
  if (d < 2) throw std::invalid_argument("default_channel: d must be >= 2");
  if (p < 2) throw std::invalid_argument("default_channel: p must be >= 2");
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw std::invalid_argument("default_channel: epsilon must lie strictly in (0,1)");
  }
  ChannelSpec spec;
  spec.d = d;
  spec.p = p;
  spec.q = d * (p - 1) + 1;
  spec.epsilon = epsilon;
  spec.P = DenseMatrix(spec.q, spec.q, epsilon / spec.q);
  for (int i = 0; i < spec.q; ++i) spec.P.at(i, i) += 1.0 - epsilon;
  return spec;
}

double RateTuple::sum() const { return std::accumulate(R.begin(), R.end(), 0.0); }

RegionPosition rate_region_check(const RateTuple& rates, int d, int p) {
  const double threshold = static_cast<double>(d) * (p - 1) / 2.0;
  const double s = rates.sum();
  if (s < threshold - kRegionTol) return RegionPosition::inside;
  if (s > threshold + kRegionTol) return RegionPosition::outside;
  return RegionPosition::boundary;
}

std::string to_string(RegionPosition pos) {
  switch (pos) {
    case RegionPosition::inside:
      return "inside";
    case RegionPosition::boundary:
      return "boundary";
    default:
      return "outside";
  }
}

double Distribution::sum() const { return std::accumulate(w.begin(), w.end(), 0.0); }

bool Distribution::valid() const {
  const double s = sum();
  if (kind == DistributionKind::pseudo) return std::abs(s - 1.0) <= 1e-6;
  if (std::abs(s - 1.0) > kRowSumTol) return false;
  for (double v : w) {
    if (v < 0.0) return false;
  }
  return true;
}

nlohmann::json channel_to_json(const ChannelSpec& spec) {
  nlohmann::json j;
  j["d"] = spec.d;
  j["p"] = spec.p;
  if (spec.epsilon >= 0.0) {
    j["epsilon"] = spec.epsilon;
  } else {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < spec.P.rows; ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < spec.P.cols; ++c) row.push_back(spec.P.at(r, c));
      rows.push_back(row);
    }
    j["matrix"] = rows;
  }
  return j;
}

ChannelSpec channel_from_json(const nlohmann::json& j) {
  const int d = j.at("d").get<int>();
  const int p = j.at("p").get<int>();
  const bool has_eps = j.contains("epsilon");
  const bool has_matrix = j.contains("matrix");
  if (has_eps == has_matrix) {
    throw std::invalid_argument("channel config: provide exactly one of 'epsilon' or 'matrix'");
  }
  if (has_eps) return default_channel(d, p, j.at("epsilon").get<double>());
  ChannelSpec spec;
  spec.d = d;
  spec.p = p;
  spec.q = d * (p - 1) + 1;
  const auto& rows = j.at("matrix");
  spec.P = DenseMatrix(static_cast<int>(rows.size()),
                       rows.empty() ? 0 : static_cast<int>(rows.at(0).size()));
  for (int r = 0; r < spec.P.rows; ++r) {
    const auto& row = rows.at(static_cast<std::size_t>(r));
    if (static_cast<int>(row.size()) != spec.P.cols) {
      throw std::invalid_argument("channel config: ragged matrix rows");
    }
    for (int c = 0; c < spec.P.cols; ++c) {
      spec.P.at(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
  }
  const ChannelValidation report = validate_channel(spec);
  if (!report.ok) {
    std::string msg = "channel config: invalid matrix:";
    for (const auto& v : report.violations) msg += " [" + v + "]";
    throw std::invalid_argument(msg);
  }
  return spec;
}

}  // namespace pamac
