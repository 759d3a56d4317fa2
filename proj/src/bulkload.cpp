#include "rwave/bulkload.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rwave/error.hpp"

namespace rwave {

std::string_view to_string(FillKind k) noexcept {
  switch (k) {
    case FillKind::Fixed: return "fixed";
    case FillKind::Sound: return "sr";
    case FillKind::LinearPractical: return "lpr";
    case FillKind::RandomPractical: return "rpr";
  }
  return "?";
}

std::string_view to_string(BulkOrder o) noexcept {
  return o == BulkOrder::Str ? "str" : "hilbert";
}

std::optional<FillKind> parse_fill(std::string_view name) noexcept {
  if (name == "fixed") return FillKind::Fixed;
  if (name == "sr") return FillKind::Sound;
  if (name == "lpr") return FillKind::LinearPractical;
  if (name == "rpr") return FillKind::RandomPractical;
  return std::nullopt;
}

std::optional<BulkOrder> parse_bulk_order(std::string_view name) noexcept {
  if (name == "hilbert") return BulkOrder::HilbertSort;
  if (name == "str") return BulkOrder::Str;
  return std::nullopt;
}

void FillPolicy::validate() const {
  if (kind == FillKind::Sound) return;
  if (!(utilization >= 0.5 && utilization <= 1.0)) {
    throw ConfigError("fill_utilization", "must be in [0.5, 1]");
  }
  if (kind == FillKind::Fixed) return;
  const double limit = 2.0 * std::min(1.0 - utilization, utilization - 0.5);
  if (!(range >= 0.0 && range <= limit + 1e-12)) {
    throw ConfigError("fill_range", "must be in [0, 2 * min(1 - t, t - 0.5)]");
  }
}

std::size_t fill_count(double fraction, std::size_t max_entries) noexcept {
  const double c = std::round(fraction * static_cast<double>(max_entries));
  if (!(c >= 1.0)) return 1;
  return std::min(max_entries, static_cast<std::size_t>(c));
}

std::size_t sr_support_min(std::size_t max_entries) noexcept { return (max_entries + 2) / 2; }

std::vector<double> sr_probabilities(std::size_t max_entries) {
  if (max_entries < 3) throw DomainError("sr_probabilities: B must be at least 3");
  // B / (j (j + 1)) telescopes to B / (B + 1) over the support; dividing by
  // that leaves (B + 1) / (j (j + 1)).
  const double scale = static_cast<double>(max_entries + 1);
  std::vector<double> p;
  for (std::size_t j = sr_support_min(max_entries); j <= max_entries; ++j) {
    const double jd = static_cast<double>(j);
    p.push_back(scale / (jd * (jd + 1.0)));
  }
  double sum = 0.0;
  for (double v : p) sum += v;
  for (double& v : p) v /= sum;
  return p;
}

namespace {

std::vector<double> sr_cdf(std::size_t max_entries) {
  std::vector<double> cdf = sr_probabilities(max_entries);
  for (std::size_t i = 1; i < cdf.size(); ++i) cdf[i] += cdf[i - 1];
  cdf.back() = 1.0;
  return cdf;
}

std::size_t sample_cdf(const std::vector<double>& cdf, std::size_t lower, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = u(rng);
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
  const auto i = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
      it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
  return lower + i;
}

std::vector<std::size_t> sr_pack_with(std::size_t n, std::size_t max_entries,
                                      const std::vector<double>& cdf, std::mt19937_64& rng) {
  std::vector<std::size_t> sizes;
  const std::size_t lower = sr_support_min(max_entries);
  std::size_t rem = n;
  // 2 * rem < 3B + 1 is rem < (3B + 1) / 2 without rounding.
  while (rem > 0 && 2 * rem >= 3 * max_entries + 1) {
    const std::size_t j = sample_cdf(cdf, lower, rng);
    sizes.push_back(j);
    rem -= j;
  }
  if (rem == 0) return sizes;
  if (rem <= max_entries) {
    sizes.push_back(rem);
  } else {
    sizes.push_back((rem + 1) / 2);
    sizes.push_back(rem / 2);
  }
  return sizes;
}

}  // namespace

std::size_t sr_sample_fill(std::size_t max_entries, std::mt19937_64& rng) {
  return sample_cdf(sr_cdf(max_entries), sr_support_min(max_entries), rng);
}

std::vector<std::size_t> sr_pack(std::size_t n, std::size_t max_entries, std::mt19937_64& rng) {
  return sr_pack_with(n, max_entries, sr_cdf(max_entries), rng);
}

LinearFillSequence::LinearFillSequence(double target, double range, std::size_t max_entries)
    : hi_(target + range / 2.0), lo_(target - range / 2.0), target_(target),
      max_entries_(max_entries) {
  // Pairs (hi - i%, lo + i%) while the high value stays above the low one.
  const double steps = range / 0.02;
  pairs_ = range <= 0.0 ? 0 : static_cast<std::size_t>(std::ceil(steps - 1e-9));
}

double LinearFillSequence::next_fraction() {
  if (pairs_ == 0) return target_;
  const std::size_t pos = step_ % (2 * pairs_);
  step_ = (step_ + 1) % (2 * pairs_);
  const double i = static_cast<double>(pos / 2);
  return pos % 2 == 0 ? hi_ - 0.01 * i : lo_ + 0.01 * i;
}

std::vector<std::size_t> lpr_fill_sequence(double target, double range, std::size_t max_entries,
                                           std::size_t count) {
  LinearFillSequence seq(target, range, max_entries);
  std::vector<std::size_t> out(count);
  for (auto& c : out) c = seq.next();
  return out;
}

std::size_t rpr_sample_fill(double target, double range, std::size_t max_entries,
                            std::mt19937_64& rng) {
  if (range <= 0.0) return fill_count(target, max_entries);
  std::uniform_real_distribution<double> u(target - range / 2.0, target + range / 2.0);
  return fill_count(u(rng), max_entries);
}

FillStream::FillStream(const FillPolicy& policy, std::size_t max_entries, std::size_t min_fill)
    : policy_(policy), max_entries_(max_entries), min_fill_(min_fill), rng_(policy.rng_seed),
      linear_(policy.utilization, policy.range, max_entries) {
  policy_.validate();
}

std::size_t FillStream::next_count() {
  switch (policy_.kind) {
    case FillKind::Fixed: return fill_count(policy_.utilization, max_entries_);
    case FillKind::LinearPractical: return linear_.next();
    case FillKind::RandomPractical:
      return rpr_sample_fill(policy_.utilization, policy_.range, max_entries_, rng_);
    case FillKind::Sound: break;
  }
  return max_entries_;
}

std::vector<std::size_t> FillStream::plan(std::size_t n) {
  if (policy_.kind == FillKind::Sound) {
    if (cdf_.empty()) cdf_ = sr_cdf(max_entries_);
    return sr_pack_with(n, max_entries_, cdf_, rng_);
  }
  std::vector<std::size_t> sizes;
  std::size_t rem = n;
  while (rem > 0) {
    const std::size_t c = std::min(next_count(), rem);
    sizes.push_back(c);
    rem -= c;
  }
  if (sizes.size() >= 2 && sizes.back() < min_fill_) {
    const std::size_t total = sizes[sizes.size() - 2] + sizes.back();
    sizes.pop_back();
    if (total <= max_entries_) {
      sizes.back() = total;
    } else {
      sizes.back() = (total + 1) / 2;
      sizes.push_back(total / 2);
    }
  }
  return sizes;
}

std::vector<std::size_t> plan_leaf_sizes(std::size_t n, std::size_t max_entries,
                                         std::size_t min_fill, const FillPolicy& policy) {
  FillStream s(policy, max_entries, min_fill);
  return s.plan(n);
}

double target_fill(const FillPolicy& policy, std::size_t max_entries) {
  if (policy.kind != FillKind::Sound) return policy.utilization;
  const std::vector<double> p = sr_probabilities(max_entries);
  double mean = 0.0;
  std::size_t j = sr_support_min(max_entries);
  for (double v : p) mean += v * static_cast<double>(j++);
  return mean / static_cast<double>(max_entries);
}

}  // namespace rwave
