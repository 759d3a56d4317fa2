#include "rwave/remedies.hpp"

#include "rwave/error.hpp"

namespace rwave {

std::string_view to_string(RemedyKind k) noexcept {
  switch (k) {
    case RemedyKind::None: return "none";
    case RemedyKind::UnequalFixed: return "ufs";
    case RemedyKind::UnequalRandom: return "urs";
    case RemedyKind::RegularElective: return "res";
  }
  return "?";
}

std::optional<RemedyKind> parse_remedy(std::string_view name) noexcept {
  if (name == "none") return RemedyKind::None;
  if (name == "ufs") return RemedyKind::UnequalFixed;
  if (name == "urs") return RemedyKind::UnequalRandom;
  if (name == "res") return RemedyKind::RegularElective;
  return std::nullopt;
}

void RemedyConfig::validate() const {
  switch (kind) {
    case RemedyKind::None: break;
    case RemedyKind::UnequalFixed:
      if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("remedy_fraction", "must be in (0, 1)");
      break;
    case RemedyKind::UnequalRandom:
      if (!(lo > 0.0 && lo <= hi && hi < 1.0)) {
        throw ConfigError("remedy_range", "need 0 < lo <= hi < 1");
      }
      break;
    case RemedyKind::RegularElective:
      if (period < 1) throw ConfigError("remedy_period", "must be >= 1");
      break;
  }
}

double urs_fraction(const RemedyConfig& cfg, std::mt19937_64& rng) {
  if (cfg.lo == cfg.hi) return cfg.lo;
  std::uniform_real_distribution<double> u(cfg.lo, cfg.hi);
  return u(rng);
}

SplitOutcome ufs_split(Variant variant, std::span<const Entry> entries, double f) {
  return split_entries(variant, entries, 1, f);
}

}  // namespace rwave
