#include "rwave/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "rwave/error.hpp"
#include "rwave/kernels.hpp"

namespace rwave {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view key, std::string_view v) {
  const std::string s = trim(v);
  double out = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(out)) {
    throw ConfigError(std::string(key), "expected a number, got `" + s + "`");
  }
  return out;
}

std::size_t to_size(std::string_view key, std::string_view v) {
  const double d = to_double(key, v);
  if (d < 0.0 || d != std::floor(d) || d > 1e15) {
    throw ConfigError(std::string(key), "expected a non-negative integer");
  }
  return static_cast<std::size_t>(d);
}

bool to_bool(std::string_view key, std::string_view v) {
  const std::string s = trim(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(std::string(key), "expected true or false, got `" + s + "`");
}

template <class T, class F>
T to_enum(std::string_view key, std::string_view v, F parse) {
  const std::string s = trim(v);
  const std::optional<T> r = parse(s);
  if (!r) throw ConfigError(std::string(key), "unknown value `" + s + "`");
  return *r;
}

std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::vector<QuerySpec> parse_queries(std::string_view key, std::string_view v,
                                     const std::vector<QuerySpec>& old) {
  std::vector<QuerySpec> out;
  std::string s = trim(v);
  std::size_t at = 0;
  while (at <= s.size()) {
    const std::size_t end = std::min(s.find(';', at), s.size());
    const std::string item = trim(std::string_view(s).substr(at, end - at));
    at = end + 1;
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError(std::string(key), "expected kind:size, got `" + item + "`");
    QuerySpec q = old.empty() ? QuerySpec{} : old.front();
    q.kind = to_enum<QueryKind>(key, std::string_view(item).substr(0, colon), parse_query_kind);
    q.size = to_double(key, std::string_view(item).substr(colon + 1));
    out.push_back(q);
  }
  if (out.empty()) throw ConfigError(std::string(key), "need at least one query family");
  return out;
}

std::string format_queries(const std::vector<QuerySpec>& qs) {
  std::string s;
  for (const QuerySpec& q : qs) {
    if (!s.empty()) s += ';';
    s += std::string(to_string(q.kind)) + ':' + num(q.size);
  }
  return s;
}

}  // namespace

void ExperimentConfig::derive_seeds() {
  const std::uint64_t base = splitmix64(seed);
  bulk_data.seed = splitmix64(base + 1);
  batch_data.seed = splitmix64(base + 2);
  tree.remedy.rng_seed = splitmix64(base + 3);
  fill.rng_seed = splitmix64(base + 4);
  for (std::size_t i = 0; i < queries.size(); ++i) queries[i].seed = splitmix64(base + 16 + i);
}

void ExperimentConfig::validate() const {
  tree.validate();
  fill.validate();
  if (initial_n == 0) throw ConfigError("initial_n", "must be positive");
  if (batch_size == 0) throw ConfigError("batch_size", "must be positive");
  if (queries.empty()) throw ConfigError("queries", "need at least one query family");
  for (const QuerySpec& q : queries) {
    if (!(q.size > 0.0 && q.size <= 1.0)) throw ConfigError("queries", "sizes must be in (0, 1]");
    if (q.per_batch == 0) throw ConfigError("queries_per_batch", "must be positive");
  }
  if (bulk_order == BulkOrder::Str && tree.variant == Variant::Hilbert) {
    throw ConfigError("bulk_order", "str packing is not available for the hilbert variant");
  }
  if (severity_window == 0) throw ConfigError("severity_window", "must be positive");
  if (batches > 0 && severity_warmup >= batches) {
    throw ConfigError("severity_warmup", "must be smaller than batches");
  }
}

void apply_desk_preset(ExperimentConfig& c) {
  c.preset = "desk";
  c.initial_n = 200'000;
  c.batch_size = 2'000;
  c.batches = 300;
  c.tree.page_size_bytes = 16384;
  c.tree.buffer_pages = 500;
  c.severity_window = 30;
}

void apply_scale(ExperimentConfig& c, double factor) {
  if (!(factor >= 1.0)) throw ConfigError("scale", "must be at least 1");
  c.initial_n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(c.initial_n) / factor)));
  c.batch_size = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(c.batch_size) / factor)));
}

void apply_setting(ExperimentConfig& c, std::string_view key_in, std::string_view value) {
  const std::string key = trim(key_in);
  const std::string v = trim(value);
  auto& t = c.tree;
  if (key == "variant") t.variant = to_enum<Variant>(key, v, parse_variant);
  else if (key == "reinsertion") t.reinsertion = to_bool(key, v);
  else if (key == "deferred") t.deferred = to_bool(key, v);
  else if (key == "reinsert_fraction") t.reinsert_fraction = to_double(key, v);
  else if (key == "page_size") t.page_size_bytes = to_size(key, v);
  else if (key == "buffer_pages") t.buffer_pages = to_size(key, v);
  else if (key == "hilbert_order") t.hilbert_order = static_cast<int>(to_size(key, v));
  else if (key == "page_file") t.page_file = v;
  else if (key == "remedy") t.remedy.kind = to_enum<RemedyKind>(key, v, parse_remedy);
  else if (key == "remedy_fraction") t.remedy.fraction = to_double(key, v);
  else if (key == "remedy_lo") t.remedy.lo = to_double(key, v);
  else if (key == "remedy_hi") t.remedy.hi = to_double(key, v);
  else if (key == "remedy_period") t.remedy.period = to_size(key, v);
  else if (key == "bulk_order") c.bulk_order = to_enum<BulkOrder>(key, v, parse_bulk_order);
  else if (key == "fill") c.fill.kind = to_enum<FillKind>(key, v, parse_fill);
  else if (key == "fill_utilization") c.fill.utilization = to_double(key, v);
  else if (key == "fill_range") c.fill.range = to_double(key, v);
  else if (key == "initial_n") c.initial_n = to_size(key, v);
  else if (key == "bulk_data") c.bulk_data.kind = to_enum<DataKind>(key, v, parse_data_kind);
  else if (key == "batch_data") c.batch_data.kind = to_enum<DataKind>(key, v, parse_data_kind);
  else if (key == "bulk_csv") c.bulk_data.csv = v;
  else if (key == "batch_csv") c.batch_data.csv = v;
  else if (key == "data_mean") c.bulk_data.mean = c.batch_data.mean = to_double(key, v);
  else if (key == "data_sd") c.bulk_data.sd = c.batch_data.sd = to_double(key, v);
  else if (key == "bit_p") c.bulk_data.bit_p = c.batch_data.bit_p = to_double(key, v);
  else if (key == "bits") c.bulk_data.bits = c.batch_data.bits = static_cast<int>(to_size(key, v));
  else if (key == "batches") c.batches = to_size(key, v);
  else if (key == "batch_size") c.batch_size = to_size(key, v);
  else if (key == "queries") c.queries = parse_queries(key, v, c.queries);
  else if (key == "queries_per_batch") {
    const std::size_t n = to_size(key, v);
    for (QuerySpec& q : c.queries) q.per_batch = n;
  } else if (key == "focals") {
    const std::size_t n = to_size(key, v);
    for (QuerySpec& q : c.queries) q.focals = n;
  }
  else if (key == "seed") c.seed = to_size(key, v);
  else if (key == "severity_warmup") c.severity_warmup = to_size(key, v);
  else if (key == "severity_window") c.severity_window = to_size(key, v);
  else if (key == "audit_every") c.audit_every = to_size(key, v);
  else if (key == "out") c.out = v;
  else if (key == "preset") {
    if (v == "desk") apply_desk_preset(c);
    else if (v != "full") throw ConfigError(key, "unknown preset `" + v + "`");
  } else if (key == "scale") apply_scale(c, to_double(key, v));
  else throw ConfigError(key, "unknown setting");
}

std::vector<std::pair<std::string, std::string>> read_settings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config", path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    kv.emplace_back(trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)));
  }
  return kv;
}

void apply_settings(ExperimentConfig& c, const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [k, v] : kv) {
    if (k == "preset") apply_setting(c, k, v);
  }
  for (const auto& [k, v] : kv) {
    if (k != "preset") apply_setting(c, k, v);
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  ExperimentConfig c;
  apply_settings(c, read_settings(path));
  return c;
}

std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& c) {
  const auto& t = c.tree;
  auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  return {
      {"preset", c.preset},
      {"variant", std::string(to_string(t.variant))},
      {"reinsertion", b(t.reinsertion)},
      {"deferred", b(t.deferred)},
      {"reinsert_fraction", num(t.reinsert_fraction)},
      {"page_size", std::to_string(t.page_size_bytes)},
      {"buffer_pages", std::to_string(t.buffer_pages)},
      {"hilbert_order", std::to_string(t.hilbert_order)},
      {"page_file", t.page_file.string()},
      {"remedy", std::string(to_string(t.remedy.kind))},
      {"remedy_fraction", num(t.remedy.fraction)},
      {"remedy_lo", num(t.remedy.lo)},
      {"remedy_hi", num(t.remedy.hi)},
      {"remedy_period", std::to_string(t.remedy.period)},
      {"bulk_order", std::string(to_string(c.bulk_order))},
      {"fill", std::string(to_string(c.fill.kind))},
      {"fill_utilization", num(c.fill.utilization)},
      {"fill_range", num(c.fill.range)},
      {"initial_n", std::to_string(c.initial_n)},
      {"bulk_data", std::string(to_string(c.bulk_data.kind))},
      {"batch_data", std::string(to_string(c.batch_data.kind))},
      {"bulk_csv", c.bulk_data.csv.string()},
      {"batch_csv", c.batch_data.csv.string()},
      {"data_mean", num(c.bulk_data.mean)},
      {"data_sd", num(c.bulk_data.sd)},
      {"bit_p", num(c.bulk_data.bit_p)},
      {"bits", std::to_string(c.bulk_data.bits)},
      {"batches", std::to_string(c.batches)},
      {"batch_size", std::to_string(c.batch_size)},
      {"queries", format_queries(c.queries)},
      {"queries_per_batch", std::to_string(c.queries.front().per_batch)},
      {"focals", std::to_string(c.queries.front().focals)},
      {"seed", std::to_string(c.seed)},
      {"severity_warmup", std::to_string(c.severity_warmup)},
      {"severity_window", std::to_string(c.severity_window)},
      {"audit_every", std::to_string(c.audit_every)},
      {"out", c.out.string()},
  };
}

void apply_remedy_label(ExperimentConfig& c, std::string_view label) {
  auto& t = c.tree;
  if (label == "none") return;
  if (label == "de") {
    if (t.variant == Variant::Hilbert) t.deferred = true;
    else if (t.variant == Variant::RStar) t.reinsertion = true;
    else throw ConfigError("remedy", "de applies to the hilbert and rstar variants");
  } else if (label == "sr") {
    c.fill.kind = FillKind::Sound;
  } else if (label == "lpr" || label == "rpr") {
    c.fill.kind = label == "lpr" ? FillKind::LinearPractical : FillKind::RandomPractical;
    c.fill.utilization = 0.9;
    c.fill.range = label == "lpr" ? 0.2 : 0.1;
  } else if (const auto k = parse_remedy(label)) {
    t.remedy.kind = *k;
    if (*k == RemedyKind::UnequalFixed) t.remedy.fraction = 0.3;
    if (*k == RemedyKind::RegularElective) t.remedy.period = t.variant == Variant::RStar ? 900 : 600;
  } else {
    throw ConfigError("remedy", "unknown remedy label `" + std::string(label) + "`");
  }
}

std::vector<double> ExperimentResult::leaf_split_series() const {
  std::vector<double> s;
  s.reserve(batches.size());
  for (const BatchRecord& r : batches) s.push_back(static_cast<double>(r.leaf_splits));
  return s;
}

std::vector<double> ExperimentResult::query_series(std::size_t family, bool fetches) const {
  std::vector<double> s;
  s.reserve(batches.size());
  if (family >= family_sizes.size()) throw DomainError("query_series: no query family " + std::to_string(family));
  std::size_t begin = 0;
  for (std::size_t f = 0; f < family; ++f) begin += family_sizes[f];
  const std::size_t n = family_sizes[family];
  for (const BatchRecord& r : batches) {
    const auto& v = fetches ? r.query_fetches : r.pages_touched;
    double sum = 0.0;
    for (std::size_t i = begin; i < begin + n && i < v.size(); ++i) sum += static_cast<double>(v[i]);
    s.push_back(n == 0 ? 0.0 : sum / static_cast<double>(n));
  }
  return s;
}

namespace {

void write_summary(const std::filesystem::path& path, const ExperimentConfig& c,
                   const ExperimentResult& r) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("out", "cannot write " + path.string());
  const auto& d = r.diagnostics;
  const LineageShares ls = d.lineage();
  out << "metric,value\n";
  auto row = [&](const std::string& k, const std::string& v) { out << csv_field(k) << ',' << csv_field(v) << '\n'; };
  row("leaf_split_events", std::to_string(d.count()));
  row("degenerate_split_events", std::to_string(d.degenerate_events()));
  row("mean_split_overlap_ratio", num(d.mean_overlap_ratio()));
  row("mean_split_ratio", num(d.mean_split_ratio()));
  row("split_ratio_std", num(d.split_ratio_std()));
  row("lineage_bulk_share", num(ls.bulk));
  row("lineage_large_share", num(ls.large));
  row("lineage_small_share", num(ls.small));
  row("cumulative_area_difference", num(d.area_difference()));
  row("wave_severity_peak_to_median (artifact definition)", num(r.severity.peak_to_median));
  row("wave_severity_cv (artifact definition)", num(r.severity.cv));
  row("wave_severity_wave_count (artifact definition)", std::to_string(r.severity.wave_count));
  row("initial_leaf_count", std::to_string(r.initial.leaf_count));
  row("final_leaf_count", std::to_string(r.final_stats.leaf_count));
  row("final_height", std::to_string(r.final_stats.height));
  row("final_avg_leaf_utilization", num(r.final_stats.avg_leaf_utilization));
  row("audit", r.audit.ok() ? "pass" : "fail");
  row("severity_warmup", std::to_string(c.severity_warmup));
  row("severity_window", std::to_string(c.severity_window));
}

void write_meta(const std::filesystem::path& path, const ExperimentConfig& c,
                const ExperimentResult& r) {
  nlohmann::ordered_json j;
  j["tool"] = "rwave";
  j["version"] = "1.0.0";
  j["preset"] = c.preset;
  nlohmann::ordered_json cfg;
  for (const auto& [k, v] : describe(c)) cfg[k] = v;
  j["config"] = cfg;
  j["seeds"] = {{"master", c.seed},
                {"bulk_data", c.bulk_data.seed},
                {"batch_data", c.batch_data.seed},
                {"remedy", c.tree.remedy.rng_seed},
                {"fill", c.fill.rng_seed}};
  nlohmann::ordered_json qs = nlohmann::ordered_json::array();
  for (const QuerySpec& q : c.queries) qs.push_back(q.seed);
  j["seeds"]["queries"] = qs;
  j["kernel_backend"] = std::string(simd::to_string(simd::active_backend()));
  j["io_metric"] = "counted buffer fetches and evictions (no wall-clock I/O)";
  j["audit"] = r.audit.ok() ? "pass" : "fail";
  j["audit_failures"] = r.audit.failures;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("out", "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& c, const RunHooks& hooks) {
  c.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult res;

  std::optional<BatchCsvWriter> csv;
  if (!c.out.empty()) {
    std::filesystem::create_directories(c.out);
    csv.emplace(c.out / "batches.csv");
  }

  RTree tree(c.tree);
  PointGenerator bulk_gen(c.bulk_data);
  const bool shared_csv = c.bulk_data.kind == DataKind::Csv && c.batch_data.kind == DataKind::Csv &&
                          (c.batch_data.csv.empty() || c.batch_data.csv == c.bulk_data.csv);
  std::optional<PointGenerator> batch_gen;
  if (!shared_csv) batch_gen.emplace(c.batch_data);
  PointGenerator& batch_points = shared_csv ? bulk_gen : *batch_gen;

  {
    const std::vector<Point> initial = bulk_gen.take(c.initial_n);
    tree.bulk_load(initial, c.bulk_order, c.fill);
  }
  tree.pool().reset_counters();
  res.initial = tree.stats();

  std::vector<QueryGenerator> qgens;
  for (const QuerySpec& q : c.queries) qgens.emplace_back(q);
  std::size_t per_batch_queries = 0;
  for (const QuerySpec& q : c.queries) {
    per_batch_queries += q.per_batch;
    res.family_sizes.push_back(q.per_batch);
  }

  for (std::size_t b = 0; b < c.batches; ++b) {
    BatchRecord rec;
    rec.batch_id = b + 1;
    tree.set_batch(rec.batch_id);
    const PoolStats before = tree.pool().stats();
    const TreeCounters cb = tree.counters();
    for (std::size_t i = 0; i < c.batch_size; ++i) {
      for (const SplitEvent& ev : tree.insert(batch_points.next())) {
        if (ev.level == 0) {
          ++rec.leaf_splits;
          res.diagnostics.add(ev);
          res.leaf_events.push_back(ev);
        } else {
          ++rec.nonleaf_splits;
        }
      }
    }
    rec.pages_touched.reserve(per_batch_queries);
    rec.query_fetches.reserve(per_batch_queries);
    for (std::size_t f = 0; f < qgens.size(); ++f) {
      for (std::size_t q = 0; q < c.queries[f].per_batch; ++q) {
        const QueryResult qr = tree.range_query(qgens[f].next(tree));
        rec.pages_touched.push_back(qr.pages_touched);
        rec.query_fetches.push_back(qr.fetches);
      }
    }
    const PoolStats after = tree.pool().stats();
    const TreeCounters& ca = tree.counters();
    const TreeStats st = tree.stats();
    rec.elective_splits = ca.elective_splits - cb.elective_splits;
    rec.avg_leaf_utilization = st.avg_leaf_utilization;
    rec.leaf_count = st.leaf_count;
    rec.height = st.height;
    rec.evictions_delta = after.evictions - before.evictions;
    rec.fetches_delta = after.fetches - before.fetches;
    rec.buffer_utilization = after.utilization;
    rec.reinsert_count = ca.reinserted_entries - cb.reinserted_entries;
    rec.sibling_scan_count = ca.sibling_scans - cb.sibling_scans;
    if (csv) csv->write(rec);
    if (hooks.after_batch) hooks.after_batch(tree, rec);
    res.batches.push_back(std::move(rec));
    if (c.audit_every > 0 && (b + 1) % c.audit_every == 0 && b + 1 < c.batches) {
      res.audit = tree.audit();
      if (!res.audit.ok()) break;
    }
  }
  if (res.audit.ok()) res.audit = tree.audit();
  res.final_stats = tree.stats();
  if (c.batches > c.severity_warmup && res.batches.size() == c.batches) {
    const std::vector<double> s = res.leaf_split_series();
    res.severity = wave_severity(s, c.severity_warmup, c.severity_window);
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!c.out.empty()) {
    write_summary(c.out / "summary.csv", c, res);
    write_meta(c.out / "meta.json", c, res);
  }
  return res;
}

std::vector<double> win_rates(const ExperimentResult& baseline, const ExperimentResult& remedy,
                              std::size_t families, bool fetches) {
  if (baseline.batches.size() != remedy.batches.size()) {
    throw DomainError("win_rates: runs have " + std::to_string(baseline.batches.size()) + " and " +
                      std::to_string(remedy.batches.size()) + " batches");
  }
  std::vector<double> out(families, 0.0);
  if (baseline.batches.empty() || families == 0) return out;
  for (std::size_t f = 0; f < families; ++f) {
    const std::vector<double> a = baseline.query_series(f, fetches);
    const std::vector<double> b = remedy.query_series(f, fetches);
    std::size_t wins = 0;
    for (std::size_t i = 0; i < a.size(); ++i) wins += b[i] < a[i] ? 1 : 0;
    out[f] = static_cast<double>(wins) / static_cast<double>(a.size());
  }
  return out;
}

}  // namespace rwave
