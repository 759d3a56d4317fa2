// rwave: batch-insertion experiments on R-tree variants.
#include <algorithm>
#include <atomic>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rwave/error.hpp"
#include "rwave/experiment.hpp"
#include "rwave/workload.hpp"

namespace {

using namespace rwave;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kAuditFailure = 2;

struct CommonOptions {
  std::string config;
  std::string preset;
  std::string variant;
  std::string remedy;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double scale = 1.0;
  std::vector<std::string> set;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("-c,--config", o.config, "key = value config file");
  app->add_option("--preset", o.preset, "full or desk");
  app->add_option("--variant", o.variant, "linear, quadratic, rstar or hilbert");
  app->add_option("--remedy", o.remedy, "none, ufs, urs or res");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--seed", o.seed, "master seed")->each([&o](const std::string&) { o.seed_set = true; });
  app->add_option("--scale", o.scale, "divide initial_n and batch_size by this factor");
  app->add_option("--set", o.set, "extra key=value settings")->take_all();
}

ExperimentConfig build_config(const CommonOptions& o) {
  ExperimentConfig c;
  if (!o.preset.empty()) apply_setting(c, "preset", o.preset);
  if (!o.config.empty()) apply_settings(c, read_settings(o.config));
  for (const std::string& kv : o.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("set", "expected key=value, got `" + kv + "`");
    apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!o.variant.empty()) apply_setting(c, "variant", o.variant);
  if (!o.remedy.empty()) apply_setting(c, "remedy", o.remedy);
  if (!o.out.empty()) c.out = o.out;
  if (o.seed_set) c.seed = o.seed;
  if (o.scale != 1.0) apply_scale(c, o.scale);
  c.derive_seeds();
  c.validate();
  return c;
}

void print_summary(std::ostream& os, const std::string& label, const ExperimentResult& r) {
  os << label << ": " << r.batches.size() << " batches, " << r.diagnostics.count()
     << " leaf splits, leaves " << r.initial.leaf_count << " -> " << r.final_stats.leaf_count
     << ", utilization " << r.final_stats.avg_leaf_utilization << ", peak/median "
     << r.severity.peak_to_median << ", waves " << r.severity.wave_count << ", audit "
     << (r.audit.ok() ? "pass" : "FAIL") << ", " << r.seconds << " s\n";
}

void print_failures(const AuditReport& a) {
  for (const std::string& f : a.failures) std::cerr << "audit: " << f << '\n';
}

int cmd_run(const CommonOptions& o) {
  const ExperimentConfig c = build_config(o);
  const ExperimentResult r = run_experiment(c);
  print_summary(std::cout, std::string(to_string(c.tree.variant)), r);
  if (!r.audit.ok()) {
    print_failures(r.audit);
    return kAuditFailure;
  }
  return kOk;
}

int cmd_audit(const CommonOptions& o, std::size_t every) {
  ExperimentConfig c = build_config(o);
  c.audit_every = every;
  const ExperimentResult r = run_experiment(c);
  std::cout << "audit after " << r.batches.size() << " batches: " << (r.audit.ok() ? "pass" : "FAIL") << '\n';
  print_failures(r.audit);
  return r.audit.ok() ? kOk : kAuditFailure;
}

// Runs every config on `jobs` threads. Each run owns its tree, pool and RNGs.
std::vector<ExperimentResult> run_all(const std::vector<ExperimentConfig>& configs, unsigned jobs) {
  std::vector<ExperimentResult> results(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        results[i] = run_experiment(configs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

int cmd_sweep(const CommonOptions& o, const std::string& key, const std::vector<std::string>& values,
              unsigned jobs) {
  const ExperimentConfig base = build_config(o);
  std::vector<ExperimentConfig> configs;
  for (const std::string& v : values) {
    ExperimentConfig c = base;
    apply_setting(c, key, v);
    if (!base.out.empty()) c.out = base.out / (key + "=" + v);
    c.validate();
    configs.push_back(std::move(c));
  }
  const std::vector<ExperimentResult> results = run_all(configs, jobs);
  bool ok = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    print_summary(std::cout, key + "=" + values[i], results[i]);
    if (!results[i].audit.ok()) {
      ok = false;
      print_failures(results[i].audit);
    }
  }
  return ok ? kOk : kAuditFailure;
}

int cmd_compare(const CommonOptions& o, const std::vector<std::string>& labels, bool fetches,
                unsigned jobs) {
  const ExperimentConfig base = build_config(o);
  std::vector<ExperimentConfig> configs{base};
  if (!base.out.empty()) configs.front().out = base.out / "baseline";
  for (const std::string& l : labels) {
    ExperimentConfig c = base;
    apply_remedy_label(c, l);
    if (!base.out.empty()) c.out = base.out / l;
    c.validate();
    configs.push_back(std::move(c));
  }
  const std::vector<ExperimentResult> results = run_all(configs, jobs);
  std::cout << "remedy";
  for (const QuerySpec& q : base.queries) std::cout << ',' << to_string(q.kind) << ':' << q.size;
  std::cout << '\n';
  bool ok = results.front().audit.ok();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::vector<double> w = win_rates(results.front(), results[i + 1], base.queries.size(), fetches);
    std::cout << labels[i];
    for (double v : w) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * v);
      std::cout << ',' << buf;
    }
    std::cout << '\n';
    ok = ok && results[i + 1].audit.ok();
  }
  return ok ? kOk : kAuditFailure;
}

int cmd_gen_data(const std::string& kind, std::size_t n, std::uint64_t seed, const std::string& out,
                 const std::string& normalize) {
  if (!normalize.empty()) {
    const Bounds b = normalize_csv(normalize, out);
    std::cout << "normalized " << normalize << " -> " << out << " (x " << b.min_x << ".." << b.max_x
              << ", y " << b.min_y << ".." << b.max_y << ")\n";
    return kOk;
  }
  DataSpec spec;
  const auto k = parse_data_kind(kind);
  if (!k || *k == DataKind::Csv) throw ConfigError("kind", "expected uniform, normal or bit");
  spec.kind = *k;
  spec.seed = seed;
  PointGenerator gen(spec);
  write_csv_points(out, gen.take(n));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch-insertion experiments on R-tree variants"};
  app.require_subcommand(1);

  CommonOptions run_o, audit_o, sweep_o, cmp_o;
  auto* run = app.add_subcommand("run", "run one experiment");
  add_common(run, run_o);

  auto* audit = app.add_subcommand("audit", "run an experiment and audit the tree");
  add_common(audit, audit_o);
  std::size_t audit_every = 0;
  audit->add_option("--every", audit_every, "also audit every N batches");

  auto* sweep = app.add_subcommand("sweep", "run one experiment per value of a setting");
  add_common(sweep, sweep_o);
  std::string sweep_key;
  std::vector<std::string> sweep_values;
  unsigned sweep_jobs = std::max(1u, std::thread::hardware_concurrency());
  sweep->add_option("--param", sweep_key, "setting to vary")->required();
  sweep->add_option("--values", sweep_values, "values")->required()->delimiter(',');
  sweep->add_option("-j,--jobs", sweep_jobs, "parallel runs");

  auto* cmp = app.add_subcommand("compare", "win rates of remedies against the base setting");
  add_common(cmp, cmp_o);
  std::vector<std::string> labels{"de", "sr", "lpr", "rpr", "ufs", "urs", "res"};
  bool cmp_fetches = false;
  unsigned cmp_jobs = std::max(1u, std::thread::hardware_concurrency());
  cmp->add_option("--remedies", labels, "remedy labels")->delimiter(',');
  cmp->add_flag("--fetches", cmp_fetches, "compare store fetches instead of pages touched");
  cmp->add_option("-j,--jobs", cmp_jobs, "parallel runs");

  auto* gen = app.add_subcommand("gen-data", "write a synthetic point set as CSV");
  std::string gen_kind = "uniform", gen_out, gen_norm;
  std::size_t gen_n = 100000;
  std::uint64_t gen_seed = 1;
  gen->add_option("--kind", gen_kind, "uniform, normal or bit");
  gen->add_option("-n,--count", gen_n, "number of points");
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_option("--out", gen_out, "output CSV")->required();
  gen->add_option("--normalize", gen_norm, "rescale this CSV into the unit square instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(run_o);
    if (*audit) return cmd_audit(audit_o, audit_every);
    if (*sweep) return cmd_sweep(sweep_o, sweep_key, sweep_values, sweep_jobs);
    if (*cmp) return cmd_compare(cmp_o, labels, cmp_fetches, cmp_jobs);
    if (*gen) return cmd_gen_data(gen_kind, gen_n, gen_seed, gen_out, gen_norm);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
