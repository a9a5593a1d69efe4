#include "lemtree/exprunner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numbers>
#include <thread>

#include "json.hpp"

namespace lemtree::exprunner {

void CompensatedSum::add(double x) {
  double t = sum + x;
  if (std::abs(sum) >= std::abs(x))
    comp += (sum - t) + x;
  else
    comp += (x - t) + sum;
  sum = t;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double ks_statistic_normal(std::vector<double> standardized) {
  if (standardized.empty()) throw std::invalid_argument("ks_statistic_normal: empty sample");
  std::sort(standardized.begin(), standardized.end());
  const double m = static_cast<double>(standardized.size());
  double d = 0.0;
  for (std::size_t i = 0; i < standardized.size(); ++i) {
    double mid = (static_cast<double>(i) + 0.5) / m;
    d = std::max(d, std::abs(normal_cdf(standardized[i]) - mid));
  }
  return d;
}

RegressionFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need >= 2 points");
  const double n = static_cast<double>(x.size());
  CompensatedSum sx, sy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  double mx = sx.value() / n, my = sy.value() / n;
  CompensatedSum sxx, sxy, syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx.add((x[i] - mx) * (x[i] - mx));
    sxy.add((x[i] - mx) * (y[i] - my));
    syy.add((y[i] - my) * (y[i] - my));
  }
  RegressionFit fit;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy.value() > 0 ? (sxy.value() * sxy.value()) / (sxx.value() * syy.value()) : 1.0;
  return fit;
}

void parallel_trials(int trials, int jobs, const std::function<void(int)>& body) {
  if (trials <= 0) return;
  jobs = std::clamp(jobs, 1, trials);
  if (jobs == 1) {
    for (int t = 0; t < trials; ++t) body(t);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      int t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        body(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

// Trial bodies convert the pipeline's rejection exceptions into reasons;
// anything else escapes (it is a bug or a config error, not a rejected draw).
template <typename F>
void run_trial_body(TrialRecord& rec, F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  try {
    f();
  } catch (const lemgeo::NonGenericPolynomial&) {
    rec.rejected = true;
    rec.reason = "non_generic";
  } catch (const lemgeo::TracingFailure&) {
    rec.rejected = true;
    rec.reason = "tracing_failure";
  } catch (const lemgeo::ArgumentMismatch&) {
    rec.rejected = true;
    rec.reason = "argument_mismatch";
  } catch (const lemgeo::PartitionInconsistency&) {
    rec.rejected = true;
    rec.reason = "partition_inconsistency";
  } catch (const lemgeo::NonRealCritical&) {
    rec.rejected = true;
    rec.reason = "non_real_critical";
  } catch (const polymodels::RootCountMismatch&) {
    rec.rejected = true;
    rec.reason = "root_count_mismatch";
  } catch (const lemgeo::NumericError&) {
    rec.rejected = true;
    rec.reason = "numeric_failure";
  }
  rec.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

SummaryStats summarize_profiles(const std::vector<TrialRecord>& records) {
  SummaryStats s;
  CompensatedSum sum;
  for (const auto& rec : records) {
    if (rec.rejected) {
      ++s.rejected;
      ++s.rejection_reasons[rec.reason];
    } else if (rec.profile) {
      ++s.accepted;
      sum.add(rec.profile->n2);
      ++s.histogram[rec.profile->n2];
    }
  }
  long total = s.accepted + s.rejected;
  s.rejection_rate = total > 0 ? static_cast<double>(s.rejected) / total : 0.0;
  if (s.accepted > 0) {
    s.mean = sum.value() / static_cast<double>(s.accepted);
    CompensatedSum sq;
    for (const auto& rec : records)
      if (!rec.rejected && rec.profile) {
        double d = rec.profile->n2 - s.mean;
        sq.add(d * d);
      }
    s.variance = s.accepted > 1 ? sq.value() / static_cast<double>(s.accepted - 1) : 0.0;
    s.std_error = std::sqrt(s.variance / static_cast<double>(s.accepted));
  }
  return s;
}

treecore::OutdegreeProfile profile_from_valleys(int tree_size, int valleys) {
  treecore::OutdegreeProfile p;
  p.n2 = valleys;
  p.n0 = valleys + 1;
  p.n1 = tree_size - 2 * valleys - 1;
  return p;
}

// Perturbed-Chebyshev trial: verifies the all-real-roots property and the
// root/critical-point interlacing per draw, then reads the branching count
// off the permutation's valleys.
void perturbed_chebyshev_trial(int degree, rng::Stream& stream, TrialRecord& rec) {
  auto series = polymodels::perturbed_chebyshev(degree, stream);
  auto roots = polymodels::real_roots(series, -1.05, 1.05, degree);
  auto crits = polymodels::real_roots(polymodels::cheb_derivative(series), -1.05, 1.05, degree - 1);
  for (int i = 0; i + 1 < degree; ++i) {
    if (!(roots[i] < crits[i] && crits[i] < roots[i + 1])) {
      rec.rejected = true;
      rec.reason = "interlacing_violation";
      return;
    }
  }
  auto rep = lemgeo::PolynomialRep::from_chebyshev(series);
  auto perm = lemgeo::real_rooted_permutation(rep);
  rec.profile = profile_from_valleys(degree - 1, treecore::count_valleys(perm));
}

}  // namespace

SimulateResult simulate(const polymodels::ModelSpec& model, int trials, std::uint64_t seed,
                        int jobs) {
  if (trials < 1) throw ConfigError("simulate: trials must be >= 1");
  if (model.degree < 2) throw ConfigError("simulate: degree must be >= 2");
  SimulateResult result;
  result.records.resize(trials);
  parallel_trials(trials, jobs, [&](int t) {
    TrialRecord& rec = result.records[t];
    rec.trial = t;
    rec.degree = model.degree;
    rec.seed = seed;
    run_trial_body(rec, [&] {
      rng::Stream stream(seed, static_cast<std::uint64_t>(t));
      if (model.kind == polymodels::ModelKind::perturbed_chebyshev) {
        perturbed_chebyshev_trial(model.degree, stream, rec);
        return;
      }
      if (model.kind == polymodels::ModelKind::gaussian_chebyshev && model.degree > 30) {
        // The geometric pipeline needs the monomial form, whose basis change
        // is refused above degree 30.
        rec.rejected = true;
        rec.reason = "unsupported_degree";
        return;
      }
      auto rep = polymodels::sample_polynomial(model, stream);
      auto tree = lemgeo::build_lemniscate_tree(rep);
      rec.profile = treecore::outdegree_profile(tree);
    });
  });
  result.summary = summarize_profiles(result.records);
  return result;
}

SummaryStats clt_experiment(int size, int trials, std::uint64_t seed, int jobs) {
  if (size < 2) throw ConfigError("clt: size must be >= 2");
  if (trials < 1) throw ConfigError("clt: trials must be >= 1");
  auto moments = exactcomb::exact_moments(size);
  const double exact_mean = moments.mean.get_d();
  const double exact_sd = std::sqrt(moments.variance.get_d());
  if (!(exact_sd > 0.0))
    throw ConfigError("clt: the branching count is deterministic at this size (sd = 0); "
                      "standardization is undefined");

  exactcomb::UniformSampler sampler(size);
  std::vector<int> xs(trials);
  parallel_trials(trials, jobs, [&](int t) {
    rng::Stream stream(seed, static_cast<std::uint64_t>(t));
    auto tree = sampler.sample(stream);
    xs[t] = treecore::outdegree_profile(tree).n2;
  });

  SummaryStats s;
  s.accepted = trials;
  CompensatedSum sum;
  for (int x : xs) {
    sum.add(x);
    ++s.histogram[x];
  }
  s.mean = sum.value() / trials;
  CompensatedSum sq;
  for (int x : xs) sq.add((x - s.mean) * (x - s.mean));
  s.variance = trials > 1 ? sq.value() / (trials - 1) : 0.0;
  s.std_error = std::sqrt(s.variance / trials);

  std::vector<double> standardized(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) standardized[i] = (xs[i] - exact_mean) / exact_sd;
  s.ks = ks_statistic_normal(std::move(standardized));
  return s;
}

SweepResult thm2_experiment(const std::vector<int>& degrees, int trials,
                            const polymodels::ModelSpec& model, std::uint64_t seed, int jobs) {
  if (!polymodels::is_iid_zero_model(model.kind))
    throw ConfigError("sweep: model must be an iid zero model");
  if (degrees.empty()) throw ConfigError("sweep: empty degree list");
  for (std::size_t i = 0; i + 1 < degrees.size(); ++i)
    if (degrees[i] >= degrees[i + 1]) throw ConfigError("sweep: degrees must be strictly increasing");
  if (trials < 1) throw ConfigError("sweep: trials must be >= 1");

  SweepResult result;
  constexpr std::uint64_t kControlStreamOffset = std::uint64_t{1} << 32;

  for (std::size_t d = 0; d < degrees.size(); ++d) {
    const int degree = degrees[d];
    std::vector<TrialRecord> batch(trials);
    polymodels::ModelSpec spec = model;
    spec.degree = degree;
    parallel_trials(trials, jobs, [&](int t) {
      TrialRecord& rec = batch[t];
      rec.trial = static_cast<int>(d) * trials + t;
      rec.degree = degree;
      rec.seed = seed;
      run_trial_body(rec, [&] {
        rng::Stream stream(seed, static_cast<std::uint64_t>(rec.trial));
        auto rep = polymodels::sample_zeros(spec, stream);
        auto tree = lemgeo::build_lemniscate_tree(rep);
        rec.profile = treecore::outdegree_profile(tree);
      });
    });

    SweepRow row;
    row.degree = degree;
    CompensatedSum sum_y;
    std::map<std::string, long> reasons;
    for (const auto& rec : batch) {
      if (rec.rejected) {
        ++row.rejected;
        ++reasons[rec.reason];
      } else if (rec.profile) {
        ++row.accepted;
        sum_y.add(rec.profile->n2);
      }
    }
    if (static_cast<double>(row.rejected) / trials > 0.2) {
      std::string diag = "sweep: rejection rate above 20% at degree " + std::to_string(degree) + ":";
      for (const auto& [reason, count] : reasons)
        diag += " " + reason + "=" + std::to_string(count);
      throw ExcessiveRejection(diag);
    }
    row.mean_y = row.accepted > 0 ? sum_y.value() / row.accepted : 0.0;
    row.fraction = row.mean_y / (degree - 1);

    // Control arm: uniform trees of size = degree, same fraction denominator
    // as the polynomial arm.
    exactcomb::UniformSampler sampler(degree);
    std::vector<int> control(trials);
    parallel_trials(trials, jobs, [&](int t) {
      rng::Stream stream(seed, kControlStreamOffset + static_cast<std::uint64_t>(d) * trials + t);
      control[t] = treecore::outdegree_profile(sampler.sample(stream)).n2;
    });
    CompensatedSum sum_c;
    for (int x : control) sum_c.add(x);
    row.control_mean = sum_c.value() / trials;
    row.control_fraction = row.control_mean / (degree - 1);
    auto moments = exactcomb::exact_moments(degree);
    row.exact_mean = moments.mean.get_d();
    row.exact_sd = std::sqrt(moments.variance.get_d());

    result.rows.push_back(row);
    result.records.insert(result.records.end(), batch.begin(), batch.end());
  }

  std::vector<double> lx, ly;
  for (const auto& row : result.rows)
    if (row.mean_y > 0) {
      lx.push_back(std::log(static_cast<double>(row.degree)));
      ly.push_back(std::log(row.mean_y));
    }
  result.loglog = linear_fit(lx, ly);
  result.summary = summarize_profiles(result.records);
  result.summary.regression = result.loglog;
  return result;
}

ChebyshevTableResult chebyshev_table(int max_degree, int step, int trials, std::uint64_t seed,
                                     int jobs) {
  if (trials < 30) throw ConfigError("chebyshev-table: trials must be >= 30");
  if (step < 1 || max_degree < 10) throw ConfigError("chebyshev-table: need step >= 1, max_degree >= 10");

  ChebyshevTableResult result;
  for (int degree = 10; degree <= max_degree; degree += step) result.degrees.push_back(degree);

  for (std::size_t d = 0; d < result.degrees.size(); ++d) {
    const int degree = result.degrees[d];
    std::vector<TrialRecord> batch(trials);
    parallel_trials(trials, jobs, [&](int t) {
      TrialRecord& rec = batch[t];
      rec.trial = static_cast<int>(d) * trials + t;
      rec.degree = degree;
      rec.seed = seed;
      run_trial_body(rec, [&] {
        rng::Stream stream(seed, static_cast<std::uint64_t>(rec.trial));
        perturbed_chebyshev_trial(degree, stream, rec);
      });
    });
    long accepted = 0, rejected = 0;
    CompensatedSum sum;
    for (const auto& rec : batch) {
      if (rec.rejected) {
        ++rejected;
      } else if (rec.profile) {
        ++accepted;
        sum.add(rec.profile->n2);
      }
    }
    if (static_cast<double>(rejected) / trials > 0.2)
      throw ExcessiveRejection("chebyshev-table: rejection rate above 20% at degree " +
                               std::to_string(degree));
    result.mean_n2.push_back(accepted > 0 ? sum.value() / accepted : 0.0);
    result.records.insert(result.records.end(), batch.begin(), batch.end());
  }

  std::vector<double> x(result.degrees.begin(), result.degrees.end());
  result.fit = linear_fit(x, result.mean_n2);
  result.summary = summarize_profiles(result.records);
  result.summary.regression = result.fit;
  return result;
}

PairingResult pairing_experiment(const polymodels::ModelSpec& model, int trials, double r,
                                 std::uint64_t seed, int jobs, bool trace_petals) {
  if (!polymodels::is_iid_zero_model(model.kind))
    throw ConfigError("pairing: model must be an iid zero model");
  if (trials < 1) throw ConfigError("pairing: trials must be >= 1");
  PairingResult result;
  result.records.resize(trials);
  parallel_trials(trials, jobs, [&](int t) {
    TrialRecord& rec = result.records[t];
    rec.trial = t;
    rec.degree = model.degree;
    rec.seed = seed;
    run_trial_body(rec, [&] {
      rng::Stream stream(seed, static_cast<std::uint64_t>(t));
      auto rep = polymodels::sample_zeros(model, stream);
      rec.pairing = lemgeo::pairing_stats(rep, r, trace_petals);
    });
  });

  SummaryStats s;
  CompensatedSum paired, small;
  long with_small = 0;
  for (const auto& rec : result.records) {
    if (rec.rejected) {
      ++s.rejected;
      ++s.rejection_reasons[rec.reason];
    } else if (rec.pairing) {
      ++s.accepted;
      paired.add(rec.pairing->paired_fraction);
      if (rec.pairing->traced_components > 0) {
        small.add(rec.pairing->small_petal_fraction);
        ++with_small;
      }
    }
  }
  long total = s.accepted + s.rejected;
  s.rejection_rate = total > 0 ? static_cast<double>(s.rejected) / total : 0.0;
  result.mean_paired_fraction = s.accepted > 0 ? paired.value() / s.accepted : 0.0;
  result.mean_small_petal_fraction = with_small > 0 ? small.value() / with_small : 0.0;
  s.mean = result.mean_paired_fraction;
  result.summary = s;
  return result;
}

void emit_lemniscate_plot(const lemgeo::PolynomialRep& p, const std::string& out_path) {
  lemgeo::PolynomialRep rep = p;
  rep.ensure_zeros();
  auto crit = lemgeo::critical_points(rep);
  if (!crit.converged) throw lemgeo::NumericError("trace: critical points did not converge");
  auto gen = lemgeo::genericity_check(rep, crit);
  if (!gen.generic) throw lemgeo::NonGenericPolynomial("trace: polynomial is not generic");

  nlohmann::ordered_json out;
  out["degree"] = rep.degree();
  out["zeros"] = nlohmann::json::array();
  for (const auto& zero : rep.zeros()) out["zeros"].push_back({zero.real(), zero.imag()});
  out["components"] = nlohmann::json::array();
  out["partial"] = false;

  for (int r = 0; r < static_cast<int>(crit.points.size()); ++r) {
    int idx = crit.order[r];
    try {
      auto petals = lemgeo::trace_singular_component_log(rep, crit.points[idx], crit.log_values[idx]);
      nlohmann::ordered_json comp;
      comp["rank"] = r + 1;
      comp["critical_point"] = {crit.points[idx].real(), crit.points[idx].imag()};
      comp["level"] = crit.values[idx];
      comp["log_level"] = crit.log_values[idx];
      comp["petals"] = nlohmann::json::array();
      comp["enclosed"] = nlohmann::json::array();
      comp["winding"] = nlohmann::json::array();
      for (auto& petal : petals) {
        auto enclosed = lemgeo::zeros_in_petal(rep, petal);
        nlohmann::ordered_json poly = nlohmann::ordered_json::array();
        for (const auto& v : petal.vertices) poly.push_back({v.real(), v.imag()});
        comp["petals"].push_back(std::move(poly));
        comp["enclosed"].push_back(nlohmann::ordered_json(enclosed));
        comp["winding"].push_back(petal.winding_count);
      }
      out["components"].push_back(std::move(comp));
    } catch (const lemgeo::NumericError& e) {
      out["partial"] = true;
      out["error"] = e.what();
    }
  }

  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw ConfigError("trace: cannot open output path " + out_path);
  file << out.dump(1) << '\n';
}

namespace {

std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string trial_records_csv(const std::vector<TrialRecord>& records, bool with_pairing) {
  std::string out = "trial,degree,seed,rejected,reason,n0,n1,n2";
  if (with_pairing) out += ",paired_fraction,small_petal_fraction";
  out += '\n';
  for (const auto& rec : records) {
    out += std::to_string(rec.trial);
    out += ',';
    out += std::to_string(rec.degree);
    out += ',';
    out += std::to_string(rec.seed);
    out += ',';
    out += rec.rejected ? '1' : '0';
    out += ',';
    out += rec.reason;
    if (rec.profile) {
      out += ',' + std::to_string(rec.profile->n0) + ',' + std::to_string(rec.profile->n1) + ',' +
             std::to_string(rec.profile->n2);
    } else {
      out += ",,,";
    }
    if (with_pairing) {
      if (rec.pairing) {
        out += ',' + format_double(rec.pairing->paired_fraction) + ',' +
               format_double(rec.pairing->small_petal_fraction);
      } else {
        out += ",,";
      }
    }
    out += '\n';
  }
  return out;
}

namespace {

nlohmann::ordered_json summary_to_json_obj(const SummaryStats& s) {
  nlohmann::ordered_json j;
  j["accepted"] = s.accepted;
  j["rejected"] = s.rejected;
  j["rejection_rate"] = s.rejection_rate;
  j["rejection_reasons"] = nlohmann::ordered_json::object();
  for (const auto& [reason, count] : s.rejection_reasons) j["rejection_reasons"][reason] = count;
  j["mean"] = s.mean;
  j["variance"] = s.variance;
  j["std_error"] = s.std_error;
  j["histogram"] = nlohmann::ordered_json::object();
  for (const auto& [value, count] : s.histogram) j["histogram"][std::to_string(value)] = count;
  if (s.ks) j["ks"] = *s.ks;
  if (s.regression) {
    j["regression"] = {{"slope", s.regression->slope},
                       {"intercept", s.regression->intercept},
                       {"r2", s.regression->r2}};
  }
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open output path " + path);
  file << text;
}

void emit_summary(const ExperimentConfig& config, const nlohmann::ordered_json& j) {
  std::string text = j.dump(1) + "\n";
  if (config.out_json.empty())
    std::fputs(text.c_str(), stdout);
  else
    write_text(config.out_json, text);
}

}  // namespace

std::string summary_json(const SummaryStats& s) { return summary_to_json_obj(s).dump(1) + "\n"; }

int run(const ExperimentConfig& config) {
  try {
    switch (config.kind) {
      case ExperimentKind::coeffs: {
        if (config.n_max < 0) throw ConfigError("coeffs: n-max must be >= 0");
        auto table = exactcomb::CoefficientTable::expand_f(config.n_max);
        std::string csv = "n,k,a\n";
        for (int n = 0; n <= table.n_max(); ++n) {
          const auto& row = table.row(n);
          for (std::size_t k = 0; k < row.size(); ++k)
            csv += std::to_string(n) + ',' + std::to_string(k) + ',' + row[k].get_str() + '\n';
        }
        if (config.out_path.empty()) throw ConfigError("coeffs: --out required");
        write_text(config.out_path, csv);
        return 0;
      }
      case ExperimentKind::sample_tree: {
        if (config.size < 1) throw ConfigError("sample-tree: size must be >= 1");
        if (config.count < 1) throw ConfigError("sample-tree: count must be >= 1");
        exactcomb::UniformSampler sampler(config.size);
        std::string out;
        for (int i = 0; i < config.count; ++i) {
          rng::Stream stream(config.master_seed, static_cast<std::uint64_t>(i));
          out += treecore::tree_to_json(sampler.sample(stream)) + "\n";
        }
        if (config.out_path.empty())
          std::fputs(out.c_str(), stdout);
        else
          write_text(config.out_path, out);
        return 0;
      }
      case ExperimentKind::clt: {
        auto summary = clt_experiment(config.size, config.trials, config.master_seed, config.jobs);
        emit_summary(config, summary_to_json_obj(summary));
        return 0;
      }
      case ExperimentKind::simulate: {
        if (!config.model) throw ConfigError("simulate: --model required");
        auto result = simulate(*config.model, config.trials, config.master_seed, config.jobs);
        if (!config.out_csv.empty()) write_text(config.out_csv, trial_records_csv(result.records, false));
        emit_summary(config, summary_to_json_obj(result.summary));
        return 0;
      }
      case ExperimentKind::sweep: {
        if (!config.model) throw ConfigError("sweep: --model required");
        auto result =
            thm2_experiment(config.degrees, config.trials, *config.model, config.master_seed, config.jobs);
        if (!config.out_csv.empty()) write_text(config.out_csv, trial_records_csv(result.records, false));
        nlohmann::ordered_json j = summary_to_json_obj(result.summary);
        j["rows"] = nlohmann::ordered_json::array();
        for (const auto& row : result.rows) {
          j["rows"].push_back({{"degree", row.degree},
                               {"accepted", row.accepted},
                               {"rejected", row.rejected},
                               {"mean_y", row.mean_y},
                               {"fraction", row.fraction},
                               {"control_mean", row.control_mean},
                               {"control_fraction", row.control_fraction},
                               {"exact_mean", row.exact_mean},
                               {"exact_sd", row.exact_sd}});
        }
        emit_summary(config, j);
        return 0;
      }
      case ExperimentKind::chebyshev_table: {
        auto result = chebyshev_table(config.max_degree, config.step, config.trials,
                                      config.master_seed, config.jobs);
        if (!config.out_csv.empty()) write_text(config.out_csv, trial_records_csv(result.records, false));
        nlohmann::ordered_json j = summary_to_json_obj(result.summary);
        j["table"] = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < result.degrees.size(); ++i)
          j["table"].push_back({{"degree", result.degrees[i]}, {"mean_n2", result.mean_n2[i]}});
        emit_summary(config, j);
        return 0;
      }
      case ExperimentKind::trace: {
        if (config.poly_path.empty() || config.out_path.empty())
          throw ConfigError("trace: --poly and --out required");
        std::ifstream in(config.poly_path);
        if (!in) throw ConfigError("trace: cannot open " + config.poly_path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        auto p = lemgeo::PolynomialRep::from_json(text);
        emit_lemniscate_plot(p, config.out_path);
        return 0;
      }
      case ExperimentKind::pairing: {
        if (!config.model) throw ConfigError("pairing: --model required");
        polymodels::ModelSpec model = *config.model;
        model.degree = config.degree > 0 ? config.degree : model.degree;
        auto result = pairing_experiment(model, config.trials, config.pairing_radius,
                                         config.master_seed, config.jobs);
        if (!config.out_csv.empty()) write_text(config.out_csv, trial_records_csv(result.records, true));
        nlohmann::ordered_json j = summary_to_json_obj(result.summary);
        j["mean_paired_fraction"] = result.mean_paired_fraction;
        j["mean_small_petal_fraction"] = result.mean_small_petal_fraction;
        emit_summary(config, j);
        return 0;
      }
    }
    throw ConfigError("run: unknown experiment kind");
  } catch (const ExcessiveRejection& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const lemgeo::NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
}

}  // namespace lemtree::exprunner
