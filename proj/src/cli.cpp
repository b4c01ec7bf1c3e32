#include "holonom/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>

#include <CLI11.hpp>

#include "holonom/io.hpp"
#include "holonom/randmat.hpp"

namespace holonom::cli {

namespace {

constexpr Eigen::Index kMaxBracketDim = 12;

class UsageError : public Error {
 public:
  using Error::Error;
};

bool ci_mode() {
  const char* v = std::getenv("HOLONOM_CI");
  return v != nullptr && std::string(v) == "1";
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  if (ci_mode()) throw UsageError("--seed is required when HOLONOM_CI=1");
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

Json controllability_json(const ControlProblem& problem, ControllabilityReport& rep,
                          std::ostream& err) {
  Json j;
  j["dim"] = problem.dim();
  if (problem.dim() <= kMaxBracketDim) {
    rep = bracket_generation_dim(problem);
    j["algebra_dim"] = rep.algebra_dim;
    j["saturated"] = rep.saturated;
    j["depth_reached"] = rep.depth_reached;
  } else {
    j["bracket_skipped"] = true;
  }
  try {
    rep.kac_satisfied = kac_check(problem);
  } catch (const DegenerateEigenbasisWarning& w) {
    rep.kac_satisfied = false;
    j["kac_warning"] = w.what();
    err << "warning: " << w.what() << "\n";
  }
  if (problem.dim() > kMaxBracketDim) {
    // Kac is only sufficient; without the bracket check it is all we have.
    rep.full_su_n_plus_phase = rep.kac_satisfied;
  }
  j["full_u_n"] = rep.full_u_n;
  j["full_su_n_plus_phase"] = rep.full_su_n_plus_phase;
  j["kac_satisfied"] = rep.kac_satisfied;
  return j;
}

int cmd_check(const std::string& problem_path, std::ostream& out, std::ostream& err) {
  const ControlProblem problem = problem_from_json(read_json_file(problem_path));
  ControllabilityReport rep;
  const Json j = controllability_json(problem, rep, err);
  out << j.dump(2) << "\n";
  return rep.full_su_n_plus_phase ? kExitOk : kExitFailure;
}

struct SeedOptions {
  std::string problem;
  int starts = 100;
  std::optional<std::uint64_t> seed;
  std::string start_file;
  int threads = 0;
};

int cmd_seed(const SeedOptions& o, std::ostream& out, std::ostream&) {
  if (o.starts < 1) throw UsageError("--starts must be >= 1");
  const ControlProblem problem = problem_from_json(read_json_file(o.problem));
  const std::uint64_t master = resolve_seed(o.seed);

  MultiStartResult ms;
  if (!o.start_file.empty()) {
    SeedParams start = seed_from_json(read_json_file(o.start_file));
    start.mode = problem.mode;
    ms.runs.push_back(find_seed(problem, start));
    if (o.starts > 1) {
      MultiStartResult rest = multi_start(problem, o.starts - 1, master, {}, o.threads);
      ms.runs.insert(ms.runs.end(), rest.runs.begin(), rest.runs.end());
    }
    ms.best_fn = ms.runs.front().achieved_fn;
    for (std::size_t k = 0; k < ms.runs.size(); ++k) {
      ms.best_fn = std::min(ms.best_fn, ms.runs[k].achieved_fn);
      if (ms.runs[k].converged) {
        ++ms.successes;
        if (!ms.first_converged) ms.first_converged = k;
      }
    }
    ms.success_fraction = static_cast<double>(ms.successes) / static_cast<double>(ms.runs.size());
  } else {
    ms = multi_start(problem, o.starts, master, {}, o.threads);
  }

  Json j;
  j["master_seed"] = master;
  j["problem_hash"] = problem_hash(problem);
  j["attempted"] = ms.runs.size();
  j["successes"] = ms.successes;
  j["success_fraction"] = ms.success_fraction;
  j["best_fn"] = ms.best_fn;
  if (ms.first_converged) {
    j["start_index"] = *ms.first_converged;
    j["seed"] = seed_to_json(ms.runs[*ms.first_converged]);
  } else {
    std::size_t best = 0;
    for (std::size_t k = 1; k < ms.runs.size(); ++k) {
      if (ms.runs[k].achieved_fn < ms.runs[best].achieved_fn) best = k;
    }
    j["start_index"] = best;
    j["seed"] = seed_to_json(ms.runs[best]);
  }
  out << j.dump(2) << "\n";
  return ms.first_converged ? kExitOk : kExitFailure;
}

struct SynthOptions {
  std::string problem;
  std::string target;
  std::string output;
  double tol = 1e-8;
  int n_start = 0;
  bool positive_timings = false;
  double tau_min = 0.0;
  int starts = 100;
  int seed_attempts = 3;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

int cmd_synth(const SynthOptions& o, std::ostream& out, std::ostream& err) {
  if (!(o.tol > 0.0)) throw UsageError("--tol must be positive");
  if (o.starts < 1) throw UsageError("--starts must be >= 1");
  const ControlProblem problem = problem_from_json(read_json_file(o.problem));
  const TargetSpec target = target_from_json(read_json_file(o.target), problem.dim());
  const std::uint64_t master = resolve_seed(o.seed);

  ControllabilityReport ctrl;
  std::ostringstream ctrl_err;
  controllability_json(problem, ctrl, ctrl_err);
  if (!ctrl.full_su_n_plus_phase) {
    err << "error: problem is not controllable (algebra dimension " << ctrl.algebra_dim << " < "
        << problem.dim() * problem.dim() - 1 << ")\n";
    return kExitFailure;
  }
  if (!ctrl.kac_satisfied) err << "warning: Kac criterion fails, bracket generation holds\n";

  const MultiStartResult ms = multi_start(problem, o.starts, master, {}, o.threads);
  if (!ms.first_converged) {
    err << "error: no seed converged in " << o.starts << " starts (best F_N = " << ms.best_fn
        << ")\n";
    return kExitFailure;
  }

  SynthesisOptions sopt;
  sopt.tol = o.tol;
  sopt.positive_timings = o.positive_timings;
  sopt.tau_min = o.tau_min;

  int attempts = 0;
  std::string last_failure;
  for (const SeedParams& seed : ranked_seeds(problem, ms, sopt)) {
    if (attempts++ >= o.seed_attempts) break;
    const PulseSequence identity = build_identity_seed(problem, seed);
    try {
      const SynthesisResult res = continuation(problem, identity, target.unitary, o.n_start, sopt);
      ResultFile rf;
      rf.version = version_string();
      rf.master_seed = master;
      rf.problem_hash = problem_hash(problem);
      rf.sequence = res.sequence;
      rf.n_star = res.report.n_star;
      rf.tol = o.tol;
      rf.acceptance_tol = o.tol * res.report.n_star;
      rf.final_error = res.report.final_error;
      rf.seed = seed;
      rf.report = res.report;
      const std::string text = result_to_json(rf).dump(2) + "\n";
      if (o.output.empty()) {
        out << text;
      } else {
        std::ofstream f(o.output);
        if (!f) throw InputError("cannot write '" + o.output + "'");
        f << text;
      }
      err << "n_star = " << rf.n_star << ", final_error = " << rf.final_error << "\n";
      return kExitOk;
    } catch (const SynthesisError& e) {
      last_failure = e.what();
      err << "seed attempt " << attempts << " failed: " << e.what() << "\n";
    }
  }
  err << "error: target unreachable: " << last_failure << "\n";
  return kExitFailure;
}

int cmd_verify(const std::string& problem_path, const std::string& result_path,
               const std::string& target_path, std::ostream& out, std::ostream& err) {
  const ControlProblem problem = problem_from_json(read_json_file(problem_path));
  const ResultFile rf = result_from_json(read_json_file(result_path));
  const std::string hash = problem_hash(problem);
  if (hash != rf.problem_hash) {
    err << "error: problem hash mismatch (" << hash << " vs " << rf.problem_hash << ")\n";
    return kExitUsage;
  }
  const TargetSpec target = target_from_json(read_json_file(target_path), problem.dim());
  double error;
  try {
    error = phase_aligned_distance(repeated_evolution(problem, rf.sequence, rf.n_star), target.unitary);
  } catch (const MalformedSequence& e) {
    throw InputError(std::string("result pulses: ") + e.what());
  }
  const bool ok = error <= rf.acceptance_tol;
  Json j{{"error", error},
         {"recorded_final_error", rf.final_error},
         {"acceptance_tol", rf.acceptance_tol},
         {"repetitions", rf.n_star},
         {"ok", ok}};
  out << j.dump(2) << "\n";
  if (!ok) err << "error: distance to target " << error << " exceeds " << rf.acceptance_tol << "\n";
  return ok ? kExitOk : kExitFailure;
}

struct SpectrumOptions {
  std::string source = "haar";
  int dim = 4;
  int samples = 100;
  std::optional<std::uint64_t> seed;
  std::string problem;
  std::string params;
};

int cmd_spectrum(const SpectrumOptions& o, std::ostream& out, std::ostream&) {
  if (o.samples < 1) throw UsageError("--samples must be >= 1");
  if (o.dim < 1) throw UsageError("--dim must be >= 1");
  const SpectrumSource source = spectrum_source_from_string(o.source);
  const std::uint64_t master = resolve_seed(o.seed);

  std::optional<ControlProblem> fixed_problem;
  std::optional<SeedParams> fixed_params;
  if (!o.problem.empty()) fixed_problem = problem_from_json(read_json_file(o.problem));
  if (!o.params.empty()) {
    if (!fixed_problem) throw UsageError("--params needs --problem");
    fixed_params = seed_from_json(read_json_file(o.params));
  }
  const Eigen::Index n = fixed_problem ? fixed_problem->dim() : o.dim;

  std::vector<SpectralSample> samples;
  samples.reserve(static_cast<std::size_t>(o.samples));
  for (int s = 0; s < o.samples; ++s) {
    Rng rng(derive_seed(master, static_cast<std::uint64_t>(s)));
    switch (source) {
      case SpectrumSource::HaarUnitary:
        samples.push_back(spectral_sample(sample_haar_unitary(n, rng), source));
        break;
      case SpectrumSource::PoissonPhases:
        samples.push_back(sample_poisson_phases(n, rng));
        break;
      case SpectrumSource::PulseProduct: {
        ControlProblem problem = fixed_problem
                                     ? *fixed_problem
                                     : timing_problem(sample_gue(n, 1.0, rng), sample_gue(n, 1.0, rng));
        SeedParams params = fixed_params ? *fixed_params : random_start(problem, rng);
        samples.push_back(spectral_sample(product_of_n(problem, params), source));
        break;
      }
    }
  }

  const SpacingSummary sum = spacing_statistics(samples);
  out << std::setprecision(17);
  out << "# source=" << o.source << " dim=" << n << " samples=" << o.samples
      << " seed=" << master << "\n";
  out << "# mean_spacing=" << sum.mean_spacing << "\n";
  out << "# spacing_variance=" << sum.spacing_variance << "\n";
  out << "# min_spacing_fraction=" << sum.min_spacing_fraction << "\n";
  out << "index,phase,source\n";
  for (std::size_t s = 0; s < samples.size(); ++s) {
    for (double phase : samples[s].eigenphases) out << s << "," << phase << "," << o.source << "\n";
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bang-bang pulse synthesis for unitary control", "holonom"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  auto* check = app.add_subcommand("check", "Lie-algebraic controllability of a problem");
  std::string check_problem;
  check->add_option("problem", check_problem, "problem JSON")->required();

  SeedOptions seed_opt;
  auto* seed = app.add_subcommand("seed", "multi-start search for a root-of-identity seed");
  seed->add_option("problem", seed_opt.problem, "problem JSON")->required();
  seed->add_option("--starts", seed_opt.starts, "number of random starts");
  seed->add_option("--seed", seed_opt.seed, "master RNG seed");
  seed->add_option("--start", seed_opt.start_file, "JSON with initial values for the first start");
  seed->add_option("--threads", seed_opt.threads, "worker threads (0 = hardware)");

  SynthOptions synth_opt;
  auto* synth = app.add_subcommand("synth", "synthesize a pulse sequence reaching a target");
  synth->add_option("problem", synth_opt.problem, "problem JSON")->required();
  synth->add_option("target", synth_opt.target, "target JSON")->required();
  synth->add_option("-o,--output", synth_opt.output, "result file (default stdout)");
  synth->add_option("--tol", synth_opt.tol, "Newton tolerance per fractional step");
  synth->add_option("--n-start", synth_opt.n_start, "initial splitting index (0 = auto)");
  synth->add_flag("--positive-timings", synth_opt.positive_timings, "penalize timings below --tau-min");
  synth->add_option("--tau-min", synth_opt.tau_min, "lower timing bound for --positive-timings");
  synth->add_option("--starts", synth_opt.starts, "random starts for the seed search");
  synth->add_option("--seed-attempts", synth_opt.seed_attempts, "converged seeds to try");
  synth->add_option("--seed", synth_opt.seed, "master RNG seed");
  synth->add_option("--threads", synth_opt.threads, "worker threads (0 = hardware)");

  auto* verify = app.add_subcommand("verify", "re-evaluate a result against its target");
  std::string v_problem, v_result, v_target;
  verify->add_option("problem", v_problem, "problem JSON")->required();
  verify->add_option("result", v_result, "result JSON")->required();
  verify->add_option("target", v_target, "target JSON")->required();

  SpectrumOptions spec_opt;
  auto* spectrum = app.add_subcommand("spectrum", "eigenphase samples as CSV");
  spectrum->add_option("--source", spec_opt.source, "haar | product | poisson")
      ->check(CLI::IsMember({"haar", "product", "poisson"}));
  spectrum->add_option("--dim", spec_opt.dim, "matrix dimension");
  spectrum->add_option("--samples", spec_opt.samples, "number of samples");
  spectrum->add_option("--seed", spec_opt.seed, "master RNG seed");
  spectrum->add_option("--problem", spec_opt.problem, "problem JSON for the product source");
  spectrum->add_option("--params", spec_opt.params, "seed JSON with fixed base parameters");

  std::vector<const char*> argv{"holonom"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*check) return cmd_check(check_problem, out, err);
    if (*seed) return cmd_seed(seed_opt, out, err);
    if (*synth) return cmd_synth(synth_opt, out, err);
    if (*verify) return cmd_verify(v_problem, v_result, v_target, out, err);
    if (*spectrum) return cmd_spectrum(spec_opt, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Json::exception& e) {
    err << "input error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DimensionMismatch& e) {
    err << "input error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace holonom::cli
