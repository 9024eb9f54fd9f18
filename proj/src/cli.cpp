#include "ticklab/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ticklab/certbound.hpp"
#include "ticklab/continuum.hpp"
#include "ticklab/heurisearch.hpp"
#include "ticklab/json_io.hpp"
#include "ticklab/stats.hpp"
#include "ticklab/witness.hpp"

namespace ticklab::cli {
namespace {

struct ModelFlags {
  std::string model;
  int d = 2;
  int k = 1;
  double q = 0.5;
  double u = 0.5;
  std::optional<std::uint64_t> shift;  // multicyclic start state for this L
};

struct Settings {
  std::string config;
  std::string output;
  std::string format = "json";
  int threads = 1;
  ModelFlags model;
  std::uint64_t prefix = 10;
  std::uint64_t horizon = 50;
  std::optional<std::uint64_t> length;
  std::optional<double> certified;
  // bound
  int d = 2;
  std::uint64_t bound_length = 3;
  double err = 1e-2;
  double delta0 = 0.05;
  int refine_factor = 5;
  std::uint64_t max_points = 400'000'000;
  bool timing = false;
  // search
  std::string objective = "pl";
  int restarts = 100;
  int steps = 10000;
  double lr = 0.005;
  std::uint64_t seed = 1;
  std::string trace_path;
  // limit
  std::string family = "oneway";
  double alpha = 1.0;
  std::vector<double> deltas{4e-4, 2e-4, 1e-4};
  // table
  std::string table;
  int grid = 201;
};

// Flat "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int number = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::InvalidArgument,
                  path + ":" + std::to_string(number) + ": expected key = value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoConvergence:
    case ErrorKind::RouteMismatch:
      return kExitIncomplete;
    default:
      return kExitInput;
  }
}

ClockModel load_model(const ModelFlags& f) {
  if (f.model.empty()) throw Error(ErrorKind::InvalidArgument, "--model is required");
  if (f.model.rfind("file:", 0) == 0) {
    const std::string path = f.model.substr(5);
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open model file '" + path + "'");
    Json j;
    try {
      in >> j;
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::InvalidArgument, std::string("model file is not JSON: ") + e.what());
    }
    return models::model_from_json(j);
  }
  Json j{{"kind", f.model}, {"d", f.d}, {"k", f.k}, {"q", f.q}, {"u", f.u}};
  if (f.shift) j["L"] = *f.shift;
  return models::model_from_json(j);
}

void add_model_flags(CLI::App* sub, Settings& s) {
  sub->add_option("--model", s.model.model,
                  "multicyclic | oneway | cyclic | qubit | qutrit | file:PATH");
  sub->add_option("--d", s.model.d, "dimension");
  sub->add_option("--k", s.model.k, "multicyclic block size");
  sub->add_option("--q", s.model.q, "cycle probability or measurement strength");
  sub->add_option("--u", s.model.u, "rotation parameter");
  sub->add_option("--shift", s.model.shift, "shift the multicyclic start state for this L");
}

class Emitter {
 public:
  Emitter(const Settings& s, std::ostream& out) : settings_(s), out_(out) {}

  void json(const Json& value) { write(dump_json(value) + "\n"); }
  void text(const std::string& s) { write(s); }

 private:
  void write(const std::string& s) {
    if (settings_.output.empty()) {
      out_ << s;
      return;
    }
    std::ofstream file(settings_.output);
    if (!file) throw Error(ErrorKind::InvalidArgument, "cannot write '" + settings_.output + "'");
    file << s;
  }

  const Settings& settings_;
  std::ostream& out_;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int cmd_stats(const Settings& s, Emitter& emit) {
  const ClockModel model = load_model(s.model);
  TickStatistics st = stats::moments(model);
  for (std::uint64_t l = 1; l <= s.prefix; ++l) st.pmf_prefix.push_back(stats::pmf(model, l));
  if (s.format == "csv") {
    emit.text("mu,sigma2,accuracy,accuracy_infinite,method\n" + fmt(st.mu) + "," + fmt(st.sigma2) + "," +
              (st.accuracy_infinite ? std::string("inf") : fmt(st.accuracy)) + "," +
              (st.accuracy_infinite ? "true" : "false") + "," + std::string(to_string(st.method)) + "\n");
  } else {
    Json j = to_json(st);
    j["model"] = models::to_json(model);
    emit.json(j);
  }
  return kExitOk;
}

int cmd_pmf(const Settings& s, Emitter& emit) {
  const ClockModel model = load_model(s.model);
  const SurvivalSeries f = stats::survival_series(model, s.horizon);
  if (s.format == "csv") {
    std::ostringstream os;
    stats::write_pmf_csv(os, f);
    emit.text(os.str());
  } else {
    RealVector p;
    for (std::size_t l = 1; l < f.size(); ++l) p.push_back(std::max(0.0, f[l - 1] - f[l]));
    emit.json({{"pmf", p}, {"survival", f}, {"model", models::to_json(model)}});
  }
  return kExitOk;
}

int cmd_witness(const Settings& s, Emitter& emit) {
  const ClockModel model = load_model(s.model);
  const WitnessReport r = s.length ? witness::finite_length_witness(model, *s.length, s.certified)
                                   : witness::accuracy_witness_report(model);
  emit.json(to_json(r));
  return kExitOk;
}

int cmd_bound(const Settings& s, Emitter& emit, std::ostream& err) {
  certbound::BoundOptions opt;
  opt.target_error = s.err;
  opt.delta0 = s.delta0;
  opt.refine_factor = s.refine_factor;
  opt.threads = s.threads;
  opt.max_points_per_stage = s.max_points;
  opt.progress = [&err](const StageRecord& r) {
    err << "stage delta=" << fmt(r.delta) << " evaluated=" << r.evaluated << " surviving=" << r.surviving
        << " incumbent=" << fmt(r.incumbent) << " upper_bound=" << fmt(r.upper_bound) << "\n";
  };
  const BoundCertificate cert = certbound::certified_upper_bound(s.d, s.bound_length, opt);
  Json j = to_json(cert, s.timing);
  j["toolversion"] = kToolVersion;
  j["seed"] = nullptr;  // the lattice sweep uses no randomness
  emit.json(j);
  if (cert.partial) {
    err << "certificate is partial: stage budget of " << s.max_points << " points exceeded\n";
    return kExitIncomplete;
  }
  return kExitOk;
}

int cmd_search(const Settings& s, Emitter& emit, std::ostream& err) {
  heurisearch::AdamOptions opt;
  opt.restarts = s.restarts;
  opt.steps = s.steps;
  opt.learning_rate = s.lr;
  opt.seed = s.seed;
  opt.threads = s.threads;
  Json j;
  SearchResult result;
  if (s.objective == "pl") {
    if (!s.length) throw Error(ErrorKind::InvalidArgument, "--L is required for --objective pl");
    result = heurisearch::search_pL(s.d, *s.length, opt);
    j = to_json(result);
    j["L"] = *s.length;
    const auto est = witness::classical_bound_estimate(s.d, *s.length);
    j["multicyclic_estimate"] = est.omega;
    j["relative_gap"] = (est.omega - result.best_objective) / est.omega;
  } else if (s.objective == "F") {
    const heurisearch::FSearch fs = heurisearch::search_F(s.d, opt);
    result = fs.result;
    j = to_json(result);
    j["candidate_violation"] = fs.candidate_violation;
    j["confirmed_violation"] = fs.confirmed_violation;
    if (fs.candidate_violation) j["resolvent_witness"] = fs.resolvent_witness;
    j["witness_status"] = s.d <= 2 ? "proven" : "conjectured";
    if (fs.confirmed_violation) err << "accuracy witness violated by the best model: conjecture-breaking\n";
  } else {
    throw Error(ErrorKind::InvalidArgument, "--objective must be pl or F");
  }
  if (!s.trace_path.empty()) {
    std::ofstream trace(s.trace_path);
    if (!trace) throw Error(ErrorKind::InvalidArgument, "cannot write '" + s.trace_path + "'");
    trace << "restart,initial,final,best\n";
    for (std::size_t r = 0; r < result.trace.size(); ++r) {
      const RestartTrace& t = result.trace[r];
      trace << r << ',' << fmt(t.initial) << ',' << fmt(t.final) << ',' << fmt(t.best) << '\n';
    }
  }
  emit.json(j);
  return kExitOk;
}

int cmd_limit(const Settings& s, Emitter& emit) {
  Json j;
  if (s.family == "qubit" || s.family == "qidentity") {
    const continuum::QuantumFamily fam =
        s.family == "qubit" ? continuum::qubit_family(s.alpha) : continuum::quantum_identity_family(2);
    const QuantumLimitReport r = continuum::quantum_generator_limit(fam, s.deltas);
    j = to_json(r);
    j["family"] = s.family;
  } else {
    continuum::ClassicalFamily fam;
    if (s.family == "oneway") {
      fam = continuum::oneway_family(s.model.d, s.alpha);
    } else if (s.family == "cyclic") {
      fam = continuum::cyclic_family(s.model.d, s.model.q);
    } else if (s.family == "identity") {
      fam = continuum::identity_family(s.model.d);
    } else {
      throw Error(ErrorKind::InvalidArgument, "--family must be oneway, cyclic, identity, qubit or qidentity");
    }
    const ClassicalLimitReport r = continuum::classical_generator_limit(fam, s.deltas);
    j = to_json(r);
    j["family"] = s.family;
    if (r.limit_exists) {
      RealVector pi(r.limit.A0.rows(), 0.0);
      pi[0] = 1.0;
      try {
        const TickStatistics st = continuum::continuous_moments_classical(r.limit, pi);
        j["continuous"] = to_json(st);
        j["R_continuous"] = st.accuracy_infinite ? Json(nullptr) : Json(st.accuracy);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NeverTicks) throw;
        j["continuous"] = nullptr;  // e.g. the identity family never ticks
      }
    }
  }
  emit.json(j);
  return kExitOk;
}

int cmd_table(const Settings& s, Emitter& emit) {
  std::ostringstream csv;
  Json j;
  if (s.table == "optk") {
    csv << "d";
    for (int off = 1; off <= 10; ++off) csv << ",L=d+" << off;
    csv << "\n";
    Json rows = Json::array();
    bool all = true;
    for (int d = 3; d <= 10; ++d) {
      std::vector<int> recomputed, reference;
      csv << d;
      for (int off = 1; off <= 10; ++off) {
        recomputed.push_back(witness::classical_bound_estimate(d, static_cast<std::uint64_t>(d + off)).best_k);
        reference.push_back(witness::reference_optimal_k(d, off));
        csv << ',' << recomputed.back();
      }
      csv << "\n";
      all = all && recomputed == reference;
      rows.push_back({{"d", d}, {"recomputed", recomputed}, {"reference", reference},
                      {"match", recomputed == reference}});
    }
    j = {{"table", "optk"}, {"rows", rows}, {"all_match", all}};
  } else if (s.table == "qpca" || s.table == "fig3") {
    const bool fig = s.table == "fig3";
    csv << (fig ? "L,classical_upper_bound,classical_estimate,quantum_family,quantum_optimized\n"
                : "L,reference_quantum,reference_estimate,reference_upper_bound,recomputed_estimate,"
                  "recomputed_quantum_family,recomputed_quantum_optimized,optimized_q,optimized_u\n");
    Json rows = Json::array();
    for (const witness::QpcaRow& ref : witness::reference_qpca()) {
      const double est = witness::classical_bound_estimate(2, ref.L).omega;
      const double family = witness::qubit_family_pmf(ref.L);
      const witness::QuantumOptimum opt = witness::optimize_qubit_pmf(ref.L, s.grid);
      if (fig) {
        csv << ref.L << ',' << fmt(ref.upper_bound) << ',' << fmt(est) << ',' << fmt(family) << ','
            << fmt(opt.value) << "\n";
      } else {
        csv << ref.L << ',' << fmt(ref.quantum) << ',' << fmt(ref.estimate) << ',' << fmt(ref.upper_bound)
            << ',' << fmt(est) << ',' << fmt(family) << ',' << fmt(opt.value) << ',' << fmt(opt.q) << ','
            << fmt(opt.u) << "\n";
      }
      rows.push_back({{"L", ref.L},
                      {"reference", {{"quantum", ref.quantum}, {"estimate", ref.estimate},
                                     {"upper_bound", ref.upper_bound}}},
                      {"recomputed", {{"estimate", est}, {"quantum_family", family},
                                      {"quantum_optimized", opt.value}, {"optimized_q", opt.q},
                                      {"optimized_u", opt.u}}}});
    }
    j = {{"table", s.table}, {"rows", rows}};
  } else {
    throw Error(ErrorKind::InvalidArgument, "table name must be optk, qpca or fig3");
  }
  if (s.format == "csv") {
    emit.text(csv.str());
  } else {
    emit.json(j);
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Settings s;
  if (const char* env = std::getenv("TICKLAB_THREADS")) {
    try {
      s.threads = std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      err << "ignoring TICKLAB_THREADS='" << env << "'\n";
    }
  }

  CLI::App app{"ticklab: ticking-clock statistics, witnesses, bounds and limits", "ticklab"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", s.config, "flat key = value file; command-line flags win");
  app.add_option("--output,-o", s.output, "write the result here instead of stdout");
  app.add_option("--format", s.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", s.threads, "worker threads (default TICKLAB_THREADS or 1)")
      ->check(CLI::PositiveNumber);

  auto* stats_cmd = app.add_subcommand("stats", "mean, variance and accuracy of a model");
  add_model_flags(stats_cmd, s);
  stats_cmd->add_option("--prefix", s.prefix, "number of pmf values to include");

  auto* pmf_cmd = app.add_subcommand("pmf", "tick-time distribution and survival");
  add_model_flags(pmf_cmd, s);
  pmf_cmd->add_option("--N", s.horizon, "last L to print");

  auto* witness_cmd = app.add_subcommand("witness", "accuracy witness, or p(L) against the classical bound");
  add_model_flags(witness_cmd, s);
  witness_cmd->add_option("--L", s.length, "finite-length witness at this L");
  witness_cmd->add_option("--certified", s.certified, "certified classical bound to compare against");

  auto* bound_cmd = app.add_subcommand("bound", "certified upper bound on classical p(L)");
  bound_cmd->add_option("--d", s.d, "dimension (2 or 3)");
  bound_cmd->add_option("--L", s.bound_length, "sequence length");
  bound_cmd->add_option("--err", s.err, "target error");
  bound_cmd->add_option("--delta0", s.delta0, "initial lattice step (1/delta0 integer)");
  bound_cmd->add_option("--refine-factor", s.refine_factor, "step divisor per stage");
  bound_cmd->add_option("--max-points-per-stage", s.max_points, "stage budget");
  bound_cmd->add_flag("--timing", s.timing, "include elapsed seconds in the certificate");

  auto* search_cmd = app.add_subcommand("search", "Adam search over classical machines");
  search_cmd->add_option("--objective", s.objective, "pl or F");
  search_cmd->add_option("--d", s.d, "dimension");
  search_cmd->add_option("--L", s.length, "sequence length for pl");
  search_cmd->add_option("--restarts", s.restarts, "independent restarts");
  search_cmd->add_option("--steps", s.steps, "Adam steps per restart");
  search_cmd->add_option("--lr", s.lr, "learning rate");
  search_cmd->add_option("--seed", s.seed, "base seed");
  search_cmd->add_option("--trace", s.trace_path, "per-restart CSV trace");

  auto* limit_cmd = app.add_subcommand("limit", "continuous-time generator of a family");
  limit_cmd->add_option("--family", s.family, "oneway | cyclic | identity | qubit | qidentity");
  limit_cmd->add_option("--d", s.model.d, "dimension");
  limit_cmd->add_option("--q", s.model.q, "cyclic q");
  limit_cmd->add_option("--alpha", s.alpha, "rate alpha in q = 1 - alpha delta");
  limit_cmd->add_option("--deltas", s.deltas, "decreasing time steps")->delimiter(',');

  auto* table_cmd = app.add_subcommand("table", "reproduce reference tables");
  table_cmd->add_option("name", s.table, "optk, qpca or fig3")->required();
  table_cmd->add_option("--grid", s.grid, "points per axis of the (q,u) grid");

  try {
    app.parse(argc, argv);
    CLI::App* sub = app.get_subcommands().front();
    if (!s.config.empty()) {
      for (const auto& [key, value] : read_config(s.config)) {
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt) opt = app.get_option_no_throw("--" + key);
        if (!opt || key == "config") {
          throw Error(ErrorKind::InvalidArgument, "unknown config key '" + key + "' for " + sub->get_name());
        }
        if (opt->count() == 0) {
          opt->add_result(value);
          opt->run_callback();
        }
      }
    }
    Emitter emit(s, out);
    const std::string name = sub->get_name();
    if (name == "stats") return cmd_stats(s, emit);
    if (name == "pmf") return cmd_pmf(s, emit);
    if (name == "witness") return cmd_witness(s, emit);
    if (name == "bound") return cmd_bound(s, emit, err);
    if (name == "search") return cmd_search(s, emit, err);
    if (name == "limit") return cmd_limit(s, emit);
    return cmd_table(s, emit);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace ticklab::cli
