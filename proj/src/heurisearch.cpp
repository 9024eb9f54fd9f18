#include "ticklab/heurisearch.hpp"

#include <cmath>
#include <random>
#include <thread>

#include "ticklab/certbound.hpp"
#include "ticklab/linalg.hpp"
#include "ticklab/stats.hpp"
#include "ticklab/witness.hpp"

namespace ticklab {

Json to_json(const SearchResult& r) {
  Json trace = Json::array();
  for (const RestartTrace& t : r.trace) {
    trace.push_back({{"initial", t.initial}, {"final", t.final}, {"best", t.best}});
  }
  return Json{{"objective", r.objective},
              {"best_objective", r.best_objective},
              {"best_T0", r.best_T0.data()},
              {"d", r.best_T0.rows()},
              {"best_restart", r.best_restart},
              {"restarts", r.restarts},
              {"steps", r.steps},
              {"learning_rate", r.learning_rate},
              {"seed", r.seed},
              {"objective_trace", trace}};
}

namespace heurisearch {
namespace {

std::vector<double> row_norms(const BParams& b) {
  const std::size_t d = b.B0.rows();
  std::vector<double> n(d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) n[i] += b.B0(i, j) * b.B0(i, j) + b.B1(i, j) * b.B1(i, j);
  return n;
}

BParams zeros_like(const BParams& b) {
  return {RealMatrix(b.B0.rows(), b.B0.cols()), RealMatrix(b.B1.rows(), b.B1.cols())};
}

}  // namespace

ClassicalClock project(const BParams& b) {
  const std::size_t d = b.B0.rows();
  const std::vector<double> n = row_norms(b);
  RealMatrix t(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    if (n[i] == 0.0) continue;
    for (std::size_t j = 0; j < d; ++j) t(i, j) = b.B0(i, j) * b.B0(i, j) / n[i];
  }
  RealVector pi(d, 0.0);
  pi[0] = 1.0;
  return {std::move(t), std::move(pi)};
}

ValueGrad objective_G(const BParams& b, std::uint64_t length) {
  const std::size_t d = b.B0.rows();
  const ClassicalClock clock = project(b);
  ValueGrad out{stats::pmf_classical(clock, length), zeros_like(b)};
  RealMatrix g(d, d);
  if (length >= 2) {
    g = certbound::grad_pL(clock.T0, length);
  } else {
    for (std::size_t j = 0; j < d; ++j) g(0, j) = -1.0;
  }
  const std::vector<double> n = row_norms(b);
  for (std::size_t i = 0; i < d; ++i) {
    if (n[i] == 0.0) continue;
    double weighted = 0.0;
    for (std::size_t j = 0; j < d; ++j) weighted += g(i, j) * clock.T0(i, j);
    for (std::size_t k = 0; k < d; ++k) {
      out.grad.B0(i, k) = 2.0 * b.B0(i, k) / n[i] * (g(i, k) - weighted);
      out.grad.B1(i, k) = -2.0 * b.B1(i, k) / n[i] * weighted;
    }
  }
  return out;
}

double objective_F_value(const BParams& b) {
  const std::size_t d = b.B0.rows();
  const ClassicalClock clock = project(b);
  const RealMatrix adj = linalg::adjugate(RealMatrix::identity(d) - clock.T0);
  const RealVector x = times_col(adj, RealVector(d, 1.0));
  const RealVector y = times_col(adj, x);
  const double first = x[0];
  const double dd = static_cast<double>(d);
  return 2.0 * dd * y[0] - (dd + 1.0) * first * first;
}

ValueGrad finite_difference(const std::function<double(const BParams&)>& f, const BParams& b,
                            double h) {
  ValueGrad out{f(b), zeros_like(b)};
  BParams probe = b;
  auto sweep = [&](RealMatrix& param, RealMatrix& grad) {
    for (std::size_t k = 0; k < param.data().size(); ++k) {
      const double saved = param.data()[k];
      param.data()[k] = saved + h;
      const double up = f(probe);
      param.data()[k] = saved - h;
      const double down = f(probe);
      param.data()[k] = saved;
      grad.data()[k] = (up - down) / (2.0 * h);
    }
  };
  sweep(probe.B0, out.grad.B0);
  sweep(probe.B1, out.grad.B1);
  return out;
}

ValueGrad objective_F(const BParams& b, double h) { return finite_difference(objective_F_value, b, h); }

SearchResult adam_minimize(const Objective& objective, int d, const AdamOptions& opt) {
  if (d <= 0) throw Error(ErrorKind::InvalidArgument, "d must be positive");
  if (opt.steps < 1) throw Error(ErrorKind::InvalidArgument, "steps must be >= 1");
  if (!(opt.learning_rate > 0.0)) throw Error(ErrorKind::InvalidArgument, "learning rate must be positive");
  if (opt.restarts < 1) throw Error(ErrorKind::InvalidArgument, "restarts must be >= 1");
  const auto n = static_cast<std::size_t>(d);
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  struct Outcome {
    RestartTrace trace;
    RealMatrix best_T0;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(opt.restarts));

  auto run = [&](int restart) {
    std::seed_seq seq{static_cast<std::uint64_t>(opt.seed), static_cast<std::uint64_t>(restart)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    BParams b{RealMatrix(n, n), RealMatrix(n, n)};
    for (double& x : b.B0.data()) x = normal(rng);
    for (double& x : b.B1.data()) x = normal(rng);
    const std::size_t count = 2 * n * n;
    std::vector<double> m(count, 0.0), v(count, 0.0);
    Outcome& out = outcomes[static_cast<std::size_t>(restart)];
    double p1 = 1.0, p2 = 1.0;
    for (int step = 0;; ++step) {
      const ValueGrad vg = objective(b);
      if (step == 0) {
        out.trace.initial = vg.value;
        out.trace.best = vg.value;
        out.best_T0 = project(b).T0;
      } else if (vg.value < out.trace.best) {
        out.trace.best = vg.value;
        out.best_T0 = project(b).T0;
      }
      out.trace.final = vg.value;
      if (step == opt.steps) break;
      p1 *= beta1;
      p2 *= beta2;
      for (std::size_t k = 0; k < count; ++k) {
        double& theta = k < n * n ? b.B0.data()[k] : b.B1.data()[k - n * n];
        const double g = k < n * n ? vg.grad.B0.data()[k] : vg.grad.B1.data()[k - n * n];
        if (!std::isfinite(g)) continue;
        m[k] = beta1 * m[k] + (1.0 - beta1) * g;
        v[k] = beta2 * v[k] + (1.0 - beta2) * g * g;
        const double mhat = m[k] / (1.0 - p1);
        const double vhat = v[k] / (1.0 - p2);
        theta -= opt.learning_rate * mhat / (std::sqrt(vhat) + eps);
      }
    }
  };

  const int workers = std::max(1, std::min(opt.threads, opt.restarts));
  if (workers == 1) {
    for (int r = 0; r < opt.restarts; ++r) run(r);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int r = w; r < opt.restarts; r += workers) run(r);
      });
    }
    for (auto& t : pool) t.join();
  }

  SearchResult result;
  result.restarts = opt.restarts;
  result.steps = opt.steps;
  result.learning_rate = opt.learning_rate;
  result.seed = opt.seed;
  for (int r = 0; r < opt.restarts; ++r) {
    const Outcome& o = outcomes[static_cast<std::size_t>(r)];
    result.trace.push_back(o.trace);
    if (result.best_restart < 0 || o.trace.best < result.best_objective) {
      result.best_restart = r;
      result.best_objective = o.trace.best;
      result.best_T0 = o.best_T0;
    }
  }
  return result;
}

SearchResult search_pL(int d, std::uint64_t length, const AdamOptions& options) {
  if (length == 0) throw Error(ErrorKind::InvalidArgument, "L must be positive");
  SearchResult r = adam_minimize(
      [length](const BParams& b) {
        ValueGrad vg = objective_G(b, length);
        vg.value = -vg.value;
        for (double& x : vg.grad.B0.data()) x = -x;
        for (double& x : vg.grad.B1.data()) x = -x;
        return vg;
      },
      d, options);
  r.objective = "pl";
  r.best_objective = -r.best_objective;
  for (RestartTrace& t : r.trace) {
    t.initial = -t.initial;
    t.final = -t.final;
    t.best = -t.best;
  }
  return r;
}

FSearch search_F(int d, const AdamOptions& options) {
  FSearch out;
  out.result = adam_minimize([](const BParams& b) { return objective_F(b); }, d, options);
  out.result.objective = "F";
  out.candidate_violation = out.result.best_objective < -1e-8;
  if (out.candidate_violation) {
    RealVector pi(static_cast<std::size_t>(d), 0.0);
    pi[0] = 1.0;
    try {
      const TickStatistics s = stats::moments_classical_resolvent({out.result.best_T0, pi});
      out.resolvent_witness = witness::accuracy_witness(s, d);
      out.confirmed_violation = out.resolvent_witness > 1e-9;
    } catch (const Error&) {
      out.confirmed_violation = false;
    }
  }
  return out;
}

double inverse_accuracy_penalty(const BParams& b, double mu_target, double weight) {
  try {
    const TickStatistics s = stats::moments_classical_resolvent(project(b));
    const double gap = s.mu - mu_target;
    return s.sigma2 / (s.mu * s.mu) + weight * gap * gap;
  } catch (const Error&) {
    return 1e6;
  }
}

}  // namespace heurisearch
}  // namespace ticklab
