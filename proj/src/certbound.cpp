#include "ticklab/certbound.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <thread>

#include "ticklab/models.hpp"
#include "ticklab/stats.hpp"
#include "ticklab/witness.hpp"

namespace ticklab {

Json to_json(const BoundCertificate& c, bool include_timing) {
  Json schedule = Json::array();
  for (const StageRecord& s : c.schedule) {
    schedule.push_back({{"delta", s.delta},
                        {"points_evaluated", s.evaluated},
                        {"points_surviving", s.surviving},
                        {"stage_max", s.stage_max},
                        {"incumbent", s.incumbent},
                        {"upper_bound", s.upper_bound}});
  }
  Json j{{"d", c.d},
         {"L", c.L},
         {"incumbent", c.incumbent},
         {"incumbent_T0", c.incumbent_T0.data()},
         {"upper_bound", c.upper_bound},
         {"final_delta", c.final_delta},
         {"gradient_bound", c.gradient_bound},
         {"error_term", c.error_term},
         {"refinement_schedule", schedule},
         {"partial", c.partial},
         {"target_error", c.target_error},
         {"delta0", c.delta0},
         {"refine_factor", c.refine_factor},
         {"threads", c.threads},
         {"max_points_per_stage", c.max_points_per_stage}};
  if (include_timing) j["elapsed_seconds"] = c.elapsed_seconds;
  return j;
}

namespace certbound {

RealMatrix grad_pL(const RealMatrix& t, std::uint64_t length) {
  if (length < 2) throw Error(ErrorKind::InvalidArgument, "grad_pL needs L >= 2");
  const std::size_t d = t.rows();
  // alpha_r = e1 T^r, r = 0..L-1; beta_s = T^s w, s = 0..L-2, w = (1 - T) eta.
  std::vector<RealVector> alpha(length), beta(length - 1);
  alpha[0] = RealVector(d, 0.0);
  alpha[0][0] = 1.0;
  for (std::uint64_t r = 1; r < length; ++r) alpha[r] = row_times(alpha[r - 1], t);
  beta[0] = ClassicalClock{t, alpha[0]}.tick_probabilities();
  for (std::uint64_t s = 1; s + 1 < length; ++s) beta[s] = times_col(t, beta[s - 1]);
  RealMatrix g(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double sum = 0.0;
      for (std::uint64_t r = 0; r + 2 <= length; ++r) sum += alpha[r][i] * beta[length - r - 2][j];
      g(i, j) = sum - alpha[length - 1][i];
    }
  }
  return g;
}

namespace {

constexpr int kMaxD = 3;
constexpr int kMaxParams = kMaxD * kMaxD;
using Cell = std::array<std::uint32_t, kMaxParams>;
using Params = std::array<double, kMaxParams>;

// Euclidean projection of one row onto {x >= 0, sum x <= 1}; the input
// already lies in [0,1]^d.
void project_row(double* x, int d) {
  double s = 0.0;
  for (int j = 0; j < d; ++j) s += x[j];
  if (s <= 1.0) return;
  std::array<double, kMaxD> sorted{};
  std::copy(x, x + d, sorted.begin());
  std::sort(sorted.begin(), sorted.begin() + d, std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (int j = 0; j < d; ++j) {
    cumulative += sorted[j];
    const double t = (cumulative - 1.0) / (j + 1);
    if (sorted[j] - t > 0.0) theta = t;
  }
  for (int j = 0; j < d; ++j) x[j] = std::max(0.0, x[j] - theta);
}

double eval_pL(const Params& t, int d, std::uint64_t length) {
  std::array<double, kMaxD> v{}, next{};
  v[0] = 1.0;
  for (std::uint64_t r = 1; r < length; ++r) {
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += v[i] * t[i * d + j];
      next[j] = s;
    }
    v = next;
  }
  double p = 0.0;
  for (int i = 0; i < d; ++i) {
    double row = 0.0;
    for (int j = 0; j < d; ++j) row += t[i * d + j];
    p += v[i] * (1.0 - row);
  }
  return p;
}

struct Candidate {
  Cell cell;
  double value;
};

struct ChunkResult {
  std::vector<Candidate> kept;
  std::uint64_t evaluated = 0;
  double best = -1.0;
  Params best_point{};
};

struct Stage {
  int d;
  int params;
  std::uint64_t length;
  std::uint32_t factor;  // children per axis
  double delta;          // child step
  double prefilter;      // keep children with p + eps >= prefilter
  double eps;
};

// Enumerates the children of parents[item / inner] whose first two digits
// are fixed by item % inner; remaining digits run over the full factor range.
void run_items(const Stage& st, const std::vector<Cell>& parents, std::uint64_t begin,
               std::uint64_t end, ChunkResult& out) {
  const int dd = st.params;
  const std::uint64_t f = st.factor;
  const std::uint64_t inner = f * f;
  const std::uint64_t rest_count = [&] {
    std::uint64_t n = 1;
    for (int a = 2; a < dd; ++a) n *= f;
    return n;
  }();
  Cell child{};
  Params point{};
  for (std::uint64_t item = begin; item < end; ++item) {
    const Cell& parent = parents[item / inner];
    const std::uint64_t head = item % inner;
    for (std::uint64_t rest = 0; rest < rest_count; ++rest) {
      std::uint64_t code = rest;
      for (int a = dd - 1; a >= 0; --a) {
        std::uint64_t digit;
        if (a >= 2) {
          digit = code % f;
          code /= f;
        } else {
          digit = a == 1 ? head % f : head / f;
        }
        child[a] = static_cast<std::uint32_t>(parent[a] * f + digit);
      }
      // Keep a cell only if its lower corner is feasible in every row.
      bool feasible = true;
      for (int i = 0; i < st.d && feasible; ++i) {
        double lower = 0.0;
        for (int j = 0; j < st.d; ++j) lower += child[i * st.d + j] * st.delta;
        feasible = lower <= 1.0 + 1e-12;
      }
      if (!feasible) continue;
      for (int a = 0; a < dd; ++a) point[a] = (child[a] + 0.5) * st.delta;
      for (int i = 0; i < st.d; ++i) project_row(point.data() + i * st.d, st.d);
      const double p = eval_pL(point, st.d, st.length);
      ++out.evaluated;
      if (p > out.best) {
        out.best = p;
        out.best_point = point;
      }
      if (p + st.eps >= st.prefilter) out.kept.push_back({child, p});
    }
  }
}

RealMatrix to_matrix(const Params& p, int d) {
  RealMatrix m(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
  for (int a = 0; a < d * d; ++a) m.data()[static_cast<std::size_t>(a)] = p[a];
  return m;
}

}  // namespace

BoundCertificate certified_upper_bound(int d, std::uint64_t length, const BoundOptions& opt) {
  const auto started = std::chrono::steady_clock::now();
  if (d != 2 && d != 3) throw Error(ErrorKind::InvalidArgument, "certified bounds support d = 2 or 3");
  if (length < static_cast<std::uint64_t>(d) + 1) {
    throw Error(ErrorKind::InvalidArgument, "certified bounds need L >= d + 1");
  }
  if (!(opt.target_error > 0.0)) throw Error(ErrorKind::InvalidArgument, "target error must be positive");
  if (opt.refine_factor < 2) throw Error(ErrorKind::InvalidArgument, "refine factor must be >= 2");
  const double cells0 = std::round(1.0 / opt.delta0);
  if (!(opt.delta0 > 0.0) || cells0 < 1.0 || std::abs(cells0 * opt.delta0 - 1.0) > 1e-9) {
    throw Error(ErrorKind::InvalidArgument, "1/delta0 must be a positive integer");
  }
  const int params = d * d;
  const double dsq = static_cast<double>(params);
  const int threads = std::max(1, opt.threads);

  BoundCertificate cert;
  cert.d = d;
  cert.L = length;
  cert.gradient_bound = d;
  cert.target_error = opt.target_error;
  cert.delta0 = 1.0 / cells0;
  cert.refine_factor = opt.refine_factor;
  cert.threads = threads;
  cert.max_points_per_stage = opt.max_points_per_stage;

  // Seed with the best multicyclic model, relabelled to start in state 1.
  {
    const witness::BoundEstimate est = witness::classical_bound_estimate(d, length);
    const MulticyclicParams mp{d, est.best_k, models::optimal_q_multicyclic(d, est.best_k, length)};
    const ClassicalClock seed =
        models::relabel_start_first(models::build_multicyclic_for_length(mp, length));
    cert.incumbent = stats::pmf_classical(seed, length);
    cert.incumbent_T0 = seed.T0;
  }

  std::vector<Cell> parents{Cell{}};
  auto factor = static_cast<std::uint64_t>(cells0);
  std::uint64_t denominator = factor;  // delta = 1 / denominator
  bool have_stage = false;

  while (true) {
    double candidates = static_cast<double>(parents.size());
    for (int a = 0; a < params; ++a) candidates *= static_cast<double>(factor);
    if (candidates > static_cast<double>(opt.max_points_per_stage)) {
      cert.partial = true;
      break;
    }
    Stage st{d, params, length, static_cast<std::uint32_t>(factor), 1.0 / static_cast<double>(denominator),
             cert.incumbent, 0.0};
    st.eps = st.delta * dsq;

    const std::uint64_t items = parents.size() * factor * factor;
    const int workers = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), items));
    std::vector<ChunkResult> results(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      const std::uint64_t begin = items * static_cast<std::uint64_t>(w) / static_cast<std::uint64_t>(workers);
      const std::uint64_t end = items * static_cast<std::uint64_t>(w + 1) / static_cast<std::uint64_t>(workers);
      if (workers == 1) {
        run_items(st, parents, begin, end, results[0]);
      } else {
        pool.emplace_back([&, w, begin, end] { run_items(st, parents, begin, end, results[static_cast<std::size_t>(w)]); });
      }
    }
    for (auto& th : pool) th.join();

    // Deterministic merge: chunk order equals cell order.
    StageRecord rec;
    rec.delta = st.delta;
    rec.stage_max = -1.0;
    Params best_point{};
    for (const ChunkResult& r : results) {
      rec.evaluated += r.evaluated;
      if (r.best > rec.stage_max) {
        rec.stage_max = r.best;
        best_point = r.best_point;
      }
    }
    if (rec.stage_max > cert.incumbent) {
      cert.incumbent = rec.stage_max;
      cert.incumbent_T0 = to_matrix(best_point, d);
    }
    std::vector<Cell> survivors;
    for (const ChunkResult& r : results)
      for (const Candidate& c : r.kept)
        if (c.value + st.eps >= cert.incumbent) survivors.push_back(c.cell);
    rec.surviving = survivors.size();
    rec.incumbent = cert.incumbent;
    // Cells pruned earlier are below the incumbent, which is itself attained.
    rec.upper_bound = std::max(rec.stage_max + st.delta * dsq / 2.0, cert.incumbent);
    cert.schedule.push_back(rec);
    if (opt.progress) opt.progress(rec);

    cert.upper_bound = rec.upper_bound;
    cert.final_delta = st.delta;
    cert.error_term = st.delta * dsq / 2.0;
    have_stage = true;

    if (cert.error_term <= opt.target_error) break;
    parents = std::move(survivors);
    factor = static_cast<std::uint64_t>(opt.refine_factor);
    denominator *= factor;
  }
  if (!have_stage) {
    // Not even the first lattice fits the budget: the trivial bound p <= 1.
    cert.upper_bound = 1.0;
    cert.final_delta = 1.0;
    cert.error_term = 1.0;
  }
  cert.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return cert;
}

}  // namespace certbound
}  // namespace ticklab
