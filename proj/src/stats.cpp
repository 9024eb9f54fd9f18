#include "ticklab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "ticklab/linalg.hpp"

namespace ticklab {

std::string_view to_string(MomentMethod m) {
  switch (m) {
    case MomentMethod::resolvent: return "resolvent";
    case MomentMethod::closed_form: return "closed_form";
    case MomentMethod::truncated: return "truncated";
  }
  return "unknown";
}

TickStatistics TickStatistics::from_moments(double mu, double sigma2, MomentMethod method) {
  TickStatistics s;
  s.mu = mu;
  s.sigma2 = sigma2;
  s.method = method;
  if (sigma2 > 0.0) {
    s.accuracy = mu * mu / sigma2;
  } else {
    s.accuracy_infinite = true;
  }
  return s;
}

Json to_json(const TickStatistics& stats) {
  Json j{{"mu", stats.mu},
         {"sigma2", stats.sigma2},
         {"accuracy_infinite", stats.accuracy_infinite},
         {"method", std::string(to_string(stats.method))},
         {"pmf_prefix", stats.pmf_prefix}};
  j["accuracy"] = stats.accuracy_infinite ? Json(nullptr) : Json(stats.accuracy);
  return j;
}

namespace stats {
namespace {

double clamp_probability(double p, std::uint64_t length) {
  if (p < 0.0) {
    if (p < -1e-12) {
      throw Error(ErrorKind::NegativeProbability,
                  "p(" + std::to_string(length) + ") = " + std::to_string(p));
    }
    return 0.0;
  }
  return p;
}

// (x^n - y^n) / (x - y) for n = 0..max via h_n = x h_(n-1) + y^(n-1).
RealVector divided_powers(double x, double y, std::uint64_t max_power) {
  RealVector h(max_power + 1, 0.0);
  double ypow = 1.0;
  for (std::uint64_t n = 1; n <= max_power; ++n) {
    h[n] = x * h[n - 1] + ypow;
    ypow *= y;
  }
  return h;
}

ComplexVector step(const ComplexMatrix& k, const ComplexVector& v) { return times_col(k, v); }

double norm2(const ComplexVector& v) {
  double s = 0.0;
  for (const Complex& x : v) s += std::norm(x);
  return s;
}

}  // namespace

double binomial(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0.0;
  r = std::min(r, n - r);
  double c = 1.0;
  for (std::uint64_t i = 1; i <= r; ++i) {
    c = c * static_cast<double>(n - r + i) / static_cast<double>(i);
  }
  return c < 9e15 ? std::round(c) : c;
}

double survival_classical(const ClassicalClock& clock, std::uint64_t length) {
  const RealVector v = linalg::mat_pow_apply(clock.T0, clock.pi0, length);
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

SurvivalSeries survival_series(const ClassicalClock& clock, std::uint64_t horizon) {
  SurvivalSeries f;
  f.reserve(horizon + 1);
  RealVector v = clock.pi0;
  for (std::uint64_t l = 0;; ++l) {
    double s = 0.0;
    for (double x : v) s += x;
    f.push_back(s);
    if (l == horizon) break;
    v = row_times(v, clock.T0);
  }
  return f;
}

double pmf_classical(const ClassicalClock& clock, std::uint64_t length) {
  if (length == 0) throw Error(ErrorKind::InvalidArgument, "p(L) needs L >= 1");
  const RealVector v = linalg::mat_pow_apply(clock.T0, clock.pi0, length - 1);
  return clamp_probability(dot(v, clock.tick_probabilities()), length);
}

RealVector pmf_series(const ClassicalClock& clock, std::uint64_t horizon) {
  const RealVector w = clock.tick_probabilities();
  RealVector out;
  out.reserve(horizon);
  RealVector v = clock.pi0;
  for (std::uint64_t l = 1; l <= horizon; ++l) {
    out.push_back(clamp_probability(dot(v, w), l));
    v = row_times(v, clock.T0);
  }
  return out;
}

double pmf_multicyclic_closed(const MulticyclicParams& p, std::uint64_t length) {
  if (p.d <= 0 || p.k <= 0 || p.d % p.k != 0) {
    throw Error(ErrorKind::BlockMismatch, "d must be a multiple of k");
  }
  if (length == 0) throw Error(ErrorKind::InvalidArgument, "p(L) needs L >= 1");
  const auto k = static_cast<std::uint64_t>(p.k);
  const auto n = static_cast<std::uint64_t>(p.d / p.k);
  const std::uint64_t m = (length + k - 1) / k;
  if (m < n) return 0.0;
  return binomial(m - 1, n - 1) * std::pow(1.0 - p.q, static_cast<double>(n)) *
         std::pow(p.q, static_cast<double>(m - n));
}

double pmf_2x2_closed(double a, double b, double c, double d, std::uint64_t length) {
  if (length == 0) throw Error(ErrorKind::InvalidArgument, "p(L) needs L >= 1");
  if (length == 1) return clamp_probability(1.0 - a - b, 1);
  const auto L = static_cast<double>(length);
  // Residues of z^(L-1) (1-z) (z - d + b) / ((z - t+)(z - t-)).
  const double shift = d - b;
  if (b == 0.0 && c == 0.0 && a == d) {
    return clamp_probability(std::pow(a, L - 1.0) * (1.0 - a), length);
  }
  const double delta = (a - d) * (a - d) + 4.0 * b * c;
  const double root = std::sqrt(delta);
  const double tp = 0.5 * (a + d + root);
  const double tm = 0.5 * (a + d - root);
  double p;
  if (delta == 0.0) {
    // Second-order pole at t0: derivative of z^(L-1) (1-z) (z - d + b).
    const double t = tp;
    const double tl2 = std::pow(t, L - 2.0);
    const double tl1 = tl2 * t;
    p = (L - 1.0) * tl2 * (1.0 - t) * (t - shift) - tl1 * (t - shift) + tl1 * (1.0 - t);
  } else if (root >= 1e-3) {
    p = (std::pow(tp, L - 1.0) * (1.0 - tp) * (tp - shift) -
         std::pow(tm, L - 1.0) * (1.0 - tm) * (tm - shift)) /
        (tp - tm);
  } else {
    // Nearly repeated eigenvalues: same residue sum written as divided
    // differences of the monomials, free of cancellation.
    const RealVector h = divided_powers(tp, tm, length + 1);
    p = -h[length + 1] + (1.0 + shift) * h[length] - shift * h[length - 1];
  }
  return clamp_probability(p, length);
}

TickStatistics moments_classical_resolvent(const ClassicalClock& clock) {
  const std::size_t d = clock.dim();
  const RealMatrix a = RealMatrix::identity(d) - clock.T0;
  RealVector x, y;
  try {
    x = linalg::solve_linear(a, RealVector(d, 1.0));
    y = linalg::solve_linear(a, x);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SingularMatrix) {
      throw Error(ErrorKind::NeverTicks, "1 - T0 is singular (some state never ticks)");
    }
    throw;
  }
  const double mu = dot(clock.pi0, x);
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw Error(ErrorKind::NeverTicks, "mean tick time " + std::to_string(mu));
  }
  double sigma2 = 2.0 * dot(clock.pi0, y) - mu * (mu + 1.0);
  if (sigma2 < 0.0 && sigma2 > -1e-9 * (1.0 + mu * mu)) sigma2 = 0.0;
  return TickStatistics::from_moments(mu, sigma2, MomentMethod::resolvent);
}

TickStatistics moments_multicyclic_closed(const MulticyclicParams& p) {
  if (p.d <= 0 || p.k <= 0 || p.d % p.k != 0) {
    throw Error(ErrorKind::BlockMismatch, "d must be a multiple of k");
  }
  if (!(p.q < 1.0)) throw Error(ErrorKind::NeverTicks, "q = 1 never ticks");
  const double d = p.d;
  const double k = p.k;
  const double gap = 1.0 - p.q;
  TickStatistics s = TickStatistics::from_moments(d / gap, k * d * p.q / (gap * gap),
                                                  MomentMethod::closed_form);
  return s;
}

double survival_quantum(const QuantumClock& clock, std::uint64_t length) {
  ComplexVector v = clock.psi0;
  for (std::uint64_t l = 0; l < length; ++l) v = step(clock.K0, v);
  return norm2(v);
}

SurvivalSeries survival_series(const QuantumClock& clock, std::uint64_t horizon) {
  SurvivalSeries f;
  f.reserve(horizon + 1);
  ComplexVector v = clock.psi0;
  for (std::uint64_t l = 0;; ++l) {
    f.push_back(norm2(v));
    if (l == horizon) break;
    v = step(clock.K0, v);
  }
  return f;
}

double pmf_quantum(const QuantumClock& clock, std::uint64_t length) {
  if (length == 0) throw Error(ErrorKind::InvalidArgument, "p(L) needs L >= 1");
  ComplexVector v = clock.psi0;
  for (std::uint64_t l = 1; l < length; ++l) v = step(clock.K0, v);
  const double before = norm2(v);
  const double after = norm2(step(clock.K0, v));
  return clamp_probability(before - after, length);
}

RealVector pmf_series(const QuantumClock& clock, std::uint64_t horizon) {
  const SurvivalSeries f = survival_series(clock, horizon);
  RealVector out(horizon);
  for (std::uint64_t l = 1; l <= horizon; ++l) out[l - 1] = clamp_probability(f[l - 1] - f[l], l);
  return out;
}

Superoperator vectorize(const QuantumClock& clock) {
  const std::size_t d = clock.dim();
  const std::size_t n = d * d;
  // Coordinate layout: d diagonal entries, then (Re, Im) of rho(i, j), i < j.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) pairs.emplace_back(i, j);

  auto coords = [&](const ComplexMatrix& rho) {
    RealVector x(n);
    for (std::size_t i = 0; i < d; ++i) x[i] = rho(i, i).real();
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto [i, j] = pairs[p];
      x[d + 2 * p] = rho(i, j).real();
      x[d + 2 * p + 1] = rho(i, j).imag();
    }
    return x;
  };
  auto basis = [&](std::size_t index) {
    ComplexMatrix rho(d, d);
    if (index < d) {
      rho(index, index) = 1.0;
    } else {
      const std::size_t p = (index - d) / 2;
      const auto [i, j] = pairs[p];
      const Complex z = ((index - d) % 2 == 0) ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
      rho(i, j) = z;
      rho(j, i) = std::conj(z);
    }
    return rho;
  };

  const ComplexMatrix kdag = adjoint(clock.K0);
  Superoperator out{RealMatrix(n, n), RealVector(n, 0.0), RealVector(n, 0.0)};
  for (std::size_t col = 0; col < n; ++col) {
    const RealVector image = coords(clock.K0 * basis(col) * kdag);
    for (std::size_t row = 0; row < n; ++row) out.S(row, col) = image[row];
  }
  ComplexMatrix rho0(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) rho0(i, j) = clock.psi0[i] * std::conj(clock.psi0[j]);
  out.initial = coords(rho0);
  for (std::size_t i = 0; i < d; ++i) out.trace[i] = 1.0;
  return out;
}

TruncatedMoments truncated_moments(const SurvivalSeries& f, double tol) {
  if (f.empty()) throw Error(ErrorKind::InvalidArgument, "empty survival series");
  // At least 11 steps when available, so the ratio window skips f(1)/f(0):
  // a first step that cannot tick would otherwise read as a ratio of 1.
  std::size_t horizon = 0;
  const std::size_t floor_n = std::min<std::size_t>(11, f.size() - 1);
  while (horizon < f.size() && (horizon < floor_n || !(f[horizon] < tol))) ++horizon;
  if (horizon == f.size()) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "survival stays above %g through step %zu", tol, f.size() - 1);
    throw Error(ErrorKind::NoConvergence, buf);
  }
  TruncatedMoments t;
  t.horizon = horizon;
  // mu = sum_{L<N} f(L) - N f(N); E[T^2] = sum_{L<N} (2L+1) f(L) - N^2 f(N).
  long double mu = 0.0L;
  long double second = 0.0L;
  for (std::size_t l = 0; l < horizon; ++l) {
    mu += f[l];
    second += (2.0L * l + 1.0L) * f[l];
  }
  const long double n = horizon;
  mu -= n * f[horizon];
  second -= n * n * f[horizon];
  t.mu = static_cast<double>(mu);
  t.second_moment = static_cast<double>(second);

  // Geometric-mean decay over the last ten steps; quantum survival can sit on
  // near-flat steps, so single-step ratios are useless. The envelope
  // amplitude A >= f(N) keeps f(N + j) <= A r^j for the window's own shape.
  const std::size_t w = std::min<std::size_t>(10, horizon);
  double r = 0.0;
  double amp = f[horizon];
  if (f[horizon] > 0.0 && w > 0) {
    r = std::pow(f[horizon] / f[horizon - w], 1.0 / static_cast<double>(w));
    for (std::size_t i = 1; i <= w; ++i) amp = std::max(amp, f[horizon - i] * std::pow(r, static_cast<double>(i)));
  }
  t.ratio = r;
  if (amp > 0.0) {
    if (!(r < 1.0 - 1e-6)) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "survival tail ratio %.9g too close to 1", r);
      throw Error(ErrorKind::NoConvergence, buf);
    }
    const double g = 1.0 - r;
    const double nn = static_cast<double>(horizon);
    t.mu_tail = amp * (nn / g + 1.0 / (g * g));
    t.second_tail = amp * (nn * nn / g + 2.0 * nn / (g * g) + (1.0 + r) / (g * g * g));
  }
  return t;
}

TickStatistics moments_quantum(const QuantumClock& clock, std::uint64_t horizon_cap, double tol) {
  // The truncated route runs first: it is what detects a non-decaying survival.
  SurvivalSeries f;
  f.reserve(1024);
  ComplexVector v = clock.psi0;
  for (std::uint64_t l = 0;; ++l) {
    f.push_back(norm2(v));
    if ((f.back() < tol && l >= 11) || l == horizon_cap) break;
    v = step(clock.K0, v);
  }
  const TruncatedMoments trunc = truncated_moments(f, tol);

  const Superoperator sup = vectorize(clock);
  const std::size_t n = sup.S.rows();
  const RealMatrix a = RealMatrix::identity(n) - sup.S;
  RealVector x, y;
  try {
    x = linalg::solve_linear(a, sup.initial);
    y = linalg::solve_linear(a, x);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SingularMatrix) {
      throw Error(ErrorKind::NoConvergence, "1 - S is singular");
    }
    throw;
  }
  const double mu = dot(sup.trace, x);
  double sigma2 = 2.0 * dot(sup.trace, y) - mu * (mu + 1.0);
  if (sigma2 < 0.0 && sigma2 > -1e-9 * (1.0 + mu * mu)) sigma2 = 0.0;

  const double sigma2_trunc = trunc.second_moment - trunc.mu * trunc.mu;
  const double mu_allow = 1e-6 * std::max(1.0, mu) + trunc.mu_tail;
  const double s2_allow = 1e-6 * std::max(1.0, mu * mu) + trunc.second_tail +
                          2.0 * mu * trunc.mu_tail + trunc.mu_tail * trunc.mu_tail;
  if (std::abs(mu - trunc.mu) > mu_allow || std::abs(sigma2 - sigma2_trunc) > s2_allow) {
    throw Error(ErrorKind::RouteMismatch,
                "superoperator (mu=" + std::to_string(mu) + ", sigma2=" + std::to_string(sigma2) +
                    ") vs truncated (mu=" + std::to_string(trunc.mu) +
                    ", sigma2=" + std::to_string(sigma2_trunc) + ")");
  }
  return TickStatistics::from_moments(mu, sigma2, MomentMethod::resolvent);
}

TickStatistics moments_qubit_closed(const QubitParams& p) {
  const double q = p.q;
  const double u = p.u;
  if (!(q < 1.0) || !(u < 1.0)) {
    throw Error(ErrorKind::DegenerateParams, "closed form needs q < 1 and u < 1");
  }
  // Same rational functions rewritten in a = 1-q, b = 1-u. Near q, u -> 1 the
  // expanded form in q, u cancels to nothing; this one keeps full precision.
  const double a = 1.0 - q;
  const double b = 1.0 - u;
  const double den = a * b * (2.0 - a);
  const double mu = (a * a * (1.0 - b) + 2.0 * b) / den;
  const double num = a * a * a * a * (1.0 - b) + 2.0 * a * a * a * b * (1.0 - b) +
                     2.0 * a * a * b * (3.0 * b - 1.0) - 8.0 * a * b * b + 4.0 * b * b;
  const double sigma2 = num / (den * den);
  return TickStatistics::from_moments(mu, sigma2, MomentMethod::closed_form);
}

TickStatistics moments(const ClockModel& model) {
  if (const auto* c = std::get_if<ClassicalClock>(&model)) return moments_classical_resolvent(*c);
  return moments_quantum(std::get<QuantumClock>(model));
}

double pmf(const ClockModel& model, std::uint64_t length) {
  if (const auto* c = std::get_if<ClassicalClock>(&model)) return pmf_classical(*c, length);
  return pmf_quantum(std::get<QuantumClock>(model), length);
}

SurvivalSeries survival_series(const ClockModel& model, std::uint64_t horizon) {
  return std::visit([&](const auto& m) { return survival_series(m, horizon); }, model);
}

void write_pmf_csv(std::ostream& out, const SurvivalSeries& f) {
  out << "L,pL,survival\n";
  char buf[96];
  for (std::size_t l = 1; l < f.size(); ++l) {
    const double p = std::max(0.0, f[l - 1] - f[l]);
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", l, p, f[l]);
    out << buf;
  }
}

}  // namespace stats
}  // namespace ticklab
