#include "ticklab/witness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace ticklab {

std::string_view to_string(WitnessKind k) {
  return k == WitnessKind::accuracy ? "accuracy" : "finite_length";
}

std::string_view to_string(BoundProvenance p) {
  switch (p) {
    case BoundProvenance::proven: return "proven";
    case BoundProvenance::conjectured: return "conjectured";
    case BoundProvenance::estimate: return "estimate";
    case BoundProvenance::certified: return "certified";
  }
  return "unknown";
}

Json to_json(const WitnessReport& r) {
  Json j{{"kind", std::string(to_string(r.kind))},
         {"d", r.d},
         {"value", r.value},
         {"classical_bound", r.classical_bound},
         {"bound_provenance", std::string(to_string(r.provenance))},
         {"violated", r.violated},
         {"model", r.model}};
  j["L"] = r.L ? Json(*r.L) : Json(nullptr);
  return j;
}

namespace witness {
namespace {

constexpr std::array<QpcaRow, 18> kQpca{{
    {3, 0.3792, 0.2963, 0.29641},     {4, 0.2525, 0.25, 0.2501},
    {5, 0.1907, 0.14815, 0.1483},     {6, 0.1528, 0.14815, 0.1483},
    {7, 0.1274, 0.105469, 0.1056},    {8, 0.1093, 0.105469, 0.1056},
    {9, 0.0957, 0.08192, 0.0821},     {10, 0.0851, 0.08192, 0.08195},
    {11, 0.07659, 0.0669796, 0.06701}, {12, 0.06963, 0.0669796, 0.06701},
    {13, 0.06384, 0.0566528, 0.05668}, {14, 0.05893, 0.0566528, 0.05668},
    {15, 0.05473, 0.049087, 0.04912},  {16, 0.05107, 0.049087, 0.04912},
    {17, 0.04790, 0.0433049, 0.04333}, {18, 0.04508, 0.0433049, 0.04333},
    {19, 0.04258, 0.038742, 0.03877},  {20, 0.04034, 0.038742, 0.03877},
}};

// rows d = 3..10, columns L = d+1..d+10
constexpr int kOptimalK[8][10] = {
    {1, 3, 3, 3, 3, 3, 3, 3, 3, 3},     {1, 2, 4, 4, 4, 4, 4, 4, 4, 4},
    {1, 5, 5, 5, 5, 5, 5, 5, 5, 5},     {1, 2, 3, 6, 6, 6, 6, 6, 6, 6},
    {1, 7, 7, 7, 7, 7, 7, 7, 7, 7},     {1, 2, 4, 4, 8, 8, 8, 8, 8, 8},
    {1, 3, 3, 9, 9, 9, 9, 9, 9, 9},     {1, 2, 5, 5, 5, 10, 10, 10, 10, 10},
};

constexpr int kSearchGap[8][10] = {
    {0, 0, 0, 0, 28, 39, 22, 32, 39, 39},   {0, 0, 0, 25, 22, 32, 40, 46, 32, 32},
    {0, 19, 30, 42, 51, 28, 36, 42, 47, 47}, {0, 26, 39, 40, 48, 55, 32, 39, 44, 44},
    {0, 5, 25, 38, 47, 53, 57, 36, 42, 42},  {0, 26, 36, 46, 45, 52, 56, 61, 39, 39},
    {0, 23, 39, 35, 44, 50, 55, 60, 63, 63}, {0, 26, 34, 44, 52, 49, 54, 59, 62, 62},
};

void check_table_index(int d, int offset) {
  if (d < 3 || d > 10 || offset < 1 || offset > 10) {
    throw Error(ErrorKind::InvalidArgument, "reference table covers d = 3..10, L = d+1..d+10");
  }
}

using Objective = std::function<double(double, double)>;

QuantumOptimum maximize_unit_square(const Objective& f, int grid) {
  if (grid < 2) throw Error(ErrorKind::InvalidArgument, "grid needs at least 2 points per axis");
  QuantumOptimum out;
  struct Point {
    double value, q, u;
  };
  std::vector<Point> points;
  points.reserve(static_cast<std::size_t>(grid) * grid);
  const double h = 1.0 / (grid - 1);
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double q = i * h, u = j * h;
      points.push_back({f(q, u), q, u});
    }
  }
  out.evaluations = points.size();
  const std::size_t seeds = std::min<std::size_t>(6, points.size());
  std::partial_sort(points.begin(), points.begin() + static_cast<std::ptrdiff_t>(seeds), points.end(),
                    [](const Point& a, const Point& b) { return a.value > b.value; });
  out.value = -1.0;
  for (std::size_t s = 0; s < seeds; ++s) {
    Point best = points[s];
    double step = h;
    while (step > 1e-13) {
      bool moved = false;
      const double dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (const auto& dir : dirs) {
        const double q = std::clamp(best.q + step * dir[0], 0.0, 1.0);
        const double u = std::clamp(best.u + step * dir[1], 0.0, 1.0);
        if (q == best.q && u == best.u) continue;
        const double v = f(q, u);
        ++out.evaluations;
        if (v > best.value) {
          best = {v, q, u};
          moved = true;
          break;
        }
      }
      if (!moved) step *= 0.5;
    }
    if (best.value > out.value) {
      out.value = best.value;
      out.q = best.q;
      out.u = best.u;
    }
  }
  return out;
}

}  // namespace

double accuracy_witness(const TickStatistics& stats, int d) {
  return stats.mu * (stats.mu - d) - d * stats.sigma2;
}

double multicyclic_max_pmf(int d, int k, std::uint64_t length) {
  if (d <= 0 || k <= 0 || d % k != 0) {
    throw Error(ErrorKind::BlockMismatch, "d must be a multiple of k");
  }
  const auto kk = static_cast<std::uint64_t>(k);
  const auto n = static_cast<std::uint64_t>(d / k);
  const std::uint64_t m = (length + kk - 1) / kk;
  if (m < n) return 0.0;
  const double ratio = static_cast<double>(n) / static_cast<double>(m);
  return stats::binomial(m - 1, n - 1) * std::pow(1.0 - ratio, static_cast<double>(m - n)) *
         std::pow(ratio, static_cast<double>(n));
}

BoundEstimate classical_bound_estimate(int d, std::uint64_t length) {
  if (d <= 0) throw Error(ErrorKind::InvalidArgument, "d must be positive");
  if (length == 0) throw Error(ErrorKind::InvalidArgument, "L must be positive");
  BoundEstimate best{-1.0, 0};
  for (int k = 1; k <= d; ++k) {
    if (d % k != 0) continue;
    const double value = multicyclic_max_pmf(d, k, length);
    if (value > best.omega) best = {value, k};
  }
  return best;
}

WitnessReport accuracy_witness_report(const ClockModel& model) {
  WitnessReport r;
  r.kind = WitnessKind::accuracy;
  r.d = static_cast<int>(std::visit([](const auto& m) { return m.dim(); }, model));
  r.value = accuracy_witness(stats::moments(model), r.d);
  r.classical_bound = 0.0;
  r.provenance = r.d <= 2 ? BoundProvenance::proven : BoundProvenance::conjectured;
  r.violated = r.value > 1e-12;
  r.model = models::to_json(model);
  return r;
}

WitnessReport finite_length_witness(const ClockModel& model, std::uint64_t length,
                                    std::optional<double> certified) {
  WitnessReport r;
  r.kind = WitnessKind::finite_length;
  r.d = static_cast<int>(std::visit([](const auto& m) { return m.dim(); }, model));
  r.L = length;
  r.value = stats::pmf(model, length);
  if (!certified && r.d == 2) {
    if (const auto row = reference_qpca_row(length)) certified = row->upper_bound;
  }
  if (certified) {
    r.classical_bound = *certified;
    r.provenance = BoundProvenance::certified;
  } else {
    r.classical_bound = classical_bound_estimate(r.d, length).omega;
    r.provenance = BoundProvenance::estimate;
  }
  r.violated = r.value > r.classical_bound + 1e-12;
  r.model = models::to_json(model);
  return r;
}

const std::array<QpcaRow, 18>& reference_qpca() { return kQpca; }

std::optional<QpcaRow> reference_qpca_row(std::uint64_t length) {
  for (const QpcaRow& row : kQpca)
    if (row.L == length) return row;
  return std::nullopt;
}

int reference_optimal_k(int d, int offset) {
  check_table_index(d, offset);
  return kOptimalK[d - 3][offset - 1];
}

int reference_search_gap(int d, int offset) {
  check_table_index(d, offset);
  return kSearchGap[d - 3][offset - 1];
}

double qubit_family_pmf(std::uint64_t length) {
  if (length < 2) throw Error(ErrorKind::InvalidArgument, "family needs L >= 2");
  const double q = 1.0 - 2.0 / static_cast<double>(length);
  const double u = 2.0 * q / (1.0 + q * q);
  return stats::pmf_quantum(models::build_qubit({q, u}), length);
}

QuantumOptimum optimize_qubit_pmf(std::uint64_t length, int grid) {
  return maximize_unit_square(
      [length](double q, double u) { return stats::pmf_quantum(models::build_qubit({q, u}), length); },
      grid);
}

QuantumOptimum optimize_qutrit_pmf(std::uint64_t length, int grid) {
  return maximize_unit_square(
      [length](double q, double u) { return stats::pmf_quantum(models::build_qutrit(q, u), length); },
      grid);
}

QutritWitnessPoint qutrit_family_witness(double mu_target) {
  if (!(mu_target > 3.0)) throw Error(ErrorKind::InvalidArgument, "qutrit family needs mu > 3");
  QutritWitnessPoint out;
  out.mu_target = mu_target;
  out.q = 1.0 - 3.0 / mu_target;
  out.u = 2.0 * out.q / (1.0 + out.q * out.q);
  out.stats = stats::moments_quantum(models::build_qutrit(out.q, out.u));
  out.witness = accuracy_witness(out.stats, 3);
  return out;
}

}  // namespace witness
}  // namespace ticklab
