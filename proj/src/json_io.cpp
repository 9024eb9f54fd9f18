#include "ticklab/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace ticklab {
namespace {

void write_string(std::ostringstream& out, const std::string& s) {
  // Reuse nlohmann's escaping for strings.
  out << Json(s).dump();
}

void write_value(std::ostringstream& out, const Json& v, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out << "{}";
        return;
      }
      out << '{' << nl;
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out << ',' << nl;
        first = false;
        out << pad;
        write_string(out, it.key());
        out << (indent > 0 ? ": " : ":");
        write_value(out, it.value(), indent, depth + 1);
      }
      out << nl << close_pad << '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool scalars = true;
      for (const auto& e : v) scalars = scalars && !e.is_structured();
      if (scalars || indent == 0) {
        out << '[';
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) out << (indent > 0 ? ", " : ",");
          write_value(out, v[i], indent, depth + 1);
        }
        out << ']';
        return;
      }
      out << '[' << nl;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ',' << nl;
        out << pad;
        write_value(out, v[i], indent, depth + 1);
      }
      out << nl << close_pad << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = v.get<double>();
      if (!std::isfinite(x)) {
        out << "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      std::string s(buf);
      if (s.find_first_of(".eE") == std::string::npos) s += ".0";
      out << s;
      return;
    }
    default:
      out << v.dump();
  }
}

RealVector real_array(const Json& j, const char* key) {
  return j.at(key).get<RealVector>();
}

RealMatrix square_from_flat(const RealVector& flat, std::size_t d, const char* key) {
  if (flat.size() != d * d) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(key) + " must hold d*d=" + std::to_string(d * d) + " entries");
  }
  RealMatrix m(d, d);
  m.data() = flat;
  return m;
}

}  // namespace

std::string dump_json(const Json& value, int indent) {
  std::ostringstream out;
  write_value(out, value, indent, 0);
  return out.str();
}

namespace models {

Json to_json(const ClassicalClock& clock) {
  return Json{{"kind", "classical"},
              {"d", clock.dim()},
              {"T0", clock.T0.data()},
              {"pi0", clock.pi0}};
}

Json to_json(const QuantumClock& clock) {
  RealVector re, im, pre, pim;
  for (const Complex& x : clock.K0.data()) {
    re.push_back(x.real());
    im.push_back(x.imag());
  }
  for (const Complex& x : clock.psi0) {
    pre.push_back(x.real());
    pim.push_back(x.imag());
  }
  return Json{{"kind", "quantum"}, {"d", clock.dim()}, {"K0_re", re},
              {"K0_im", im},       {"psi0_re", pre},   {"psi0_im", pim}};
}

Json to_json(const ClockModel& model) {
  return std::visit([](const auto& m) { return to_json(m); }, model);
}

ClockModel model_from_json(const Json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "classical") {
      const auto d = j.at("d").get<std::size_t>();
      ClassicalClock clock{square_from_flat(real_array(j, "T0"), d, "T0"), real_array(j, "pi0")};
      validate(clock);
      return clock;
    }
    if (kind == "quantum") {
      const auto d = j.at("d").get<std::size_t>();
      const RealVector re = real_array(j, "K0_re");
      const RealVector im = j.contains("K0_im") ? real_array(j, "K0_im") : RealVector(re.size(), 0.0);
      const RealVector pre = real_array(j, "psi0_re");
      const RealVector pim = j.contains("psi0_im") ? real_array(j, "psi0_im") : RealVector(pre.size(), 0.0);
      if (re.size() != d * d || im.size() != d * d || pre.size() != d || pim.size() != d) {
        throw Error(ErrorKind::InvalidArgument, "quantum model arrays do not match d");
      }
      QuantumClock clock{ComplexMatrix(d, d), ComplexVector(d)};
      for (std::size_t k = 0; k < d * d; ++k) clock.K0.data()[k] = Complex(re[k], im[k]);
      for (std::size_t k = 0; k < d; ++k) clock.psi0[k] = Complex(pre[k], pim[k]);
      validate(clock);
      return clock;
    }
    if (kind == "multicyclic" || kind == "oneway" || kind == "cyclic") {
      MulticyclicParams p;
      p.d = j.at("d").get<int>();
      p.k = kind == "oneway" ? 1 : kind == "cyclic" ? p.d : j.at("k").get<int>();
      p.q = j.at("q").get<double>();
      if (j.contains("L")) return build_multicyclic_for_length(p, j.at("L").get<std::uint64_t>());
      return build_multicyclic(p);
    }
    if (kind == "qubit") return build_qubit({j.at("q").get<double>(), j.at("u").get<double>()});
    if (kind == "qutrit") return build_qutrit(j.at("q").get<double>(), j.at("u").get<double>());
    throw Error(ErrorKind::InvalidArgument, "unknown model kind '" + kind + "'");
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed model JSON: ") + e.what());
  }
}

}  // namespace models
}  // namespace ticklab
