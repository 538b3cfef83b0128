#include "expmap/measure.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "expmap/errors.hpp"

namespace expmap {

namespace {

constexpr std::string_view kGrammar =
    "uniform | exp:a=<float> | dirac:t=<float> | atoms:<w1>@<x1>,<w2>@<x2>,... | table:<path>";

double parse_double(std::string_view text, std::string_view what) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw DomainError("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return value;
}

[[noreturn]] void bad_spec(std::string_view spec) {
  throw DomainError("unknown measure spec '" + std::string(spec) + "'; expected " +
                    std::string(kGrammar));
}

// Mass of a linear density piece f0 -> f1 over width h, up to offset s.
double piece_mass(double f0, double f1, double h, double s) {
  return f0 * s + 0.5 * (f1 - f0) * s * s / h;
}

}  // namespace

Measure Measure::uniform() {
  Measure m;
  m.kind_ = Kind::UniformDensity;
  m.spec_ = "uniform";
  return m;
}

Measure Measure::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw DomainError("exponential rate must be positive and finite");
  }
  Measure m;
  m.kind_ = Kind::ExponentialRate;
  m.rate_ = rate;
  std::ostringstream os;
  os.precision(17);
  os << "exp:a=" << rate;
  m.spec_ = os.str();
  return m;
}

Measure Measure::dirac(double location) {
  Measure m = atoms({{location, 1.0}});
  std::ostringstream os;
  os.precision(17);
  os << "dirac:t=" << location;
  m.spec_ = os.str();
  return m;
}

Measure Measure::atoms(std::vector<Atom> list) {
  if (list.empty()) throw DomainError("atomic measure needs at least one atom");
  double total = 0.0;
  for (const Atom& a : list) {
    if (!(a.location >= 0.0) || !(a.location < 1.0)) {
      throw DomainError("atom locations must lie in [0,1); an atom at 1 is not supported");
    }
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw DomainError("atom weights must be positive");
    }
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw DomainError("atom weights must sum to 1");
  }
  std::sort(list.begin(), list.end(),
            [](const Atom& a, const Atom& b) { return a.location < b.location; });
  // Merge coincident locations so each point carries a single atom.
  std::vector<Atom> merged;
  for (const Atom& a : list) {
    if (!merged.empty() && merged.back().location == a.location) {
      merged.back().weight += a.weight;
    } else {
      merged.push_back(a);
    }
  }
  for (Atom& a : merged) a.weight /= total;

  Measure m;
  m.kind_ = Kind::FiniteAtomic;
  m.atoms_ = std::move(merged);
  std::ostringstream os;
  os.precision(17);
  os << "atoms:";
  for (std::size_t i = 0; i < list.size(); ++i) {
    os << (i ? "," : "") << list[i].weight << "@" << list[i].location;
  }
  m.spec_ = os.str();
  return m;
}

Measure Measure::tabulated(std::vector<double> nodes, std::vector<double> values) {
  if (nodes.size() != values.size() || nodes.size() < 2) {
    throw DomainError("density table needs at least two (x, density) rows");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!(nodes[i] >= 0.0 && nodes[i] <= 1.0)) {
      throw DomainError("density table nodes must lie in [0,1]");
    }
    if (i > 0 && !(nodes[i] > nodes[i - 1])) {
      throw DomainError("density table nodes must be strictly increasing");
    }
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw DomainError("density values must be nonnegative");
    }
  }
  std::vector<double> cdf(nodes.size(), 0.0);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    cdf[i] = cdf[i - 1] + 0.5 * (values[i] + values[i - 1]) * (nodes[i] - nodes[i - 1]);
  }
  const double mass = cdf.back();
  if (std::abs(mass - 1.0) > 1e-6) {
    throw DomainError("density table integrates to " + std::to_string(mass) + ", not 1");
  }
  for (double& v : values) v /= mass;
  for (double& c : cdf) c /= mass;

  Measure m;
  m.kind_ = Kind::TabulatedDensity;
  m.table_x_ = std::move(nodes);
  m.table_f_ = std::move(values);
  m.table_cdf_ = std::move(cdf);
  m.spec_ = "table";
  return m;
}

Measure Measure::load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open density table '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DomainError("empty density table '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,density") {
    throw DomainError("density table '" + path + "' must start with header x,density");
  }
  std::vector<double> xs, fs;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DomainError("malformed density row '" + line + "'");
    xs.push_back(parse_double(std::string_view(line).substr(0, comma), "x"));
    fs.push_back(parse_double(std::string_view(line).substr(comma + 1), "density"));
  }
  Measure m = tabulated(std::move(xs), std::move(fs));
  m.spec_ = "table:" + path;
  return m;
}

Measure Measure::parse(std::string_view spec) {
  if (spec == "uniform") return uniform();
  auto starts = [&](std::string_view prefix) { return spec.substr(0, prefix.size()) == prefix; };
  if (starts("exp:a=")) return exponential(parse_double(spec.substr(6), "rate"));
  if (starts("dirac:t=")) return dirac(parse_double(spec.substr(8), "location"));
  if (starts("table:")) {
    if (spec.size() == 6) bad_spec(spec);
    return load_table(std::string(spec.substr(6)));
  }
  if (starts("atoms:")) {
    std::vector<Atom> list;
    std::string_view rest = spec.substr(6);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto at = item.find('@');
      if (at == std::string_view::npos) bad_spec(spec);
      list.push_back({parse_double(item.substr(at + 1), "atom location"),
                      parse_double(item.substr(0, at), "atom weight")});
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (list.empty()) bad_spec(spec);
    return atoms(std::move(list));
  }
  bad_spec(spec);
}

double Measure::support_end() const {
  return kind_ == Kind::ExponentialRate ? std::numeric_limits<double>::infinity() : 1.0;
}

double Measure::grid_domain() const {
  return kind_ == Kind::ExponentialRate ? -std::log(kExponentialTailMass) / rate_ : 1.0;
}

void Measure::check_point(double x) const {
  if (!(x >= 0.0) || x > support_end()) {
    throw DomainError("point " + std::to_string(x) + " lies outside the support interval");
  }
}

double Measure::density(double z) const {
  switch (kind_) {
    case Kind::FiniteAtomic:
      return 0.0;
    case Kind::UniformDensity:
      return (z >= 0.0 && z <= 1.0) ? 1.0 : 0.0;
    case Kind::ExponentialRate:
      return z >= 0.0 ? rate_ * std::exp(-rate_ * z) : 0.0;
    case Kind::TabulatedDensity: {
      if (z < table_x_.front() || z > table_x_.back()) return 0.0;
      const auto it = std::upper_bound(table_x_.begin(), table_x_.end(), z);
      if (it == table_x_.end()) return table_f_.back();
      const std::size_t j = static_cast<std::size_t>(it - table_x_.begin());
      const double t = (z - table_x_[j - 1]) / (table_x_[j] - table_x_[j - 1]);
      return table_f_[j - 1] + t * (table_f_[j] - table_f_[j - 1]);
    }
  }
  return 0.0;
}

double Measure::cdf(double x) const {
  if (x < 0.0) return 0.0;
  switch (kind_) {
    case Kind::FiniteAtomic: {
      double s = 0.0;
      for (const Atom& a : atoms_) {
        if (a.location <= x) s += a.weight;
      }
      return std::min(s, 1.0);
    }
    case Kind::UniformDensity:
      return std::min(x, 1.0);
    case Kind::ExponentialRate:
      return -std::expm1(-rate_ * x);
    case Kind::TabulatedDensity: {
      if (x <= table_x_.front()) return 0.0;
      if (x >= table_x_.back()) return 1.0;
      const auto it = std::upper_bound(table_x_.begin(), table_x_.end(), x);
      const std::size_t j = static_cast<std::size_t>(it - table_x_.begin());
      const double h = table_x_[j] - table_x_[j - 1];
      return table_cdf_[j - 1] + piece_mass(table_f_[j - 1], table_f_[j], h, x - table_x_[j - 1]);
    }
  }
  return 0.0;
}

double Measure::tail_mass(double x) const {
  check_point(x);
  switch (kind_) {
    case Kind::FiniteAtomic: {
      double s = 0.0;
      for (const Atom& a : atoms_) {
        if (a.location >= x) s += a.weight;
      }
      return std::min(s, 1.0);
    }
    case Kind::UniformDensity:
      return 1.0 - x;
    case Kind::ExponentialRate:
      return std::exp(-rate_ * x);
    case Kind::TabulatedDensity:
      return std::max(0.0, 1.0 - cdf(x));
  }
  return 0.0;
}

double Measure::integrate_against(const std::function<double(double)>& g, double lo, double hi,
                                  int intervals) const {
  if (!(lo <= hi)) throw DomainError("integrate_against needs lo <= hi");
  check_point(lo);
  if (!(hi <= support_end())) check_point(hi);
  if (intervals < 1) throw DomainError("quadrature needs at least one interval");

  if (kind_ == Kind::FiniteAtomic) {
    double s = 0.0;
    for (const Atom& a : atoms_) {
      if (a.location >= lo && a.location <= hi) s += a.weight * g(a.location);
    }
    return s;
  }
  const double upper = std::min(hi, grid_domain());
  if (upper <= lo) return 0.0;
  const double h = (upper - lo) / intervals;
  auto integrand = [&](double z) { return g(z) * density(z); };
  double s = 0.5 * (integrand(lo) + integrand(upper));
  for (int k = 1; k < intervals; ++k) s += integrand(lo + k * h);
  return s * h;
}

double Measure::sample(Rng& rng) const {
  const double u = uniform01(rng);
  switch (kind_) {
    case Kind::FiniteAtomic: {
      double acc = 0.0;
      for (const Atom& a : atoms_) {
        acc += a.weight;
        if (u < acc) return a.location;
      }
      return atoms_.back().location;
    }
    case Kind::UniformDensity:
      return u;
    case Kind::ExponentialRate:
      return -std::log1p(-u) / rate_;
    case Kind::TabulatedDensity: {
      auto it = std::upper_bound(table_cdf_.begin(), table_cdf_.end(), u);
      if (it == table_cdf_.end()) return table_x_.back();
      const std::size_t j = static_cast<std::size_t>(it - table_cdf_.begin());
      const double f0 = table_f_[j - 1];
      const double f1 = table_f_[j];
      const double h = table_x_[j] - table_x_[j - 1];
      const double r = u - table_cdf_[j - 1];
      const double c = (f1 - f0) / h;
      const double root = std::sqrt(std::max(0.0, f0 * f0 + 2.0 * c * r));
      const double denom = f0 + root;
      const double s = denom > 0.0 ? 2.0 * r / denom : 0.0;
      return table_x_[j - 1] + std::clamp(s, 0.0, h);
    }
  }
  return 0.0;
}

}  // namespace expmap
