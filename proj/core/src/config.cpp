#include "inflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "inflow/errors.hpp"
#include "inflow/synthetic.hpp"

namespace inflow {

namespace {

// Thrown by value parsers; turned into a ParseError with key and line.
struct BadValue {
  std::string message;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size() && std::isfinite(d)) return d;
  } catch (const std::exception&) {
  }
  throw BadValue{"expected a number, got '" + v + "'"};
}

long long to_integer(const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used == v.size()) return i;
  } catch (const std::exception&) {
  }
  throw BadValue{"expected an integer, got '" + v + "'"};
}

std::size_t to_count(const std::string& v, long long min) {
  const long long i = to_integer(v);
  if (i < min) throw BadValue{"must be at least " + std::to_string(min)};
  return static_cast<std::size_t>(i);
}

double positive(const std::string& v, const std::string& name) {
  const double d = to_double(v);
  if (!(d > 0.0)) throw BadValue{name + " must be positive"};
  return d;
}

double nonnegative(const std::string& v, const std::string& name) {
  const double d = to_double(v);
  if (!(d >= 0.0)) throw BadValue{name + " must be nonnegative"};
  return d;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw BadValue{"empty list entry"};
    out.push_back(item);
  }
  return out;
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(item));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + num(v[i]);
  return out;
}

std::string check_profile_kind(const std::string& v, bool allow_zero) {
  if ((allow_zero && v == "zero") || parse_profile_kind(v)) return v;
  throw BadValue{"unknown profile kind '" + v + "'"};
}

std::string check_components(const std::string& v) {
  if (parse_profile_components(v)) return v;
  throw BadValue{"unknown components '" + v + "' (expected x, y or xy)"};
}

struct Key {
  std::string name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

Stenosis& stenosis(ExperimentConfig& c) {
  if (!c.mesh.stenosis) c.mesh.stenosis = Stenosis{0.0, 0.5 * c.mesh.length, 1.0};
  return *c.mesh.stenosis;
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"mesh.length", [](auto& c, const auto& v) { c.mesh.length = positive(v, "length"); },
       [](const auto& c) { return num(c.mesh.length); }},
      {"mesh.height", [](auto& c, const auto& v) { c.mesh.height = positive(v, "height"); },
       [](const auto& c) { return num(c.mesh.height); }},
      {"mesh.nx", [](auto& c, const auto& v) { c.mesh.nx = to_count(v, 1); },
       [](const auto& c) { return std::to_string(c.mesh.nx); }},
      {"mesh.ny", [](auto& c, const auto& v) { c.mesh.ny = to_count(v, 1); },
       [](const auto& c) { return std::to_string(c.mesh.ny); }},
      {"mesh.stenosis.amplitude", [](auto& c, const auto& v) { stenosis(c).amplitude = nonnegative(v, "stenosis amplitude"); },
       [](const auto& c) { return num(c.mesh.stenosis ? c.mesh.stenosis->amplitude : 0.0); }},
      {"mesh.stenosis.center", [](auto& c, const auto& v) { stenosis(c).center = to_double(v); },
       [](const auto& c) { return num(c.mesh.stenosis ? c.mesh.stenosis->center : 0.5 * c.mesh.length); }},
      {"mesh.stenosis.width", [](auto& c, const auto& v) { stenosis(c).width = positive(v, "stenosis width"); },
       [](const auto& c) { return num(c.mesh.stenosis ? c.mesh.stenosis->width : 1.0); }},
      {"mesh.file",
       [](auto& c, const auto& v) {
         if (v.empty()) c.mesh_file.reset(); else c.mesh_file = v;
       },
       [](const auto& c) { return c.mesh_file ? c.mesh_file->string() : std::string(); }},
      {"flow.viscosity", [](auto& c, const auto& v) { c.viscosity = positive(v, "viscosity"); },
       [](const auto& c) { return num(c.viscosity); }},
      {"force.x", [](auto& c, const auto& v) { c.force[0] = to_double(v); },
       [](const auto& c) { return num(c.force[0]); }},
      {"force.y", [](auto& c, const auto& v) { c.force[1] = to_double(v); },
       [](const auto& c) { return num(c.force[1]); }},
      {"inlet.kind", [](auto& c, const auto& v) { c.inlet.kind = check_profile_kind(v, false); },
       [](const auto& c) { return c.inlet.kind; }},
      {"inlet.amplitude", [](auto& c, const auto& v) { c.inlet.amplitude = to_double(v); },
       [](const auto& c) { return num(c.inlet.amplitude); }},
      {"inlet.components", [](auto& c, const auto& v) { c.inlet.components = check_components(v); },
       [](const auto& c) { return c.inlet.components; }},
      {"cost.beta1", [](auto& c, const auto& v) { c.beta1 = positive(v, "beta1"); },
       [](const auto& c) { return num(c.beta1); }},
      {"cost.beta2", [](auto& c, const auto& v) { c.beta2 = nonnegative(v, "beta2"); },
       [](const auto& c) { return num(c.beta2); }},
      {"cost.beta3", [](auto& c, const auto& v) { c.beta3 = nonnegative(v, "beta3"); },
       [](const auto& c) { return num(c.beta3); }},
      {"omega_part.variant",
       [](auto& c, const auto& v) {
         const auto var = parse_omega_variant(v);
         if (!var) throw BadValue{"unknown variant '" + v + "' (expected full, sections or subdomains)"};
         c.omega.variant = *var;
       },
       [](const auto& c) { return std::string(to_string(c.omega.variant)); }},
      {"omega_part.sections",
       [](auto& c, const auto& v) {
         auto list = v.empty() ? std::vector<double>{} : to_list(v);
         for (std::size_t i = 1; i < list.size(); ++i) {
           if (list[i] == list[i - 1]) throw BadValue{"duplicate section position " + num(list[i])};
           if (list[i] < list[i - 1]) throw BadValue{"section positions must be strictly increasing"};
         }
         c.omega.sections = std::move(list);
       },
       [](const auto& c) { return join(c.omega.sections); }},
      {"omega_part.subdomains",
       [](auto& c, const auto& v) {
         std::vector<std::pair<double, double>> ranges;
         if (!v.empty()) {
           for (const auto& item : split_list(v)) {
             const auto colon = item.find(':');
             if (colon == std::string::npos) throw BadValue{"subdomain '" + item + "' is not of the form x0:x1"};
             const double a = to_double(trim(item.substr(0, colon)));
             const double b = to_double(trim(item.substr(colon + 1)));
             if (!(a < b)) throw BadValue{"subdomain '" + item + "' has x0 >= x1"};
             ranges.emplace_back(a, b);
           }
         }
         auto sorted = ranges;
         std::sort(sorted.begin(), sorted.end());
         for (std::size_t i = 1; i < sorted.size(); ++i) {
           if (sorted[i].first < sorted[i - 1].second) throw BadValue{"subdomain ranges overlap"};
         }
         c.omega.subdomains = std::move(ranges);
       },
       [](const auto& c) {
         std::string out;
         for (std::size_t i = 0; i < c.omega.subdomains.size(); ++i) {
           out += (i ? ", " : "") + num(c.omega.subdomains[i].first) + ":" + num(c.omega.subdomains[i].second);
         }
         return out;
       }},
      {"data.file",
       [](auto& c, const auto& v) {
         if (v.empty()) c.data_file.reset(); else c.data_file = v;
       },
       [](const auto& c) { return c.data_file ? c.data_file->string() : std::string(); }},
      {"data.noise", [](auto& c, const auto& v) { c.noise = nonnegative(v, "noise"); },
       [](const auto& c) { return num(c.noise); }},
      {"data.seed",
       [](auto& c, const auto& v) {
         try {
           std::size_t used = 0;
           c.seed = std::stoull(v, &used);
           if (used != v.size() || v.front() == '-') throw BadValue{};
         } catch (const std::exception&) {
           throw BadValue{"expected an unsigned integer, got '" + v + "'"};
         } catch (const BadValue&) {
           throw BadValue{"expected an unsigned integer, got '" + v + "'"};
         }
       },
       [](const auto& c) { return std::to_string(c.seed); }},
      {"admissible.rho",
       [](auto& c, const auto& v) {
         if (v == "auto") c.rho.reset(); else c.rho = positive(v, "rho");
       },
       [](const auto& c) { return c.rho ? num(*c.rho) : std::string("auto"); }},
      {"picard.tol", [](auto& c, const auto& v) { c.picard.tol = positive(v, "picard tolerance"); },
       [](const auto& c) { return num(c.picard.tol); }},
      {"picard.max_iter", [](auto& c, const auto& v) { c.picard.max_iter = static_cast<int>(to_count(v, 1)); },
       [](const auto& c) { return std::to_string(c.picard.max_iter); }},
      {"picard.damping",
       [](auto& c, const auto& v) {
         const double d = to_double(v);
         if (!(d > 0.0 && d <= 1.0)) throw BadValue{"damping must lie in (0, 1]"};
         c.picard.damping = d;
       },
       [](const auto& c) { return num(c.picard.damping); }},
      {"optimizer.max_iter", [](auto& c, const auto& v) { c.optimizer.max_iter = static_cast<int>(to_count(v, 0)); },
       [](const auto& c) { return std::to_string(c.optimizer.max_iter); }},
      {"optimizer.gtol", [](auto& c, const auto& v) { c.optimizer.gtol = nonnegative(v, "gtol"); },
       [](const auto& c) { return num(c.optimizer.gtol); }},
      {"optimizer.armijo",
       [](auto& c, const auto& v) {
         const double d = to_double(v);
         if (!(d > 0.0 && d < 1.0)) throw BadValue{"Armijo constant must lie in (0, 1)"};
         c.optimizer.armijo_sigma = d;
       },
       [](const auto& c) { return num(c.optimizer.armijo_sigma); }},
      {"optimizer.max_halvings",
       [](auto& c, const auto& v) { c.optimizer.max_halvings = static_cast<int>(to_count(v, 0)); },
       [](const auto& c) { return std::to_string(c.optimizer.max_halvings); }},
      {"optimizer.initial_step", [](auto& c, const auto& v) { c.optimizer.initial_step = positive(v, "initial step"); },
       [](const auto& c) { return num(c.optimizer.initial_step); }},
      {"optimizer.bb",
       [](auto& c, const auto& v) {
         if (v == "true") c.optimizer.bb_step = true;
         else if (v == "false") c.optimizer.bb_step = false;
         else throw BadValue{"expected true or false, got '" + v + "'"};
       },
       [](const auto& c) { return std::string(c.optimizer.bb_step ? "true" : "false"); }},
      {"optimizer.gradient",
       [](auto& c, const auto& v) {
         if (v == "adjoint") c.optimizer.gradient = GradientKind::Adjoint;
         else if (v == "fd") c.optimizer.gradient = GradientKind::FiniteDifference;
         else throw BadValue{"expected adjoint or fd, got '" + v + "'"};
       },
       [](const auto& c) { return std::string(c.optimizer.gradient == GradientKind::Adjoint ? "adjoint" : "fd"); }},
      {"optimizer.fd_step", [](auto& c, const auto& v) { c.optimizer.fd_step = positive(v, "fd step"); },
       [](const auto& c) { return num(c.optimizer.fd_step); }},
      {"init.kind", [](auto& c, const auto& v) { c.init.kind = check_profile_kind(v, true); },
       [](const auto& c) { return c.init.kind; }},
      {"init.amplitude", [](auto& c, const auto& v) { c.init.amplitude = to_double(v); },
       [](const auto& c) { return num(c.init.amplitude); }},
      {"init.components", [](auto& c, const auto& v) { c.init.components = check_components(v); },
       [](const auto& c) { return c.init.components; }},
      {"sweep.amplitudes",
       [](auto& c, const auto& v) {
         auto list = to_list(v);
         if (list.empty()) throw BadValue{"at least one amplitude is required"};
         c.sweep_amplitudes = std::move(list);
       },
       [](const auto& c) { return join(c.sweep_amplitudes); }},
      {"sweep.viscosities",
       [](auto& c, const auto& v) {
         auto list = to_list(v);
         if (list.empty()) throw BadValue{"at least one viscosity is required"};
         for (double x : list) {
           if (!(x > 0.0)) throw BadValue{"viscosity must be positive"};
         }
         c.sweep_viscosities = std::move(list);
       },
       [](const auto& c) { return join(c.sweep_viscosities); }},
      {"verify.cases", [](auto& c, const auto& v) { c.verify_cases = to_count(v, 10); },
       [](const auto& c) { return std::to_string(c.verify_cases); }},
      {"verify.gradient_cases", [](auto& c, const auto& v) { c.verify_gradient_cases = to_count(v, 1); },
       [](const auto& c) { return std::to_string(c.verify_gradient_cases); }},
      {"verify.fd_steps",
       [](auto& c, const auto& v) {
         auto list = to_list(v);
         if (list.empty()) throw BadValue{"at least one step is required"};
         for (double x : list) {
           if (!(x > 0.0)) throw BadValue{"finite-difference steps must be positive"};
         }
         c.verify_fd_steps = std::move(list);
       },
       [](const auto& c) { return join(c.verify_fd_steps); }},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::map<std::string, std::size_t> seen;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line);
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) throw ParseError("missing key before '='", line);
    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return k.name == key; });
    if (it == table.end()) throw ParseError("unknown key '" + key + "'", line);
    if (const auto prev = seen.find(key); prev != seen.end()) {
      throw ParseError("duplicate key '" + key + "' (first set on line " + std::to_string(prev->second) + ")", line);
    }
    seen[key] = line;
    try {
      it->set(cfg, value);
    } catch (const BadValue& bad) {
      throw ParseError(key + ": " + bad.message, line);
    }
  }

  const auto line_of = [&](const std::string& key) {
    const auto f = seen.find(key);
    return f == seen.end() ? line : f->second;
  };
  if (cfg.mesh.stenosis && cfg.mesh.stenosis->amplitude == 0.0) cfg.mesh.stenosis.reset();
  if (cfg.mesh.stenosis && !(cfg.mesh.stenosis->amplitude < 0.5 * cfg.mesh.height)) {
    throw ParseError("mesh.stenosis.amplitude: stenosis amplitude must be below half the channel height",
                     line_of("mesh.stenosis.amplitude"));
  }
  if (cfg.omega.variant == OmegaVariant::Sections && cfg.omega.sections.empty()) {
    throw ParseError("missing required key 'omega_part.sections' for variant sections", line_of("omega_part.variant"));
  }
  if (cfg.omega.variant == OmegaVariant::Subdomains && cfg.omega.subdomains.empty()) {
    throw ParseError("missing required key 'omega_part.subdomains' for variant subdomains",
                     line_of("omega_part.variant"));
  }
  for (double a : cfg.omega.sections) {
    if (!(a > 0.0 && a < cfg.mesh.length)) {
      throw ParseError("omega_part.sections: position " + num(a) + " is outside (0, length)",
                       line_of("omega_part.sections"));
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse_config(in);
}

void write_config(const ExperimentConfig& config, std::ostream& out) {
  for (const auto& k : keys()) out << k.name << " = " << k.get(config) << '\n';
}

OmegaPartSpec resolve_omega(const OmegaConfig& omega, const FESpace& space) {
  switch (omega.variant) {
    case OmegaVariant::Full:
      return OmegaPartSpec::full();
    case OmegaVariant::Sections: {
      auto spec = OmegaPartSpec::cross_sections(omega.sections);
      spec.check(space);
      return spec;
    }
    case OmegaVariant::Subdomains: {
      std::vector<std::vector<std::size_t>> sets;
      for (const auto& [a, b] : omega.subdomains) {
        auto set = elements_in_x_range(space, a, b);
        if (set.empty()) {
          throw ParameterError("omega_part subdomain " + num(a) + ":" + num(b) + " contains no elements");
        }
        sets.push_back(std::move(set));
      }
      auto spec = OmegaPartSpec::patches(std::move(sets));
      spec.check(space);
      return spec;
    }
  }
  return OmegaPartSpec::full();
}

}  // namespace inflow
