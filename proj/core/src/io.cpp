#include "inflow/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "inflow/errors.hpp"
#include "line_reader.hpp"

namespace inflow {

namespace {

using detail::expect_end;
using detail::LineReader;
using detail::read_double;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void write_nodes(const MeasurementSet& data, const FESpace& space, const std::vector<std::size_t>& nodes,
                 std::ostream& out) {
  const std::size_t ns = space.scalar_count();
  out << "nodes " << nodes.size() << ' ' << ns << '\n';
  for (std::size_t s : nodes) {
    out << s << ' ' << num(data.ud[idx(s)]) << ' ' << num(data.ud[idx(ns + s)]) << '\n';
  }
}

void next_line(LineReader& reader, std::istringstream& tokens, const char* what) {
  if (!reader.next(tokens)) {
    throw ParseError(std::string("unexpected end of file, expected ") + what, reader.line() + 1);
  }
}

std::size_t read_count(std::istringstream& tokens, std::size_t line, const char* what) {
  long long v = -1;
  if (!(tokens >> v) || v < 0) throw ParseError(std::string("expected a non-negative ") + what, line);
  return static_cast<std::size_t>(v);
}

void expect_word(std::istringstream& tokens, std::size_t line, const std::string& word) {
  std::string w;
  if (!(tokens >> w) || w != word) throw ParseError("expected '" + word + "'", line);
}

// Reads the rest of a "nodes <count> <scalar_count>" header and its samples.
Eigen::VectorXd read_nodes(LineReader& reader, std::istringstream& tokens, bool complete) {
  const std::size_t count = read_count(tokens, reader.line(), "node count");
  const std::size_t ns = read_count(tokens, reader.line(), "scalar node total");
  expect_end(tokens, reader.line());
  if (count > ns) throw ParseError("more nodes than the scalar node total", reader.line());
  if (complete && count != ns) throw ParseError("full-domain data must list every node", reader.line());
  Eigen::VectorXd ud = Eigen::VectorXd::Zero(idx(2 * ns));
  std::vector<char> seen(ns, 0);
  for (std::size_t i = 0; i < count; ++i) {
    next_line(reader, tokens, "a node sample");
    const std::size_t s = read_count(tokens, reader.line(), "node id");
    if (s >= ns) throw ParseError("node id " + std::to_string(s) + " out of range", reader.line());
    if (seen[s]) throw ParseError("node id " + std::to_string(s) + " listed twice", reader.line());
    seen[s] = 1;
    ud[idx(s)] = read_double(tokens, reader.line(), "velocity value");
    ud[idx(ns + s)] = read_double(tokens, reader.line(), "velocity value");
    expect_end(tokens, reader.line());
  }
  return ud;
}

}  // namespace

void write_measurements(const MeasurementSet& data, const FESpace& space, std::ostream& out) {
  out << "measurements 1\n";
  out << "variant " << to_string(data.omega.variant) << '\n';
  if (data.noise) {
    out << "noise " << num(data.noise->sigma) << ' ' << data.noise->seed << ' ' << data.noise->generator << '\n';
  }
  if (data.truth) {
    const auto& g = *data.truth;
    out << "truth " << g.size() << '\n';
    for (std::size_t i = 0; i < g.size(); ++i) out << num(g.s[i]) << ' ' << num(g.gx[i]) << ' ' << num(g.gy[i]) << '\n';
  }
  switch (data.omega.variant) {
    case OmegaVariant::Full: {
      std::vector<std::size_t> all(space.scalar_count());
      for (std::size_t s = 0; s < all.size(); ++s) all[s] = s;
      write_nodes(data, space, all, out);
      break;
    }
    case OmegaVariant::Sections:
      out << "sections " << data.sections.size() << '\n';
      for (const auto& sec : data.sections) {
        out << "section " << num(sec.a) << ' ' << sec.y.size() << '\n';
        for (std::size_t q = 0; q < sec.y.size(); ++q) {
          out << num(sec.y[q]) << ' ' << num(sec.value[q][0]) << ' ' << num(sec.value[q][1]) << '\n';
        }
      }
      break;
    case OmegaVariant::Subdomains: {
      out << "subdomains " << data.omega.subdomains.size() << '\n';
      std::set<std::size_t> nodes;
      for (const auto& set : data.omega.subdomains) {
        out << "subdomain " << set.size() << '\n';
        for (std::size_t i = 0; i < set.size(); ++i) out << (i ? " " : "") << set[i];
        out << '\n';
        for (std::size_t t : set) {
          for (std::size_t s : space.element_nodes(t)) nodes.insert(s);
        }
      }
      write_nodes(data, space, {nodes.begin(), nodes.end()}, out);
      break;
    }
  }
}

void save_measurements(const MeasurementSet& data, const FESpace& space, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_measurements(data, space, out);
  if (!out) throw IoError("write failed for " + path.string());
}

MeasurementSet read_measurements(std::istream& in) {
  LineReader reader(in);
  std::istringstream tokens;
  if (!reader.next(tokens)) throw ParseError("empty measurement file", 1);
  std::string magic;
  int version = 0;
  if (!(tokens >> magic >> version) || magic != "measurements") {
    throw ParseError("expected 'measurements 1' header", reader.line());
  }
  if (version != 1) throw ParseError("unsupported measurement format version " + std::to_string(version), reader.line());
  expect_end(tokens, reader.line());

  MeasurementSet data;
  next_line(reader, tokens, "'variant'");
  expect_word(tokens, reader.line(), "variant");
  std::string variant;
  tokens >> variant;
  const auto v = parse_omega_variant(variant);
  if (!v) throw ParseError("unknown variant '" + variant + "'", reader.line());
  expect_end(tokens, reader.line());
  data.omega.variant = *v;

  next_line(reader, tokens, "a data block");
  std::string word;
  tokens >> word;
  if (word == "noise") {
    NoiseInfo noise;
    noise.sigma = read_double(tokens, reader.line(), "noise sigma");
    if (!(tokens >> noise.seed)) throw ParseError("expected a noise seed", reader.line());
    if (!(tokens >> noise.generator)) throw ParseError("expected a generator name", reader.line());
    expect_end(tokens, reader.line());
    data.noise = noise;
    next_line(reader, tokens, "a data block");
    tokens >> word;
  }
  if (word == "truth") {
    const std::size_t n = read_count(tokens, reader.line(), "truth length");
    expect_end(tokens, reader.line());
    ControlProfile g;
    for (std::size_t i = 0; i < n; ++i) {
      next_line(reader, tokens, "a truth sample");
      g.s.push_back(read_double(tokens, reader.line(), "inlet parameter"));
      g.gx.push_back(read_double(tokens, reader.line(), "inlet value"));
      g.gy.push_back(read_double(tokens, reader.line(), "inlet value"));
      expect_end(tokens, reader.line());
    }
    try {
      g.check();
    } catch (const InvariantError& e) {
      throw ParseError(std::string("invalid truth profile: ") + e.what(), reader.line());
    }
    data.truth = std::move(g);
    next_line(reader, tokens, "a data block");
    tokens >> word;
  }

  switch (data.omega.variant) {
    case OmegaVariant::Full:
      if (word != "nodes") throw ParseError("expected 'nodes'", reader.line());
      data.ud = read_nodes(reader, tokens, true);
      break;
    case OmegaVariant::Sections: {
      if (word != "sections") throw ParseError("expected 'sections'", reader.line());
      const std::size_t m = read_count(tokens, reader.line(), "section count");
      expect_end(tokens, reader.line());
      for (std::size_t k = 0; k < m; ++k) {
        next_line(reader, tokens, "'section'");
        expect_word(tokens, reader.line(), "section");
        SectionSamples sec;
        sec.a = read_double(tokens, reader.line(), "section position");
        const std::size_t count = read_count(tokens, reader.line(), "sample count");
        expect_end(tokens, reader.line());
        for (std::size_t q = 0; q < count; ++q) {
          next_line(reader, tokens, "a section sample");
          sec.y.push_back(read_double(tokens, reader.line(), "sample position"));
          Vec2 val;
          val[0] = read_double(tokens, reader.line(), "velocity value");
          val[1] = read_double(tokens, reader.line(), "velocity value");
          expect_end(tokens, reader.line());
          sec.value.push_back(val);
        }
        data.omega.sections.push_back(sec.a);
        data.sections.push_back(std::move(sec));
      }
      break;
    }
    case OmegaVariant::Subdomains: {
      if (word != "subdomains") throw ParseError("expected 'subdomains'", reader.line());
      const std::size_t m = read_count(tokens, reader.line(), "subdomain count");
      expect_end(tokens, reader.line());
      for (std::size_t k = 0; k < m; ++k) {
        next_line(reader, tokens, "'subdomain'");
        expect_word(tokens, reader.line(), "subdomain");
        const std::size_t count = read_count(tokens, reader.line(), "element count");
        expect_end(tokens, reader.line());
        next_line(reader, tokens, "an element id list");
        std::vector<std::size_t> set;
        for (std::size_t i = 0; i < count; ++i) set.push_back(read_count(tokens, reader.line(), "element id"));
        expect_end(tokens, reader.line());
        data.omega.subdomains.push_back(std::move(set));
      }
      next_line(reader, tokens, "'nodes'");
      expect_word(tokens, reader.line(), "nodes");
      data.ud = read_nodes(reader, tokens, false);
      break;
    }
  }
  if (reader.next(tokens)) throw ParseError("unexpected content after the data block", reader.line());
  return data;
}

MeasurementSet load_measurements(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_measurements(in);
}

void write_vtk(const FlowField& field, std::ostream& out) {
  field.check();
  const FESpace& space = *field.space;
  const std::size_t nn = space.node_count();
  const std::size_t ns = space.scalar_count();
  const std::size_t ne = space.element_count();
  out << "# vtk DataFile Version 3.0\n";
  out << "inflow flow field\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << ns << " double\n";
  for (const auto& p : space.scalar_points()) out << num(p.x) << ' ' << num(p.y) << " 0\n";
  out << "CELLS " << ne << ' ' << ne * 7 << '\n';
  for (std::size_t t = 0; t < ne; ++t) {
    const auto& n = space.element_nodes(t);
    // VTK order: vertices, then midpoints of edges (0,1), (1,2), (2,0).
    out << "6 " << n[0] << ' ' << n[1] << ' ' << n[2] << ' ' << n[5] << ' ' << n[3] << ' ' << n[4] << '\n';
  }
  out << "CELL_TYPES " << ne << '\n';
  for (std::size_t t = 0; t < ne; ++t) out << "22\n";
  out << "POINT_DATA " << ns << '\n';
  out << "VECTORS velocity double\n";
  for (std::size_t s = 0; s < ns; ++s) out << num(field.u[idx(s)]) << ' ' << num(field.u[idx(ns + s)]) << " 0\n";
  out << "SCALARS pressure double 1\n";
  out << "LOOKUP_TABLE default\n";
  for (std::size_t s = 0; s < ns; ++s) {
    double p = 0.0;
    if (s < nn) {
      p = field.p[idx(s)];
    } else {
      const auto& e = space.edges()[s - nn];
      p = 0.5 * (field.p[idx(e[0])] + field.p[idx(e[1])]);
    }
    out << num(p) << '\n';
  }
}

void save_vtk(const FlowField& field, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_vtk(field, out);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace inflow
