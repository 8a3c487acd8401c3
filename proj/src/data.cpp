#include "axpgd/data.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "axpgd/errors.hpp"

namespace axpgd::data {

void MultigroupXS::validate() const {
  if (groups < 1 || order < 0) throw DataError("cross sections need G >= 1 and L >= 0");
  if (static_cast<int>(energy_bounds.size()) != groups + 1)
    throw DataError("expected G+1 energy bounds");
  lethargy_widths(energy_bounds);
  if (static_cast<int>(slots.size()) != num_areas * num_layers)
    throw DataError("cross sections must cover every (area, layer) slot");
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const Material& m = slots[s];
    if (m.total.size() != groups || static_cast<int>(m.scatter.size()) != order + 1)
      throw DataError("slot " + std::to_string(s) + " has inconsistent sizes");
    for (int g = 0; g < groups; ++g) {
      if (!(m.total[g] >= 0)) throw DataError("negative total cross section in slot " + std::to_string(s));
      const double out = m.scatter[0].row(g).sum();
      if (out > m.total[g] * (1 + 1e-12))
        throw DataError("scattering exceeds total cross section in slot " + std::to_string(s) +
                        ", group " + std::to_string(g));
    }
    for (const auto& sl : m.scatter)
      if (sl.rows() != groups || sl.cols() != groups)
        throw DataError("scattering matrix must be G x G");
  }
}

LethargyWidths lethargy_widths(const std::vector<double>& energy_bounds) {
  if (energy_bounds.size() < 2) throw DataError("need at least two energy bounds");
  LethargyWidths w;
  for (std::size_t g = 1; g < energy_bounds.size(); ++g) {
    const double hi = energy_bounds[g - 1];
    const double lo = energy_bounds[g];
    if (!(lo > 0) || !(hi > lo)) throw DataError("energy bounds must be positive and strictly decreasing");
    w.push_back(std::log(hi / lo));
  }
  return w;
}

std::vector<double> group_weights(const std::vector<double>& energy_bounds) {
  auto w = lethargy_widths(energy_bounds);
  for (double& x : w) x = 1 / x;
  return w;
}

namespace {

// Reads the next token, skipping '#' comments through end of line.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}
  double number() {
    std::string tok;
    while (true) {
      if (!(in_ >> tok)) throw DataError("unexpected end of cross-section data");
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in_, rest);
        continue;
      }
      break;
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw DataError("bad number '" + tok + "'");
      return v;
    } catch (const std::logic_error&) {
      throw DataError("bad number '" + tok + "'");
    }
  }
  int integer() {
    const double v = number();
    if (v != std::floor(v)) throw DataError("expected an integer");
    return static_cast<int>(v);
  }

 private:
  std::istream& in_;
};

}  // namespace

MultigroupXS read_xs(std::istream& in) {
  TokenReader r(in);
  MultigroupXS xs;
  xs.groups = r.integer();
  xs.order = r.integer();
  xs.num_areas = r.integer();
  xs.num_layers = r.integer();
  if (xs.groups < 1 || xs.order < 0 || xs.num_areas < 1 || xs.num_layers < 1)
    throw DataError("bad cross-section header");
  for (int g = 0; g <= xs.groups; ++g) xs.energy_bounds.push_back(r.number());
  for (int s = 0; s < xs.num_areas * xs.num_layers; ++s) {
    Material m;
    m.name = "slot" + std::to_string(s);
    m.total.resize(xs.groups);
    for (int g = 0; g < xs.groups; ++g) m.total[g] = r.number();
    for (int l = 0; l <= xs.order; ++l) {
      Eigen::MatrixXd sl(xs.groups, xs.groups);
      for (int gf = 0; gf < xs.groups; ++gf)
        for (int gt = 0; gt < xs.groups; ++gt) sl(gf, gt) = r.number();
      m.scatter.push_back(sl);
    }
    xs.slots.push_back(std::move(m));
  }
  xs.validate();
  return xs;
}

MultigroupXS read_xs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open cross-section file " + path);
  return read_xs(in);
}

void write_xs(std::ostream& out, const MultigroupXS& xs) {
  out << std::setprecision(17);
  out << xs.groups << ' ' << xs.order << ' ' << xs.num_areas << ' ' << xs.num_layers << '\n';
  for (double e : xs.energy_bounds) out << e << ' ';
  out << '\n';
  for (int i = 0; i < xs.num_areas; ++i)
    for (int j = 0; j < xs.num_layers; ++j) {
      const Material& m = xs.at(i, j);
      out << "# area " << i << " layer " << j << " (" << m.name << ")\n";
      for (int g = 0; g < xs.groups; ++g) out << m.total[g] << '\n';
      for (const auto& sl : m.scatter) {
        for (int gf = 0; gf < xs.groups; ++gf) {
          for (int gt = 0; gt < xs.groups; ++gt) out << sl(gf, gt) << ' ';
          out << '\n';
        }
      }
    }
}

MultigroupXS assemble_xs(const std::vector<Material>& materials,
                         const std::vector<double>& energy_bounds, int order,
                         int num_areas, int num_layers, const std::vector<int>& material_ids) {
  MultigroupXS xs;
  xs.groups = static_cast<int>(energy_bounds.size()) - 1;
  xs.order = order;
  xs.num_areas = num_areas;
  xs.num_layers = num_layers;
  xs.energy_bounds = energy_bounds;
  if (static_cast<int>(material_ids.size()) != num_areas * num_layers)
    throw MaterialError("material table size mismatch");
  for (int id : material_ids) {
    if (id < 0 || id >= static_cast<int>(materials.size()))
      throw MaterialError("material table references unknown material " + std::to_string(id));
    Material m = materials[id];
    while (static_cast<int>(m.scatter.size()) < order + 1)
      m.scatter.push_back(Eigen::MatrixXd::Zero(xs.groups, xs.groups));
    m.scatter.resize(order + 1);
    xs.slots.push_back(std::move(m));
  }
  xs.validate();
  return xs;
}

}  // namespace axpgd::data
