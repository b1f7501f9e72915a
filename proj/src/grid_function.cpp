#include "fraclab/grid_function.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fraclab {

GridFunction::GridFunction(TensorMesh mesh, double fill)
    : mesh_(std::move(mesh)), values_(mesh_.size(), fill) {}

GridFunction::GridFunction(TensorMesh mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  if (values_.size() != mesh_.size()) throw std::invalid_argument("GridFunction: size mismatch");
}

GridFunction GridFunction::sample_dirichlet(const TensorMesh& mesh,
                                            const std::function<double(double, double)>& f) {
  GridFunction u(mesh);
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    if (mesh.is_boundary(i)) continue;
    const auto p = mesh.point(i);
    u.values_[i] = f(p[0], p[1]);
  }
  return u;
}

GridFunction GridFunction::sample(const TensorMesh& mesh,
                                  const std::function<double(double, double)>& f) {
  GridFunction u(mesh);
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const auto p = mesh.point(i);
    u.values_[i] = f(p[0], p[1]);
  }
  return u;
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool GridFunction::finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

double GridFunction::boundary_max_abs() const {
  double m = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (mesh_.is_boundary(i)) m = std::max(m, std::abs(values_[i]));
  return m;
}

void write_csv(std::ostream& os, const GridFunction& u) {
  const auto& mesh = u.mesh();
  os << (mesh.dim() == 1 ? "x,value\n" : "x,y,value\n");
  os << std::setprecision(17);
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const auto p = mesh.point(i);
    os << p[0] << ',';
    if (mesh.dim() == 2) os << p[1] << ',';
    os << u[i] << '\n';
  }
}

GridFunction read_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("read_csv: empty input");
  const int dim = header == "x,value" ? 1 : (header == "x,y,value" ? 2 : 0);
  if (dim == 0) throw std::runtime_error("read_csv: unexpected header '" + header + "'");
  std::vector<double> xs, ys, vals;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    std::vector<double> cols;
    while (std::getline(ls, tok, ',')) cols.push_back(std::stod(tok));
    if (static_cast<int>(cols.size()) != dim + 1)
      throw std::runtime_error("read_csv: malformed row '" + line + "'");
    xs.push_back(cols[0]);
    if (dim == 2) ys.push_back(cols[1]);
    vals.push_back(cols.back());
  }
  if (dim == 1) return GridFunction(TensorMesh({xs}), vals);
  // Recover the tensor axes from row-major ordering.
  std::size_t n1 = 1;
  while (n1 < xs.size() && xs[n1] == xs[0]) ++n1;
  Axis ax, ay(ys.begin(), ys.begin() + static_cast<std::ptrdiff_t>(n1));
  for (std::size_t i = 0; i < xs.size(); i += n1) ax.push_back(xs[i]);
  return GridFunction(TensorMesh({ax, ay}), vals);
}

namespace {

template <class T>
void put(std::ostream& os, T v) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("read_binary_grid: truncated file");
  return v;
}

constexpr char kMagic[8] = {'F', 'R', 'L', 'G', 'R', 'I', 'D', '1'};

}  // namespace

void write_binary_grid(const std::string& path, const BinaryGrid& grid) {
  std::size_t expect = 1;
  for (const auto& a : grid.axes) expect *= a.size();
  if (grid.axes.empty() || grid.axes.size() > 3 || expect != grid.values.size())
    throw std::invalid_argument("write_binary_grid: inconsistent axes/values");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_binary_grid: cannot open " + path);
  os.write(kMagic, 8);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(grid.axes.size()));
  put<std::uint32_t>(os, 1);
  for (const auto& a : grid.axes) put<std::uint64_t>(os, a.size());
  for (const auto& a : grid.axes)
    for (double v : a) put<double>(os, v);
  for (double v : grid.values) put<double>(os, v);
}

BinaryGrid read_binary_grid(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_binary_grid: cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("read_binary_grid: bad magic in " + path);
  const auto d = get<std::uint32_t>(is);
  const auto dtype = get<std::uint32_t>(is);
  if (d < 1 || d > 3 || dtype != 1) throw std::runtime_error("read_binary_grid: bad header");
  std::vector<std::uint64_t> n(d);
  for (auto& v : n) v = get<std::uint64_t>(is);
  BinaryGrid g;
  std::size_t total = 1;
  for (auto len : n) {
    Axis a(len);
    for (auto& v : a) v = get<double>(is);
    g.axes.push_back(std::move(a));
    total *= len;
  }
  g.values.resize(total);
  for (auto& v : g.values) v = get<double>(is);
  return g;
}

}  // namespace fraclab
