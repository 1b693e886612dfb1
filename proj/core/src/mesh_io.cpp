#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "voxquad/error.hpp"
#include "voxquad/mesh.hpp"

namespace voxquad {

namespace {

void expect_keyword(std::istream& in, const std::string& keyword) {
  std::string word;
  if (!(in >> word) || word != keyword) {
    throw InvalidArgument("malformed header: expected '" + keyword + "'");
  }
}

template <typename T>
T read_value(std::istream& in, const char* what) {
  T value{};
  if (!(in >> value)) throw InvalidArgument(std::string("malformed mesh file: cannot read ") + what);
  return value;
}

double read_coordinate(std::istream& in) {
  // Read as a token so that "nan"/"inf" are reported as non-finite, not as parse errors.
  std::string token = read_value<std::string>(in, "coordinate");
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("malformed mesh file: bad coordinate '" + token + "'");
  }
  if (used != token.size()) throw InvalidArgument("malformed mesh file: bad coordinate '" + token + "'");
  if (!std::isfinite(value)) throw InvalidArgument("non-finite coordinate");
  return value;
}

}  // namespace

SimplicialMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open mesh file " + path.string());

  expect_keyword(in, "dim");
  const int dim = read_value<int>(in, "dimension");
  if (dim != 1 && dim != 2) throw InvalidArgument("malformed header: dim must be 1 or 2");

  expect_keyword(in, "nodes");
  const auto n_nodes = read_value<long long>(in, "node count");
  if (n_nodes < 0) throw InvalidArgument("malformed header: negative node count");
  std::vector<Point> nodes(static_cast<std::size_t>(n_nodes));
  for (auto& p : nodes) {
    p.x = read_coordinate(in);
    if (dim == 2) p.y = read_coordinate(in);
  }

  expect_keyword(in, "elements");
  const auto n_elem = read_value<long long>(in, "element count");
  if (n_elem < 0) throw InvalidArgument("malformed header: negative element count");
  std::vector<Index> conn;
  conn.reserve(static_cast<std::size_t>(n_elem) * static_cast<std::size_t>(dim + 1));
  for (long long e = 0; e < n_elem * (dim + 1); ++e) {
    const auto idx = read_value<long long>(in, "element index");
    if (idx < 0 || idx >= n_nodes) throw InvalidArgument("index out of range");
    conn.push_back(static_cast<Index>(idx));
  }

  std::vector<Index> boundary;
  std::string word;
  if (in >> word) {
    if (word != "boundary") throw InvalidArgument("malformed mesh file: unexpected '" + word + "'");
    const auto n_b = read_value<long long>(in, "boundary count");
    if (n_b < 0) throw InvalidArgument("malformed header: negative boundary count");
    for (long long k = 0; k < n_b; ++k) {
      const auto idx = read_value<long long>(in, "boundary index");
      if (idx < 0 || idx >= n_nodes) throw InvalidArgument("index out of range");
      boundary.push_back(static_cast<Index>(idx));
    }
  }
  return SimplicialMesh(dim, std::move(nodes), std::move(conn), std::move(boundary));
}

void save_mesh(const SimplicialMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write mesh file " + path.string());
  char buf[64];
  auto real = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "dim " << mesh.dim() << '\n';
  out << "nodes " << mesh.num_nodes() << '\n';
  for (const Point& p : mesh.nodes()) {
    out << real(p.x);
    if (mesh.dim() == 2) out << ' ' << real(p.y);
    out << '\n';
  }
  out << "elements " << mesh.num_elements() << '\n';
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const auto v = mesh.element(e);
    for (std::size_t k = 0; k < v.size(); ++k) out << (k ? " " : "") << v[k];
    out << '\n';
  }
  out << "boundary " << mesh.boundary_nodes().size() << '\n';
  for (Index b : mesh.boundary_nodes()) out << b << '\n';
  if (!out) throw Error("failed writing mesh file " + path.string());
}

}  // namespace voxquad
