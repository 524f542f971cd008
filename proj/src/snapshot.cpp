#include "epsflow/snapshot.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace epsflow {

namespace {

constexpr char kMagic[8] = {'E', 'P', 'S', 'F', 'I', 'E', 'L', 'D'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void get(std::ifstream& is, T* v) {
  is.read(reinterpret_cast<char*>(v), sizeof(T));
  if (!is) throw Error("snapshot: truncated file");
}

}  // namespace

void write_snapshot(const Field& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("snapshot: cannot open " + path + " for writing");
  os.write(kMagic, sizeof(kMagic));
  put(os, kVersion);
  put(os, static_cast<std::int32_t>(f.k));
  for (int a = 0; a < 3; ++a) put(os, static_cast<std::int32_t>(f.grid.n[a]));
  put(os, f.grid.h);
  for (int a = 0; a < 3; ++a) put(os, f.grid.origin[a]);
  put(os, static_cast<std::int32_t>(f.grid.domain));
  for (int a = 0; a < 3; ++a) put(os, f.grid.center[a]);
  put(os, f.grid.radius);
  os.write(reinterpret_cast<const char*>(f.values.data()),
           static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  os.write(reinterpret_cast<const char*>(f.dirichlet.data()),
           static_cast<std::streamsize>(f.dirichlet.size()));
  if (!os) throw Error("snapshot: write failed for " + path);
}

Field read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("snapshot: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw Error("snapshot: bad magic in " + path);
  std::uint32_t version = 0;
  get(is, &version);
  if (version != kVersion) throw Error("snapshot: unsupported version");
  std::int32_t k = 0;
  get(is, &k);
  Grid g;
  for (int a = 0; a < 3; ++a) {
    std::int32_t v;
    get(is, &v);
    g.n[a] = v;
  }
  get(is, &g.h);
  for (int a = 0; a < 3; ++a) get(is, &g.origin[a]);
  std::int32_t dom = 0;
  get(is, &dom);
  g.domain = static_cast<DomainKind>(dom);
  for (int a = 0; a < 3; ++a) get(is, &g.center[a]);
  get(is, &g.radius);
  Field f = make_field(g, k);
  is.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  is.read(reinterpret_cast<char*>(f.dirichlet.data()),
          static_cast<std::streamsize>(f.dirichlet.size()));
  if (!is) throw Error("snapshot: truncated data in " + path);
  if (!f.all_finite()) throw Error("snapshot: non-finite values in " + path);
  return f;
}

void write_vtk(const Field& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("vtk: cannot open " + path + " for writing");
  char buf[128];
  os << "# vtk DataFile Version 3.0\n";
  os << "epsflow field\n";
  os << "ASCII\n";
  os << "DATASET STRUCTURED_POINTS\n";
  os << "DIMENSIONS " << f.grid.n[0] << " " << f.grid.n[1] << " " << f.grid.n[2] << "\n";
  std::snprintf(buf, sizeof(buf), "ORIGIN %.17g %.17g %.17g\n", f.grid.origin[0],
                f.grid.origin[1], f.grid.origin[2]);
  os << buf;
  std::snprintf(buf, sizeof(buf), "SPACING %.17g %.17g %.17g\n", f.grid.h, f.grid.h,
                f.grid.h);
  os << buf;
  os << "POINT_DATA " << f.grid.size() << "\n";
  for (int a = 0; a < f.k; ++a) {
    os << "SCALARS c" << a << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t idx = 0; idx < f.grid.size(); ++idx) {
      std::snprintf(buf, sizeof(buf), "%.17g\n", f.at(idx)[a]);
      os << buf;
    }
  }
  if (!os) throw Error("vtk: write failed for " + path);
}

}  // namespace epsflow
