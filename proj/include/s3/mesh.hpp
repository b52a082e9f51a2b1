#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "s3/patch.hpp"

// Stereographic meshing of patches and ASCII OBJ / CSV export.  Vertices too
// close to the projection pole are dropped (and counted); faces touching a
// dropped vertex are omitted so the OBJ stays valid.

namespace s3 {

struct VertexAttributes {
  double nh_norm = 0.0;
  double mean_curvature = 0.0;
  bool singular = false;
};

struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;  // 0-based here; 1-based in the OBJ
  std::vector<VertexAttributes> attributes;
  std::size_t dropped_vertices = 0;
};

inline std::string format_float(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline SurfaceMesh build_mesh(const ParamPatch& patch, const Vec4& pole = Vec4(0, 0, 0, 1),
                              double pole_drop_tol = 1e-6) {
  validate(patch);
  SurfaceMesh mesh;
  std::vector<int> index(patch.nu * patch.nv, -1);
  for (std::size_t i = 0; i < patch.nu; ++i) {
    for (std::size_t j = 0; j < patch.nv; ++j) {
      const Vec4& p = patch.at(i, j);
      if (std::abs(p.dot(pole) - 1.0) < pole_drop_tol) {
        ++mesh.dropped_vertices;
        continue;
      }
      index[i * patch.nv + j] = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(stereographic(p, pole));
      VertexAttributes attr;
      const bool flagged =
          !patch.singular_flag.empty() && patch.singular_flag[i * patch.nv + j] != 0;
      if (flagged) {
        attr.singular = true;
        attr.nh_norm = 0.0;
        attr.mean_curvature = 0.0;
      } else {
        const SurfaceFrame f = frame_at_patch(patch, i, j);
        attr.nh_norm = f.nh_norm;
        attr.singular = f.singular;
        const CurvatureEstimate est = mean_curvature_estimate(patch, i, j);
        attr.mean_curvature = est.singular ? 0.0 : est.H;
      }
      mesh.attributes.push_back(attr);
    }
  }
  const std::size_t ncell_u = patch.meta.periodic_u ? patch.nu : patch.nu - 1;
  const std::size_t ncell_v = patch.meta.periodic_v ? patch.nv : patch.nv - 1;
  for (std::size_t i = 0; i < ncell_u; ++i) {
    for (std::size_t j = 0; j < ncell_v; ++j) {
      const std::size_t i1 = (i + 1) % patch.nu, j1 = (j + 1) % patch.nv;
      const int a = index[i * patch.nv + j];
      const int b = index[i1 * patch.nv + j];
      const int c = index[i1 * patch.nv + j1];
      const int d = index[i * patch.nv + j1];
      if (a >= 0 && b >= 0 && c >= 0) mesh.faces.push_back({a, b, c});
      if (a >= 0 && c >= 0 && d >= 0) mesh.faces.push_back({a, c, d});
    }
  }
  return mesh;
}

inline void write_obj(const SurfaceMesh& mesh, const std::string& path,
                      const std::string& object_name = "surface") {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_obj: cannot open " + path);
  out << "o " << object_name << "\n";
  for (const Vec3& v : mesh.vertices)
    out << "v " << format_float(v[0]) << ' ' << format_float(v[1]) << ' ' << format_float(v[2])
        << "\n";
  for (const auto& f : mesh.faces)
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << "\n";
}

/// Sidecar per-vertex attributes, RFC 4180 (CRLF, header row).
inline void write_attributes_csv(const SurfaceMesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_attributes_csv: cannot open " + path);
  out << "vertex,nh_norm,mean_curvature,singular\r\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const VertexAttributes& a = mesh.attributes[i];
    out << i + 1 << ',' << format_float(a.nh_norm) << ',' << format_float(a.mean_curvature)
        << ',' << (a.singular ? 1 : 0) << "\r\n";
  }
}

struct ObjStats {
  std::size_t vertices = 0;
  std::size_t faces = 0;
  bool indices_valid = true;
};

/// Minimal OBJ reader used for round-trip validation of the exporter.
inline ObjStats parse_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_obj: cannot open " + path);
  ObjStats stats;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) stats.indices_valid = false;
      ++stats.vertices;
    } else if (tag == "f") {
      long a, b, c;
      if (!(ss >> a >> b >> c)) {
        stats.indices_valid = false;
        continue;
      }
      ++stats.faces;
      for (long idx : {a, b, c})
        if (idx < 1 || idx > static_cast<long>(stats.vertices)) stats.indices_valid = false;
    }
  }
  return stats;
}

}  // namespace s3
