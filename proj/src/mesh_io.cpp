#include "pforge/error.hpp"
#include "pforge/mesh.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace pforge {

MeshFormat parse_mesh_format(const std::string& s) {
    if (s == "obj" || s == "OBJ") return MeshFormat::Obj;
    if (s == "ply" || s == "PLY") return MeshFormat::Ply;
    throw Error(Errc::RangeViolation, "unknown mesh format '" + s + "'");
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};

double attr_or_zero(const std::vector<double>& v, size_t i) { return i < v.size() ? v[i] : 0.0; }
cd gauss_or_zero(const std::vector<cd>& v, size_t i) { return i < v.size() ? v[i] : cd(0, 0); }

} // namespace

void export_mesh(const Mesh3& m, const std::string& path, MeshFormat fmt) {
    std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "w"));
    if (!f) throw Error(Errc::IoFailure, "cannot open " + path + " for writing");
    std::FILE* o = f.get();
    if (fmt == MeshFormat::Obj) {
        std::fprintf(o, "# period-forge mesh\n# vertices %zu faces %zu\n# each v is followed by '#a gx gy K'\n",
                     m.pos.size(), m.tris.size());
        for (size_t i = 0; i < m.pos.size(); ++i) {
            cd g = gauss_or_zero(m.gauss, i);
            std::fprintf(o, "v %.17g %.17g %.17g\n#a %.17g %.17g %.17g\n", m.pos[i](0), m.pos[i](1), m.pos[i](2),
                         g.real(), g.imag(), attr_or_zero(m.curvature, i));
        }
        for (const Tri& t : m.tris) std::fprintf(o, "f %d %d %d\n", t[0] + 1, t[1] + 1, t[2] + 1);
    } else {
        std::fprintf(o,
                     "ply\nformat ascii 1.0\ncomment period-forge mesh\nelement vertex %zu\n"
                     "property double x\nproperty double y\nproperty double z\n"
                     "property double gx\nproperty double gy\nproperty double K\n"
                     "element face %zu\nproperty list uchar int vertex_indices\nend_header\n",
                     m.pos.size(), m.tris.size());
        for (size_t i = 0; i < m.pos.size(); ++i) {
            cd g = gauss_or_zero(m.gauss, i);
            std::fprintf(o, "%.17g %.17g %.17g %.17g %.17g %.17g\n", m.pos[i](0), m.pos[i](1), m.pos[i](2),
                         g.real(), g.imag(), attr_or_zero(m.curvature, i));
        }
        for (const Tri& t : m.tris) std::fprintf(o, "3 %d %d %d\n", t[0], t[1], t[2]);
    }
    if (std::ferror(o)) throw Error(Errc::IoFailure, "write failed for " + path);
}

Mesh3 import_mesh(const std::string& path, MeshFormat fmt) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
    Mesh3 m;
    std::string line;
    auto bad = [&](const std::string& why) { return Error(Errc::IoFailure, path + ": " + why); };
    if (fmt == MeshFormat::Obj) {
        while (std::getline(in, line)) {
            std::istringstream ss(line);
            std::string tag;
            ss >> tag;
            if (tag == "v") {
                Vec3 x;
                if (!(ss >> x(0) >> x(1) >> x(2))) throw bad("bad vertex line");
                m.pos.push_back(x);
            } else if (tag == "#a") {
                double gx, gy, K;
                if (!(ss >> gx >> gy >> K)) throw bad("bad attribute line");
                m.gauss.push_back(cd(gx, gy));
                m.curvature.push_back(K);
            } else if (tag == "f") {
                Tri t;
                for (int& i : t) {
                    std::string w;
                    if (!(ss >> w)) throw bad("bad face line");
                    i = std::stoi(w.substr(0, w.find('/'))) - 1;
                }
                m.tris.push_back(t);
            }
        }
    } else {
        size_t nv = 0, nf = 0;
        if (!std::getline(in, line) || line != "ply") throw bad("missing ply magic");
        while (std::getline(in, line) && line != "end_header") {
            std::istringstream ss(line);
            std::string a, b;
            ss >> a >> b;
            if (a == "element" && b == "vertex") ss >> nv;
            if (a == "element" && b == "face") ss >> nf;
        }
        for (size_t i = 0; i < nv; ++i) {
            Vec3 x;
            double gx, gy, K;
            if (!(in >> x(0) >> x(1) >> x(2) >> gx >> gy >> K)) throw bad("truncated vertex list");
            m.pos.push_back(x);
            m.gauss.push_back(cd(gx, gy));
            m.curvature.push_back(K);
        }
        for (size_t i = 0; i < nf; ++i) {
            int n;
            Tri t;
            if (!(in >> n >> t[0] >> t[1] >> t[2]) || n != 3) throw bad("bad face");
            m.tris.push_back(t);
        }
    }
    return m;
}

} // namespace pforge
