#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "veertrack/triangulation.hpp"

namespace veertrack {

// An orientation-preserving combinatorial isomorphism a -> b. Corner (t, i)
// of a goes to corner (tri[t], i + rot[t]) of b; edge[e] is the image of e.
struct TriangulationMap {
    std::vector<int> tri;
    std::vector<int> rot;
    std::vector<int> edge;
    std::vector<int> vertex;
};

// Every isomorphism a -> b accepted by `accept`. Triangulations are connected,
// so an isomorphism is determined by the image of one corner.
inline std::vector<TriangulationMap> triangulation_isomorphisms(
    const Triangulation& a, const Triangulation& b,
    const std::function<bool(const TriangulationMap&)>& accept = {}, bool first_only = false) {
    std::vector<TriangulationMap> out;
    if (a.num_faces() != b.num_faces() || a.num_edges() != b.num_edges() || a.num_vertices() != b.num_vertices() ||
        a.num_faces() == 0)
        return out;
    const int F = a.num_faces();
    for (int tb = 0; tb < F; ++tb)
        for (int r = 0; r < 3; ++r) {
            TriangulationMap m;
            m.tri.assign(F, -1);
            m.rot.assign(F, 0);
            m.edge.assign(a.num_edges(), -1);
            m.vertex.assign(a.num_vertices(), -1);
            std::vector<bool> hit(F, false);
            std::vector<int> queue{0};
            m.tri[0] = tb;
            m.rot[0] = r;
            hit[tb] = true;
            bool ok = true;
            for (std::size_t qi = 0; qi < queue.size() && ok; ++qi) {
                int ta = queue[qi];
                for (int i = 0; i < 3 && ok; ++i) {
                    Corner ca{ta, i};
                    Corner cb{m.tri[ta], mod3(i + m.rot[ta])};
                    // edge and vertex images
                    int ea = a.slot(ca).edge, eb = b.slot(cb).edge;
                    if (m.edge[ea] < 0)
                        m.edge[ea] = eb;
                    else if (m.edge[ea] != eb)
                        ok = false;
                    int va = a.vertex(ca), vb = b.vertex(cb);
                    if (m.vertex[va] < 0)
                        m.vertex[va] = vb;
                    else if (m.vertex[va] != vb)
                        ok = false;
                    Corner ma = a.mate(ca), mb = b.mate(cb);
                    int rr = mod3(mb.pos - ma.pos);
                    if (m.tri[ma.tri] < 0) {
                        if (hit[mb.tri]) {
                            ok = false;
                        } else {
                            hit[mb.tri] = true;
                            m.tri[ma.tri] = mb.tri;
                            m.rot[ma.tri] = rr;
                            queue.push_back(ma.tri);
                        }
                    } else if (m.tri[ma.tri] != mb.tri || m.rot[ma.tri] != rr) {
                        ok = false;
                    }
                }
            }
            if (!ok || static_cast<int>(queue.size()) != F) continue;
            std::vector<bool> ehit(b.num_edges(), false);
            for (int e : m.edge) {
                if (e < 0 || ehit[e]) ok = false;
                else ehit[e] = true;
            }
            if (!ok) continue;
            if (accept && !accept(m)) continue;
            out.push_back(std::move(m));
            if (first_only) return out;
        }
    return out;
}

}  // namespace veertrack
