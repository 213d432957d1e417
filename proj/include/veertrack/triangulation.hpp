#pragma once

#include <array>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "veertrack/error.hpp"

namespace veertrack {

// One side of a triangle: which edge it is and with which sign the edge's
// stored period is traversed (counterclockwise around the triangle).
struct Slot {
    int edge = -1;
    int sign = 1;
    friend bool operator==(const Slot&, const Slot&) = default;
};

// Corner (t, i) sits at the start of slot i of triangle t.
struct Corner {
    int tri = -1;
    int pos = -1;
    friend bool operator==(const Corner&, const Corner&) = default;
};

using Face = std::array<Slot, 3>;

inline int mod3(int i) { return ((i % 3) + 3) % 3; }

// The quadrilateral around an edge, as seen from its first occurrence.
// Sides in counterclockwise order are delta*C, delta*D, A, B.
struct QuadSites {
    int edge = -1;
    Corner first, second;
    int delta = 1;  // -sigma1*sigma2: +1 for a translation gluing, -1 for a half-translation gluing
    Slot A, B, C, D;
};

// Purely combinatorial gluing data. Vertex ids are fixed at construction and
// carried through flips, so marked points keep their identity.
class Triangulation {
public:
    Triangulation() = default;

    Triangulation(std::vector<std::string> labels, std::vector<Face> faces)
        : labels_(std::move(labels)), faces_(std::move(faces)) {
        for (std::size_t e = 0; e < labels_.size(); ++e) {
            if (!index_.emplace(labels_[e], static_cast<int>(e)).second)
                throw semantic_error("duplicate edge label '" + labels_[e] + "'");
        }
        for (const Face& f : faces_)
            for (const Slot& s : f) {
                if (s.edge < 0 || s.edge >= num_edges()) throw semantic_error("slot refers to an unknown edge");
                if (s.sign != 1 && s.sign != -1) throw semantic_error("slot sign must be +1 or -1");
            }
        rebuild_occurrences();
        number_vertices();
    }

    int num_edges() const { return static_cast<int>(labels_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    int num_vertices() const { return num_vertices_; }
    int euler_characteristic() const { return num_vertices() - num_edges() + num_faces(); }

    const std::vector<Face>& faces() const { return faces_; }
    const Face& face(int t) const { return faces_.at(t); }
    const Slot& slot(Corner c) const { return faces_[c.tri][c.pos]; }

    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(int e) const { return labels_.at(e); }
    int find(const std::string& label) const {
        auto it = index_.find(label);
        return it == index_.end() ? -1 : it->second;
    }
    int id(const std::string& label) const {
        int e = find(label);
        if (e < 0) throw precondition_error("unknown edge label '" + label + "'");
        return e;
    }

    const std::array<Corner, 2>& occurrences(int e) const { return occ_.at(e); }

    Corner mate(Corner c) const {
        const auto& o = occ_[slot(c).edge];
        return o[0] == c ? o[1] : o[0];
    }

    int vertex(Corner c) const { return corner_vertex_[c.tri][c.pos]; }
    std::array<int, 2> endpoints(int e) const {
        Corner c = occ_[e][0];
        return {vertex(c), vertex({c.tri, mod3(c.pos + 1)})};
    }

    // Corners around vertex v in rotation order.
    std::vector<Corner> corners_around(int v) const {
        std::vector<Corner> out;
        Corner start{-1, -1};
        for (int t = 0; t < num_faces() && start.tri < 0; ++t)
            for (int i = 0; i < 3; ++i)
                if (corner_vertex_[t][i] == v) {
                    start = {t, i};
                    break;
                }
        if (start.tri < 0) return out;
        Corner c = start;
        do {
            out.push_back(c);
            Corner m = mate(c);
            c = {m.tri, mod3(m.pos + 1)};
        } while (!(c == start));
        return out;
    }

    bool distinct_edges(int t) const {
        const Face& f = faces_[t];
        return f[0].edge != f[1].edge && f[1].edge != f[2].edge && f[0].edge != f[2].edge;
    }

    QuadSites quad(int e) const {
        QuadSites q;
        q.edge = e;
        q.first = occ_.at(e)[0];
        q.second = occ_.at(e)[1];
        if (q.first.tri == q.second.tri) throw precondition_error("edge '" + label(e) + "' is not interior to a quadrilateral");
        const Face& f1 = faces_[q.first.tri];
        const Face& f2 = faces_[q.second.tri];
        q.delta = -f1[q.first.pos].sign * f2[q.second.pos].sign;
        q.A = f1[mod3(q.first.pos + 1)];
        q.B = f1[mod3(q.first.pos + 2)];
        q.C = f2[mod3(q.second.pos + 1)];
        q.D = f2[mod3(q.second.pos + 2)];
        return q;
    }

    // Replace edge e by the other diagonal of its quadrilateral. The new
    // diagonal keeps e's id; its period is delta*D + A in the old coordinates.
    QuadSites flip(int e) {
        QuadSites q = quad(e);
        int t1 = q.first.tri, t2 = q.second.tri;
        int P = vertex(q.first);
        int Q = vertex({t1, mod3(q.first.pos + 1)});
        int R = vertex({t1, mod3(q.first.pos + 2)});
        int Sv = vertex({t2, mod3(q.second.pos + 2)});
        faces_[t1] = Face{Slot{q.C.edge, q.delta * q.C.sign}, Slot{e, 1}, q.B};
        faces_[t2] = Face{Slot{q.D.edge, q.delta * q.D.sign}, q.A, Slot{e, -1}};
        corner_vertex_[t1] = {P, Sv, R};
        corner_vertex_[t2] = {Sv, Q, R};
        rebuild_occurrences();
        return q;
    }

    friend bool operator==(const Triangulation& a, const Triangulation& b) {
        if (a.labels_ != b.labels_ || a.faces_.size() != b.faces_.size()) return false;
        for (std::size_t t = 0; t < a.faces_.size(); ++t)
            if (!(a.faces_[t] == b.faces_[t])) return false;
        return true;
    }

private:
    void rebuild_occurrences() {
        occ_.assign(labels_.size(), {Corner{}, Corner{}});
        std::vector<int> count(labels_.size(), 0);
        for (int t = 0; t < num_faces(); ++t)
            for (int i = 0; i < 3; ++i) {
                int e = faces_[t][i].edge;
                if (count[e] < 2) occ_[e][count[e]] = {t, i};
                ++count[e];
            }
        for (std::size_t e = 0; e < labels_.size(); ++e)
            if (count[e] != 2)
                throw semantic_error("edge '" + labels_[e] + "' is used " + std::to_string(count[e]) +
                                     " times (must be exactly 2)");
    }

    void number_vertices() {
        int n = 3 * num_faces();
        std::vector<int> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        auto unite = [&](Corner a, Corner b) { parent[find(3 * a.tri + a.pos)] = find(3 * b.tri + b.pos); };
        for (const auto& o : occ_) {
            unite(o[0], {o[1].tri, mod3(o[1].pos + 1)});
            unite({o[0].tri, mod3(o[0].pos + 1)}, o[1]);
        }
        std::map<int, int> ids;
        corner_vertex_.assign(faces_.size(), {0, 0, 0});
        for (int t = 0; t < num_faces(); ++t)
            for (int i = 0; i < 3; ++i) {
                int r = find(3 * t + i);
                auto it = ids.emplace(r, static_cast<int>(ids.size())).first;
                corner_vertex_[t][i] = it->second;
            }
        num_vertices_ = static_cast<int>(ids.size());
    }

    std::vector<std::string> labels_;
    std::map<std::string, int> index_;
    std::vector<Face> faces_;
    std::vector<std::array<Corner, 2>> occ_;
    std::vector<std::array<int, 3>> corner_vertex_;
    int num_vertices_ = 0;
};

}  // namespace veertrack
