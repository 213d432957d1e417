#pragma once

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <variant>

#include "veertrack/surface.hpp"

namespace veertrack {

using ordered_json = nlohmann::ordered_json;

using AnySurface = std::variant<Surface<Rational>, Surface<double>>;

namespace detail {

inline ordered_json parse_json_text(const std::string& text) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(std::string("JSON syntax error: ") + e.what(), static_cast<long>(e.byte));
    }
}

template <class S>
S read_number(const ordered_json& v, Mode doc_mode, const std::string& where) {
    if constexpr (scalar_traits<S>::exact) {
        if (v.is_string()) return parse_rational(v.get<std::string>());
        if (v.is_number_integer()) return Rational(v.get<long long>());
        if (v.is_number_float()) {
            if (doc_mode == Mode::exact)
                throw parse_error(where + ": exact documents need rationals as strings \"p/q\"");
            return Rational(v.get<double>());
        }
    } else {
        if (v.is_number()) return v.get<double>();
        if (v.is_string()) return to_double(parse_rational(v.get<std::string>()));
    }
    throw parse_error(where + ": expected a number");
}

inline Mode read_mode(const ordered_json& doc) {
    if (!doc.is_object()) throw parse_error("surface document must be a JSON object");
    if (!doc.contains("mode")) throw parse_error("missing field 'mode'");
    const auto& m = doc["mode"];
    if (m == "exact") return Mode::exact;
    if (m == "float") return Mode::floating;
    throw parse_error("field 'mode' must be \"exact\" or \"float\"");
}

template <class S>
Surface<S> surface_from_json(const ordered_json& doc) {
    Mode doc_mode = read_mode(doc);
    if (!doc.contains("edges") || !doc["edges"].is_object()) throw parse_error("missing object 'edges'");
    if (!doc.contains("triangles") || !doc["triangles"].is_array()) throw parse_error("missing array 'triangles'");
    std::vector<std::string> labels;
    std::vector<Period<S>> periods;
    std::map<std::string, int> ids;
    for (auto it = doc["edges"].begin(); it != doc["edges"].end(); ++it) {
        const auto& p = it.value();
        if (!p.is_array() || p.size() != 2) throw parse_error("edge '" + it.key() + "' must be a pair [w, h]");
        ids[it.key()] = static_cast<int>(labels.size());
        labels.push_back(it.key());
        periods.push_back({read_number<S>(p[0], doc_mode, "edge " + it.key()), read_number<S>(p[1], doc_mode, "edge " + it.key())});
    }
    std::vector<Face> faces;
    for (const auto& tri : doc["triangles"]) {
        if (!tri.is_array() || tri.size() != 3) throw parse_error("each triangle must list exactly three slots");
        Face f;
        for (int i = 0; i < 3; ++i) {
            const auto& slot = tri[i];
            if (!slot.is_object() || !slot.contains("edge") || !slot.contains("sign"))
                throw parse_error("a slot needs fields 'edge' and 'sign'");
            std::string lab = slot["edge"].get<std::string>();
            auto found = ids.find(lab);
            if (found == ids.end()) throw semantic_error("triangle refers to undeclared edge '" + lab + "'");
            int sign = slot["sign"].get<int>();
            if (sign != 1 && sign != -1) throw semantic_error("sign of edge '" + lab + "' must be +1 or -1");
            f[i] = {found->second, sign};
        }
        faces.push_back(f);
    }
    Triangulation topo(std::move(labels), std::move(faces));
    std::vector<bool> marked(topo.num_vertices(), false);
    if (doc.contains("marked_vertices")) {
        for (const auto& v : doc["marked_vertices"]) {
            int id = v.get<int>();
            if (id < 0 || id >= topo.num_vertices())
                throw semantic_error("marked vertex " + std::to_string(id) + " does not exist");
            marked[id] = true;
        }
    }
    Surface<S> s(std::move(topo), std::move(periods), std::move(marked));
    if (doc.contains("flow")) {
        const auto& fl = doc["flow"];
        S scale = fl.contains("scale") ? read_number<S>(fl["scale"], doc_mode, "flow scale") : S(1);
        double time = fl.value("time", 0.0);
        if constexpr (scalar_traits<S>::exact) {
            s.set_flow(scale, time);
        } else {
            Surface<S> base = s;
            double r = std::sqrt(scale);
            for (int e = 0; e < s.num_edges(); ++e) base.set_period(e, {s.period(e).w * r, s.period(e).h / r});
            base.set_flow(1.0, time);
            s = base;
        }
    }
    return s;
}

template <class S>
ordered_json number_json(const S& x) {
    if constexpr (scalar_traits<S>::exact)
        return rational_string(x);
    else
        return x;
}

}  // namespace detail

inline Mode document_mode(const std::string& text) { return detail::read_mode(detail::parse_json_text(text)); }

// Structural parse only; the result may still violate geometric invariants.
template <class S>
Surface<S> parse_surface_unchecked(const std::string& text) {
    return detail::surface_from_json<S>(detail::parse_json_text(text));
}

// Parse and insist that every invariant holds.
template <class S>
Surface<S> parse_surface(const std::string& text) {
    Surface<S> s = parse_surface_unchecked<S>(text);
    ValidationReport rep = validate(s);
    if (!rep.passed) {
        std::string msg = "surface fails validation:";
        for (const auto& v : rep.violations) msg += " [" + v.rule + " @ " + v.where + ": " + v.detail + "]";
        throw semantic_error(msg);
    }
    return s;
}

// Dispatches on the document's own "mode" field.
inline AnySurface parse_any_surface(const std::string& text, bool check = true) {
    if (document_mode(text) == Mode::exact)
        return check ? AnySurface(parse_surface<Rational>(text)) : AnySurface(parse_surface_unchecked<Rational>(text));
    return check ? AnySurface(parse_surface<double>(text)) : AnySurface(parse_surface_unchecked<double>(text));
}

template <class S>
ordered_json surface_json(const Surface<S>& s) {
    ordered_json doc;
    doc["mode"] = mode_name(Surface<S>::mode);
    ordered_json edges = ordered_json::object();
    for (int e = 0; e < s.num_edges(); ++e)
        edges[s.label(e)] = ordered_json::array({detail::number_json(s.period(e).w), detail::number_json(s.period(e).h)});
    doc["edges"] = edges;
    ordered_json tris = ordered_json::array();
    for (const Face& f : s.topology().faces()) {
        ordered_json tri = ordered_json::array();
        for (const Slot& sl : f) tri.push_back({{"edge", s.label(sl.edge)}, {"sign", sl.sign}});
        tris.push_back(tri);
    }
    doc["triangles"] = tris;
    // vertex ids are renumbered by first appearance, which is what a fresh parse assigns
    std::map<int, int> canonical;
    for (int t = 0; t < s.num_faces(); ++t)
        for (int i = 0; i < 3; ++i) canonical.emplace(s.topology().vertex({t, i}), static_cast<int>(canonical.size()));
    std::vector<int> ids;
    for (int v = 0; v < s.num_vertices(); ++v)
        if (s.is_marked(v)) ids.push_back(canonical.at(v));
    std::sort(ids.begin(), ids.end());
    ordered_json marked = ordered_json::array();
    for (int v : ids) marked.push_back(v);
    if (!marked.empty()) doc["marked_vertices"] = marked;
    if (s.scale() != S(1) || s.time() != 0.0) doc["flow"] = {{"scale", detail::number_json(s.scale())}, {"time", s.time()}};
    return doc;
}

template <class S>
std::string serialize_surface(const Surface<S>& s) {
    return surface_json(s).dump(2);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace veertrack
