#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "veertrack/veertrack.hpp"

using namespace veertrack;
using nlohmann::ordered_json;

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write '" + path + "'");
    out << text;
}

// JSON to a file when a path is given, else to stdout.
void emit_json(const ordered_json& j, const std::string& path) {
    if (path.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_text(path, j.dump(2) + "\n");
}

template <class S>
std::string num_text(const S& x) {
    if constexpr (scalar_traits<S>::exact) {
        return rational_string(x);
    } else {
        std::ostringstream ss;
        ss.precision(17);
        ss << x;
        return ss.str();
    }
}

std::string double_text(double x) { return num_text(x); }

Surface<double> load_float(const std::string& text) {
    if (document_mode(text) == Mode::exact) return to_float(parse_surface<Rational>(text));
    return parse_surface<double>(text);
}

// Runs f on the parsed surface in its own arithmetic mode.
template <class F>
int with_surface(const std::string& path, F&& f) {
    AnySurface any = parse_any_surface(read_file(path));
    return std::visit([&](auto& s) { return f(s); }, any);
}

template <class S>
std::string pair_text(const Surface<S>& s, const std::array<int, 2>& p) {
    return s.label(p[0]) + ";" + s.label(p[1]);
}

// ---------------------------------------------------------------- subcommands

int cmd_validate(const std::string& input) {
    std::string text = read_file(input);
    auto run = [&](auto s) {
        ValidationReport rep = validate(s);
        if (!rep.passed) {
            std::cout << "invalid: " << rep.violations.size() << " violation(s)\n";
            for (const auto& v : rep.violations) std::cout << "  " << v.rule << " @ " << v.where << ": " << v.detail << "\n";
            return 1;
        }
        ordered_json j;
        j["valid"] = true;
        j["mode"] = mode_name(decltype(s)::mode);
        j["edges"] = s.num_edges();
        j["triangles"] = s.num_faces();
        j["vertices"] = s.num_vertices();
        j["area"] = num_text(area(s));
        ordered_json census = ordered_json::object();
        for (auto [k, c] : angle_census(s)) census[std::to_string(k) + "pi"] = c;
        j["cone_angles"] = census;
        j["veering"] = is_veering(s);
        j["delaunay"] = is_delaunay(s);
        std::cout << j.dump(2) << "\n";
        return 0;
    };
    if (document_mode(text) == Mode::exact) return run(parse_surface_unchecked<Rational>(text));
    return run(parse_surface_unchecked<double>(text));
}

int cmd_delaunay(const std::string& input, const std::string& flips_csv, const std::string& output) {
    return with_surface(input, [&](auto& s) {
        auto [d, log] = greedy_delaunay(s);
        if (!flips_csv.empty()) {
            std::ostringstream csv;
            csv << "step,edge,old_w,old_h,new_w,new_h\n";
            for (std::size_t i = 0; i < log.size(); ++i)
                csv << i << "," << s.label(log[i].old_edge) << "," << num_text(log[i].old_period.w) << ","
                    << num_text(log[i].old_period.h) << "," << num_text(log[i].new_period.w) << ","
                    << num_text(log[i].new_period.h) << "\n";
            write_text(flips_csv, csv.str());
        }
        ordered_json j;
        j["flips"] = log.size();
        ordered_json cert = ordered_json::array();
        for (const auto& c : delaunay_certificate(d))
            cert.push_back({{"edge", d.label(c.edge)},
                            {"edge_length", num_text(c.edge_length)},
                            {"diagonal_length", num_text(c.diagonal_length)},
                            {"flippable", c.flippable}});
        j["certificate"] = cert;
        j["surface"] = surface_json(d);
        emit_json(j, output);
        return 0;
    });
}

int cmd_track(const std::string& input, const std::string& dir_name, bool curves) {
    Direction dir;
    if (dir_name == "vertical")
        dir = Direction::vertical;
    else if (dir_name == "horizontal")
        dir = Direction::horizontal;
    else
        throw error("direction must be vertical or horizontal");
    return with_surface(input, [&](auto& s) {
        auto [tr, m] = dual_track(s, dir);
        if (curves) {
            for (int e = 0; e < tr.num_branches(); ++e) std::cout << (e ? "," : "") << tr.label(e);
            std::cout << "\n";
            for (const auto& c : vertex_curves(tr)) {
                for (std::size_t e = 0; e < c.size(); ++e) std::cout << (e ? "," : "") << c[e];
                std::cout << "\n";
            }
            return 0;
        }
        ordered_json j;
        j["direction"] = direction_name(dir);
        ordered_json sw = ordered_json::array();
        for (int t = 0; t < tr.num_switches(); ++t) {
            auto sm = tr.small_branches(t);
            sw.push_back({{"large", tr.label(tr.large_branch(t))}, {"small", {tr.label(sm[0]), tr.label(sm[1])}}});
        }
        j["switches"] = sw;
        ordered_json br = ordered_json::object();
        for (int e = 0; e < tr.num_branches(); ++e) {
            BranchRole r = tr.role(e);
            br[tr.label(e)] = {{"role", r == BranchRole::large ? "large" : r == BranchRole::small ? "small" : "mixed"},
                               {"transverse", num_text(m.transverse[e])},
                               {"tangential", num_text(m.tangential[e])}};
        }
        j["branches"] = br;
        ordered_json regions = ordered_json::object();
        for (auto [k, c] : complementary_regions(tr).counts()) regions[std::to_string(k)] = c;
        j["complementary_regions"] = regions;
        std::cout << j.dump(2) << "\n";
        return 0;
    });
}

int cmd_flow(const std::string& input, double T, int max_events, const std::string& csv_path, bool batch) {
    return with_surface(input, [&](auto& s) {
        FlowOptions opt;
        opt.batch_simultaneous = batch;
        auto traj = run_flow(s, T, max_events, opt);
        if (!csv_path.empty()) {
            std::ostringstream csv;
            csv << "index,threshold,t,edge,direction,losers,winners\n";
            for (std::size_t i = 0; i < traj.events.size(); ++i) {
                const auto& ev = traj.events[i];
                csv << i << "," << num_text(ev.threshold) << "," << double_text(ev.time) << "," << s.label(ev.edge) << ","
                    << split_letter(ev.direction) << "," << pair_text(s, ev.losers) << "," << pair_text(s, ev.winners)
                    << "\n";
            }
            write_text(csv_path, csv.str());
        }
        ordered_json j;
        j["events"] = traj.events.size();
        j["word"] = event_word(traj.events);
        j["t_end"] = traj.t_end;
        j["thick_fraction"] = thick_fraction(traj, 0.3).fraction;
        j["final"] = surface_json(traj.states.back());
        std::cout << j.dump(2) << "\n";
        return 0;
    });
}

ordered_json matrix_json(const IntMatrix& m) {
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < m.size(); ++i) {
        ordered_json r = ordered_json::array();
        for (int k = 0; k < m.size(); ++k) r.push_back(m(i, k));
        rows.push_back(r);
    }
    return rows;
}

int cmd_analyze(const std::string& input, double T, const std::string& report) {
    return with_surface(input, [&](auto& s) {
        auto traj = run_flow(s, T);
        auto per = detect_periodicity(traj);
        if (!per) {
            std::cerr << "error: no period found within t <= " << T << " (" << traj.events.size() << " events)\n";
            return 1;
        }
        std::vector<std::decay_t<decltype(traj.events.front())>> word(traj.events.begin() + per->m,
                                                                       traj.events.begin() + per->m2);
        auto track = dual_track(traj.states[per->m], Direction::vertical).first;
        PAReport rep = analyze_periodic_word(word, per->relabeling, track);
        ordered_json j;
        j["m"] = per->m;
        j["m2"] = per->m2;
        j["word"] = per->word;
        ordered_json rel = ordered_json::object();
        for (int e = 0; e < s.num_edges(); ++e) rel[s.label(e)] = s.label(per->relabeling[e]);
        j["relabeling"] = rel;
        j["width_scaling"] = per->lambda;
        ordered_json sup = ordered_json::array();
        for (int e = 0; e < s.num_edges(); ++e)
            if (rep.support[e]) sup.push_back(s.label(e));
        j["support"] = sup;
        j["filling"] = rep.filling;
        j["is_pA"] = rep.is_pA;
        j["dilatation"] = rep.dilatation;
        j["tangential_factor"] = rep.tangential_factor;
        j["contraction_power"] = rep.contraction_power;
        j["transverse"] = matrix_json(rep.period_matrix.transverse);
        j["tangential"] = matrix_json(rep.period_matrix.tangential);
        emit_json(j, report);
        return 0;
    });
}

std::vector<double> parse_times(const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');) {
        std::size_t used = 0;
        double v = std::stod(item, &used);
        if (used != item.size()) throw error("bad time '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw error("empty time list");
    return out;
}

int cmd_contract(const std::string& input, const std::string& times, double delta, int trials, std::uint64_t seed,
                 const std::string& csv_path) {
    Surface<double> s = load_float(read_file(input));
    ContractionFit fit = contraction_experiment(s, parse_times(times), delta, trials, seed);
    if (!csv_path.empty()) {
        std::ostringstream csv;
        csv << "T,trial,d0,dT,ratio\n";
        for (const auto& x : fit.samples)
            csv << double_text(x.T) << "," << x.trial << "," << double_text(x.d0) << "," << double_text(x.dT) << ","
                << double_text(x.ratio) << "\n";
        write_text(csv_path, csv.str());
    }
    std::size_t changed = 0;
    for (const auto& x : fit.samples) changed += x.chart_changed;
    ordered_json j{{"samples", fit.samples.size()}, {"alpha", fit.alpha}, {"C", fit.C},
                   {"residual", fit.residual}, {"r2", fit.r2}, {"chart_changes", changed}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_close(const std::string& input, double T, double delta, std::uint64_t seed, double tol, const std::string& output) {
    Surface<double> s = load_float(read_file(input));
    std::mt19937_64 rng(seed);
    Surface<double> start = delta > 0 ? perturb(s, delta, rng) : s;
    auto traj = run_flow(start, start.time() + T);
    auto ret = find_return(traj);
    if (!ret) {
        std::cerr << "error: no combinatorial return within the flow time\n";
        return 1;
    }
    ClosingResult r = closing_search(traj, *ret, tol);
    ordered_json j;
    j["converged"] = r.converged;
    j["T_prime"] = r.T_prime;
    j["lambda"] = r.lambda;
    j["iterations"] = r.iterations;
    j["word"] = r.word;
    j["m"] = r.m;
    j["m2"] = r.m2;
    j["periodic_point"] = surface_json(r.periodic_point);
    emit_json(j, output);
    return r.converged ? 0 : 1;
}

// Trajectory summary: events, thick fraction, periodicity when present, and
// Hilbert diameters of the start cone's image at every event (or period).
int cmd_report(const std::string& input, double T, double eps, const std::string& hilbert_csv, const std::string& output,
               bool batch) {
    return with_surface(input, [&](auto& s) {
        FlowOptions opt;
        opt.batch_simultaneous = batch;
        auto traj = run_flow(s, T, 1000000, opt);
        ordered_json j;
        j["events"] = traj.events.size();
        j["word"] = event_word(traj.events);
        auto th = thick_fraction(traj, eps);
        j["eps"] = eps;
        j["thick_fraction"] = th.fraction;
        j["vertex_curves"] = vertex_curves(dual_track(s, Direction::vertical).first).size();
        std::vector<std::size_t> cps;
        auto per = detect_periodicity(traj);
        if (per) {
            j["period"] = {{"m", per->m}, {"m2", per->m2}, {"word", per->word}, {"lambda", per->lambda}};
            for (std::size_t k = per->m; k < traj.states.size(); k += per->m2 - per->m) cps.push_back(k);
            j["period_birkhoff"] = birkhoff_coefficient(period_image_diameter(traj, *per));
        } else {
            j["period"] = nullptr;
            for (std::size_t k = 0; k < traj.states.size(); ++k) cps.push_back(k);
        }
        auto hs = hilbert_contraction_experiment(traj, cps);
        std::vector<double> t, logd;
        for (const auto& h : hs)
            if (std::isfinite(h.diameter) && h.diameter > 0) {
                t.push_back(h.t);
                logd.push_back(std::log(h.diameter));
            }
        j["hilbert_log_slope"] = t.size() >= 2 ? ordered_json(fit_line(t, logd).slope) : ordered_json(nullptr);
        if (!hilbert_csv.empty()) {
            std::ostringstream csv;
            csv << "t,diameter\n";
            for (const auto& h : hs) csv << double_text(h.t) << "," << (std::isfinite(h.diameter) ? double_text(h.diameter) : "inf") << "\n";
            write_text(hilbert_csv, csv.str());
        }
        emit_json(j, output);
        return 0;
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"veertrack: veering triangulations, train tracks and Teichmuller flow on half-translation surfaces"};
    app.require_subcommand(1);

    std::string input, csv, output, direction = "vertical", times = "1,2,3,4,5";
    double T = 1, delta = 1e-6, eps = 0.3, tol = 1e-13;
    int max_events = 1000000, trials = 4;
    std::uint64_t seed = 1;
    bool curves = false, batch = false;

    auto* v = app.add_subcommand("validate", "check a surface document");
    v->add_option("--input", input, "surface JSON")->required();

    auto* d = app.add_subcommand("delaunay", "greedy flips to the L-infinity Delaunay triangulation");
    d->add_option("--input", input, "surface JSON")->required();
    d->add_option("--emit-flips", csv, "flip log CSV");
    d->add_option("--output", output, "result JSON (default stdout)");

    auto* t = app.add_subcommand("track", "dual train track and measures");
    t->add_option("--input", input, "surface JSON")->required();
    t->add_option("--direction", direction, "vertical or horizontal");
    t->add_flag("--vertex-curves", curves, "print vertex curves as CSV rows");

    auto* f = app.add_subcommand("flow", "event-driven flow");
    f->add_option("--input", input, "surface JSON")->required();
    f->add_option("--time", T, "end time")->required();
    f->add_option("--max-events", max_events, "event cap");
    f->add_option("--csv", csv, "event CSV");
    f->add_flag("--batch", batch, "apply simultaneous non-adjacent events together");

    auto* a = app.add_subcommand("analyze", "periodicity and pseudo-Anosov report");
    a->add_option("--input", input, "surface JSON")->required();
    a->add_option("--time", T, "flow time to search")->required();
    a->add_option("--report", output, "report JSON (default stdout)");

    auto* c = app.add_subcommand("contract", "strong-stable contraction experiment");
    c->add_option("--input", input, "surface JSON")->required();
    c->add_option("--times", times, "comma-separated flow times");
    c->add_option("--delta", delta, "perturbation size");
    c->add_option("--trials", trials, "number of perturbations");
    c->add_option("--seed", seed, "random seed");
    c->add_option("--csv", csv, "sample CSV");

    auto* cl = app.add_subcommand("close", "closing-lemma fixed-point search");
    cl->add_option("--input", input, "surface JSON")->required();
    cl->add_option("--time", T, "flow time for finding a return")->required();
    cl->add_option("--delta", delta, "perturbation applied before the search");
    cl->add_option("--seed", seed, "random seed");
    cl->add_option("--tol", tol, "stopping tolerance");
    cl->add_option("--output", output, "result JSON (default stdout)");

    auto* r = app.add_subcommand("report", "trajectory summary with Hilbert diameters");
    r->add_option("--input", input, "surface JSON")->required();
    r->add_option("--time", T, "end time")->required();
    r->add_option("--eps", eps, "thin-part threshold");
    r->add_option("--hilbert", csv, "Hilbert diameter CSV");
    r->add_option("--output", output, "report JSON (default stdout)");
    r->add_flag("--batch", batch, "apply simultaneous non-adjacent events together");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (v->parsed()) return cmd_validate(input);
        if (d->parsed()) return cmd_delaunay(input, csv, output);
        if (t->parsed()) return cmd_track(input, direction, curves);
        if (f->parsed()) return cmd_flow(input, T, max_events, csv, batch);
        if (a->parsed()) return cmd_analyze(input, T, output);
        if (c->parsed()) return cmd_contract(input, times, delta, trials, seed, csv);
        if (cl->parsed()) return cmd_close(input, T, delta, seed, tol, output);
        if (r->parsed()) return cmd_report(input, T, eps, csv, output, batch);
    } catch (const degeneracy_error& e) {
        std::cerr << "degenerate: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
