#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbsa/harness.hpp"
#include "cbsa/scenario.hpp"

namespace cbsa {

// ============================================================================
// Trace persistence: per-tick CSV, JSON-lines event log, SVG path plot.
// ============================================================================

/// Stable column order; changing it breaks downstream consumers.
inline const char *trace_csv_header() {
    return "tick,time,x,y,theta,v,omega,battery,min_ir,d_o,fe,be_est,e_req,"
           "mp_ctlr,nav_mode,es_ok,cf_ok,mc_ok,events";
}

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

} // namespace detail

inline void write_trace_csv(std::ostream &os, const RunResult &r) {
    os << trace_csv_header() << "\n";
    std::size_t ev = 0;
    for (const TraceRecord &rec : r.records) {
        os << rec.tick << ',' << detail::fmt(rec.time) << ',' << detail::fmt(rec.position.x)
           << ',' << detail::fmt(rec.position.y) << ',' << detail::fmt(rec.heading) << ','
           << detail::fmt(rec.v) << ',' << detail::fmt(rec.omega) << ','
           << detail::fmt(rec.battery) << ',' << detail::fmt(rec.min_ir) << ','
           << detail::fmt(rec.d_o) << ',' << detail::fmt(rec.fe) << ','
           << detail::fmt(rec.be_est) << ',' << detail::fmt(rec.e_req) << ',' << rec.mp_ctlr
           << ',' << rec.nav_mode << ',' << (rec.es_ok ? 1 : 0) << ',' << (rec.cf_ok ? 1 : 0)
           << ',' << (rec.mc_ok ? 1 : 0) << ',';
        bool first = true;
        while (ev < r.events.size() && r.events[ev].tick == rec.tick) {
            if (!first) os << ';';
            os << r.events[ev].type;
            first = false;
            ++ev;
        }
        os << "\n";
    }
}

inline void write_trace_csv(const std::string &path, const RunResult &r) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_trace_csv(os, r);
}

inline void write_events_jsonl(std::ostream &os, const RunResult &r) {
    for (const Event &e : r.events) {
        nlohmann::json j;
        j["tick"] = e.tick;
        j["type"] = e.type;
        if (!e.detail.empty()) j["detail"] = e.detail;
        os << j.dump() << "\n";
    }
}

inline void write_events_jsonl(const std::string &path, const RunResult &r) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_events_jsonl(os, r);
}

/// Plot the run: obstacles in gray, stations as green circles, targets as
/// blue crosses, the forward path in black and retraces in red.
inline void write_plot_svg(std::ostream &os, const Scenario &sc, const RunResult &r) {
    double min_x = sc.start.position.x, max_x = sc.start.position.x;
    double min_y = sc.start.position.y, max_y = sc.start.position.y;
    auto grow = [&](Vec2 p) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    };
    for (const auto &rec : r.records) grow(rec.position);
    for (const auto &t : sc.targets) grow(t);
    for (const auto &st : sc.stations) grow(st.location);
    for (const auto &ob : sc.obstacles)
        for (const auto &v : ob.shape.vertices) grow(v);
    const double pad = 0.2;
    min_x -= pad, min_y -= pad, max_x += pad, max_y += pad;

    const double scale = 400.0 / std::max(max_x - min_x, max_y - min_y);
    auto X = [&](double x) { return (x - min_x) * scale; };
    auto Y = [&](double y) { return (max_y - y) * scale; };  // flip y for screen coords

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (max_x - min_x) * scale
       << "\" height=\"" << (max_y - min_y) * scale << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (const auto &ob : sc.obstacles) {
        os << "<polygon points=\"";
        for (const auto &v : ob.shape.vertices) os << X(v.x) << ',' << Y(v.y) << ' ';
        os << "\" fill=\"#b0b0b0\" stroke=\"#606060\"/>\n";
    }
    for (const auto &st : sc.stations) {
        os << "<circle cx=\"" << X(st.location.x) << "\" cy=\"" << Y(st.location.y)
           << "\" r=\"" << sc.plant.ps_detect_range * scale
           << "\" fill=\"none\" stroke=\"green\"/>\n";
        os << "<circle cx=\"" << X(st.location.x) << "\" cy=\"" << Y(st.location.y)
           << "\" r=\"3\" fill=\"green\"/>\n";
    }
    for (const auto &t : sc.targets) {
        const double cx = X(t.x), cy = Y(t.y);
        os << "<path d=\"M" << cx - 5 << ' ' << cy << " H" << cx + 5 << " M" << cx << ' '
           << cy - 5 << " V" << cy + 5 << "\" stroke=\"blue\" stroke-width=\"2\"/>\n";
    }

    // path polylines split by controller mode: retrace phases drawn in red
    auto flush = [&os](std::vector<Vec2> &pts, bool retrace, auto X_, auto Y_) {
        if (pts.size() < 2) {
            pts.clear();
            return;
        }
        os << "<polyline fill=\"none\" stroke=\"" << (retrace ? "red" : "black")
           << "\" stroke-width=\"1.5\" points=\"";
        for (const auto &p : pts) os << X_(p.x) << ',' << Y_(p.y) << ' ';
        os << "\"/>\n";
        const Vec2 keep = pts.back();
        pts.clear();
        pts.push_back(keep);
    };
    std::vector<Vec2> seg;
    bool retrace = false;
    for (const auto &rec : r.records) {
        const bool rec_retrace = rec.mp_ctlr == 1;
        if (rec_retrace != retrace) {
            flush(seg, retrace, X, Y);
            retrace = rec_retrace;
        }
        seg.push_back(rec.position);
    }
    flush(seg, retrace, X, Y);

    os << "</svg>\n";
}

struct OutputFlags {
    bool plot = true;
};

/// Write trace.csv, events.jsonl and plot.svg under `dir` (created by the
/// caller). Returns the list of files written.
inline std::vector<std::string> emit_outputs(const std::string &dir, const Scenario &sc,
                                             const RunResult &r, const OutputFlags &flags = {}) {
    std::vector<std::string> written;
    const std::string base = dir + "/" + (sc.name.empty() ? "run" : sc.name);
    write_trace_csv(base + "_trace.csv", r);
    written.push_back(base + "_trace.csv");
    write_events_jsonl(base + "_events.jsonl", r);
    written.push_back(base + "_events.jsonl");
    if (flags.plot) {
        std::ofstream os(base + "_plot.svg", std::ios::binary);
        if (!os) throw Error("cannot open " + base + "_plot.svg for writing");
        write_plot_svg(os, sc, r);
        written.push_back(base + "_plot.svg");
    }
    return written;
}

} // namespace cbsa
