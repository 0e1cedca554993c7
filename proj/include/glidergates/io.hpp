#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "glidergates/evaluator.hpp"
#include "glidergates/gate_eval.hpp"
#include "glidergates/gate_spec.hpp"
#include "glidergates/gate_trainer.hpp"
#include "glidergates/gun_trainer.hpp"
#include "glidergates/network.hpp"
#include "glidergates/rewiring.hpp"

namespace gg {

inline constexpr const char* kToolVersion = "0.1.0";

// 17 significant digits: enough for exact double round-trips, and a fixed
// textual form so identical data always serializes to identical bytes.
inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Network files

inline std::string network_to_text(const Network& net) {
    std::string s;
    s.reserve(64 * net.n() + 48 * net.edge_count());
    s += "{\n";
    s += "  \"params\": {";
    s += "\"n_nodes\": " + std::to_string(net.params.n_nodes);
    s += ", \"threshold_h\": " + std::to_string(net.params.threshold_h);
    s += ", \"target_mean_degree_k\": " + fmt_double(net.params.target_mean_degree_k);
    s += ", \"target_clustering_c\": " + fmt_double(net.params.target_clustering_c);
    s += ", \"excitatory_fraction\": " + fmt_double(net.params.excitatory_fraction);
    s += ", \"rng_seed\": " + std::to_string(net.params.rng_seed);
    s += "},\n";
    s += "  \"law\": {\"K\": " + fmt_double(net.law.amplitude_k) +
         ", \"lambda\": " + fmt_double(net.law.decay_lambda) + "},\n";
    s += "  \"nodes\": [\n";
    for (uint32_t i = 0; i < net.n(); ++i) {
        s += "    {\"id\": " + std::to_string(i) + ", \"x\": " + fmt_double(net.pos[i].x) +
             ", \"y\": " + fmt_double(net.pos[i].y) +
             ", \"sign\": " + std::to_string(int(net.sign[i])) + "}";
        s += i + 1 < net.n() ? ",\n" : "\n";
    }
    s += "  ],\n";
    s += "  \"edges\": [\n";
    for (size_t e = 0; e < net.edge_count(); ++e) {
        uint32_t src = net.edge_src[e];
        s += "    {\"src\": " + std::to_string(src) + ", \"dst\": " +
             std::to_string(net.out_dst[e]) +
             ", \"weight\": " + std::to_string(net.source_weight(src)) + "}";
        s += e + 1 < net.edge_count() ? ",\n" : "\n";
    }
    s += "  ],\n";
    s += "  \"input_nodes\": [";
    for (size_t i = 0; i < net.input_nodes.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(net.input_nodes[i]);
    }
    s += "]\n";
    s += "}\n";
    return s;
}

inline void save_network(const Network& net, const std::string& path) {
    write_text_file(path, network_to_text(net));
}

inline Network network_from_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    NetworkParams params;
    const auto& jp = j.at("params");
    params.n_nodes = jp.at("n_nodes").get<uint32_t>();
    params.threshold_h = jp.at("threshold_h").get<int>();
    params.target_mean_degree_k = jp.at("target_mean_degree_k").get<double>();
    params.target_clustering_c = jp.at("target_clustering_c").get<double>();
    params.excitatory_fraction = jp.at("excitatory_fraction").get<double>();
    params.rng_seed = jp.at("rng_seed").get<uint64_t>();
    ConnectionLaw law{j.at("law").at("K").get<double>(), j.at("law").at("lambda").get<double>()};

    uint32_t n = params.n_nodes;
    if (j.at("nodes").size() != n) throw std::runtime_error("node count mismatch");
    std::vector<Vec2> positions(n);
    std::vector<int8_t> signs(n);
    for (const auto& jn : j.at("nodes")) {
        uint32_t id = jn.at("id").get<uint32_t>();
        if (id >= n) throw std::runtime_error("node id out of range");
        positions[id] = {jn.at("x").get<double>(), jn.at("y").get<double>()};
        signs[id] = static_cast<int8_t>(jn.at("sign").get<int>());
    }

    std::vector<std::vector<uint32_t>> edges(n);
    std::vector<std::vector<int>> weights(n);
    for (const auto& je : j.at("edges")) {
        uint32_t src = je.at("src").get<uint32_t>();
        if (src >= n) throw std::runtime_error("edge src out of range");
        edges[src].push_back(je.at("dst").get<uint32_t>());
        weights[src].push_back(je.at("weight").get<int>());
    }
    Network net = Network::assemble(params, law, std::move(positions), std::move(signs), edges);
    for (uint32_t id : j.at("input_nodes").get<std::vector<uint32_t>>()) net.designate_input(id);

    // Weight consistency: magnitude h+1 for input sources, 1 otherwise, with
    // the source's sign.
    for (uint32_t src = 0; src < n; ++src)
        for (size_t k = 0; k < weights[src].size(); ++k)
            if (weights[src][k] != net.source_weight(src))
                throw std::runtime_error("edge weight inconsistent with source node");
    return net;
}

inline Network load_network(const std::string& path) {
    return network_from_text(read_text_file(path));
}

// ---------------------------------------------------------------------------
// Journal files: one swap per line, "srcA oldDstA srcB oldDstB".

inline std::string journal_to_text(const RewireJournal& journal) {
    std::string s;
    for (const Swap& sw : journal.entries()) {
        s += std::to_string(sw.src_a) + " " + std::to_string(sw.old_dst_a) + " " +
             std::to_string(sw.src_b) + " " + std::to_string(sw.old_dst_b) + "\n";
    }
    return s;
}

inline void save_journal(const RewireJournal& journal, const std::string& path) {
    write_text_file(path, journal_to_text(journal));
}

// Applies a journal file on top of `net`, appending to `journal`.
inline void replay_journal_text(Network& net, RewireJournal& journal, const std::string& text) {
    std::istringstream in(text);
    uint32_t a, b, c, d;
    while (in >> a >> b >> c >> d) replay_swap(net, journal, a, b, c, d);
}

inline void replay_journal_file(Network& net, RewireJournal& journal, const std::string& path) {
    replay_journal_text(net, journal, read_text_file(path));
}

// ---------------------------------------------------------------------------
// Gate spec files

inline std::string pattern_to_bits(PatternMask m, size_t n_guns) {
    std::string s(n_guns, '0');
    for (size_t g = 0; g < n_guns; ++g)
        if ((m >> g) & 1) s[g] = '1';
    return s;
}

inline PatternMask pattern_from_bits(const std::string& s) {
    PatternMask m = 0;
    for (size_t g = 0; g < s.size(); ++g) {
        if (s[g] == '1')
            m |= PatternMask{1} << g;
        else if (s[g] != '0')
            throw std::runtime_error("pattern bitstring must be 0s and 1s");
    }
    return m;
}

inline std::string gate_to_text(const GateSpec& gate) {
    std::string s = "{\n";
    s += std::string("  \"strategy\": \"") +
         (gate.strategy == Strategy::PerInput ? "per_input" : "common") + "\",\n";
    s += "  \"guns\": [\n";
    for (size_t g = 0; g < gate.guns.size(); ++g) {
        const GunSpec& gun = gate.guns[g];
        s += "    {\"input_node\": " + std::to_string(gun.input_node) + ", \"target\": [" +
             fmt_double(gun.target.x) + ", " + fmt_double(gun.target.y) +
             "], \"period\": " + std::to_string(gun.period_p) +
             ", \"travel_t\": " + std::to_string(gun.travel_steps_T) +
             ", \"radius_d\": " + fmt_double(gun.radius_D) + "}";
        s += g + 1 < gate.guns.size() ? ",\n" : "\n";
    }
    s += "  ],\n";
    s += "  \"outputs\": [\n";
    for (size_t o = 0; o < gate.outputs.size(); ++o) {
        const OutputSpec& out = gate.outputs[o];
        s += std::string("    {\"kind\": \"") +
             (out.kind == OutputKind::PerInput ? "per_input" : "common") + "\", \"center\": [" +
             fmt_double(out.center.x) + ", " + fmt_double(out.center.y) + "], \"radius\": " +
             fmt_double(out.readout_radius) + "}";
        s += o + 1 < gate.outputs.size() ? ",\n" : "\n";
    }
    s += "  ],\n";
    s += "  \"truth_table\": {";
    bool first = true;
    for (const auto& [mask, want] : gate.truth_table) {
        if (!first) s += ", ";
        first = false;
        s += "\"" + pattern_to_bits(mask, gate.guns.size()) + "\": [";
        for (size_t o = 0; o < want.size(); ++o) {
            if (o) s += ", ";
            s += want[o] ? "true" : "false";
        }
        s += "]";
    }
    s += "}\n";
    s += "}\n";
    return s;
}

inline void save_gate(const GateSpec& gate, const std::string& path) {
    write_text_file(path, gate_to_text(gate));
}

// Output geometry defaults: per-input outputs sit at each gun's overshoot
// terminus, the common output 2D beyond the target on the bisector axis.
inline GateSpec gate_from_text(const std::string& text, const Network& net) {
    nlohmann::json j = nlohmann::json::parse(text);
    GateSpec gate;
    std::string strat = j.at("strategy").get<std::string>();
    if (strat == "per_input")
        gate.strategy = Strategy::PerInput;
    else if (strat == "common")
        gate.strategy = Strategy::Common;
    else
        throw std::runtime_error("strategy must be per_input or common");

    for (const auto& jg : j.at("guns")) {
        GunSpec gun;
        gun.input_node = jg.at("input_node").get<uint32_t>();
        gun.target = {jg.at("target").at(0).get<double>(), jg.at("target").at(1).get<double>()};
        gun.period_p = jg.at("period").get<uint32_t>();
        if (jg.contains("travel_t")) gun.travel_steps_T = jg.at("travel_t").get<uint32_t>();
        if (jg.contains("radius_d")) gun.radius_D = jg.at("radius_d").get<double>();
        gate.guns.push_back(gun);
    }

    if (j.contains("outputs") && !j.at("outputs").empty()) {
        for (const auto& jo : j.at("outputs")) {
            OutputSpec out;
            std::string kind = jo.at("kind").get<std::string>();
            out.kind = kind == "common" ? OutputKind::Common : OutputKind::PerInput;
            out.center = {jo.at("center").at(0).get<double>(),
                          jo.at("center").at(1).get<double>()};
            out.readout_radius =
                jo.contains("radius") ? jo.at("radius").get<double>() : gate.guns.front().radius_D;
            gate.outputs.push_back(out);
        }
    } else if (gate.strategy == Strategy::PerInput) {
        for (const GunSpec& gun : gate.guns)
            gate.outputs.push_back(default_per_input_output(net, gun));
    } else {
        gate.outputs.push_back(default_common_output(net, gate.guns));
    }

    for (const auto& [bits, row] : j.at("truth_table").items()) {
        PatternMask m = pattern_from_bits(bits);
        gate.truth_table[m] = row.get<std::vector<bool>>();
    }
    gate.validate(net);
    return gate;
}

inline GateSpec load_gate(const std::string& path, const Network& net) {
    return gate_from_text(read_text_file(path), net);
}

// ---------------------------------------------------------------------------
// Trace CSVs

inline std::string trace_header(uint64_t seed) {
    return "# glidergates " + std::string(kToolVersion) + " seed=" + std::to_string(seed) + "\n";
}

inline std::string gun_trace_csv(const std::vector<GunTraceRow>& rows, uint64_t seed) {
    std::string s = trace_header(seed) + "attempt,accepted,fitness,period\n";
    for (const GunTraceRow& r : rows)
        s += std::to_string(r.attempt) + "," + (r.accepted ? "1" : "0") + "," +
             fmt_double(r.fitness) + "," + std::to_string(r.period) + "\n";
    return s;
}

inline std::string gate_trace_csv(const std::vector<GateTraceRow>& rows, uint64_t seed) {
    std::string s = trace_header(seed) + "attempt,pattern,accepted,skipped,fitness,skips,undos\n";
    for (const GateTraceRow& r : rows)
        s += std::to_string(r.attempt) + "," + std::to_string(r.pattern) + "," +
             (r.accepted ? "1" : "0") + "," + (r.skipped ? "1" : "0") + "," +
             fmt_double(r.fitness) + "," + std::to_string(r.skips) + "," +
             std::to_string(r.undos) + "\n";
    return s;
}

// ---------------------------------------------------------------------------
// Error reports

inline std::string error_report_json(const ErrorReport& report, const GateSpec& gate,
                                     uint64_t seed) {
    std::string s = "{\n";
    s += "  \"version\": \"" + std::string(kToolVersion) + "\",\n";
    s += "  \"seed\": " + std::to_string(seed) + ",\n";
    s += "  \"per_pattern\": [\n";
    for (size_t i = 0; i < report.per_pattern.size(); ++i) {
        const PatternErrorStats& p = report.per_pattern[i];
        s += "    {\"pattern\": \"" + pattern_to_bits(p.pattern, gate.guns.size()) + "\"" +
             ", \"trials\": " + std::to_string(p.trials) +
             ", \"wrong_output\": " + std::to_string(p.wrong_output) +
             ", \"wrong_period\": " + std::to_string(p.wrong_period) +
             ", \"no_rest\": " + std::to_string(p.no_rest) +
             ", \"errors\": " + std::to_string(p.errors) +
             ", \"error_rate\": " + fmt_double(p.error_rate()) + "}";
        s += i + 1 < report.per_pattern.size() ? ",\n" : "\n";
    }
    s += "  ],\n";
    s += "  \"trials_total\": " + std::to_string(report.trials_total) + ",\n";
    s += "  \"errors_total\": " + std::to_string(report.errors_total) + ",\n";
    s += "  \"error_rate\": " + fmt_double(report.error_rate) + "\n";
    s += "}\n";
    return s;
}

inline std::string error_report_csv(const ErrorReport& report, const GateSpec& gate) {
    std::string s = "pattern,trials,wrong_output,wrong_period,no_rest,E\n";
    for (const PatternErrorStats& p : report.per_pattern)
        s += pattern_to_bits(p.pattern, gate.guns.size()) + "," + std::to_string(p.trials) + "," +
             std::to_string(p.wrong_output) + "," + std::to_string(p.wrong_period) + "," +
             std::to_string(p.no_rest) + "," + fmt_double(p.error_rate()) + "\n";
    return s;
}

// ---------------------------------------------------------------------------
// Trajectories: one line per step, the step index followed by the ids of
// active nodes, space-separated.

inline std::string trajectory_to_text(const std::vector<StateVector>& states) {
    std::string s;
    for (size_t t = 0; t < states.size(); ++t) {
        s += std::to_string(t);
        states[t].for_each_set([&](uint32_t i) { s += " " + std::to_string(i); });
        s += "\n";
    }
    return s;
}

struct TrajectoryFrame {
    uint64_t step = 0;
    std::vector<uint32_t> active;
};

inline std::vector<TrajectoryFrame> trajectory_from_text(const std::string& text) {
    std::vector<TrajectoryFrame> frames;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        TrajectoryFrame f;
        if (!(ls >> f.step)) throw std::runtime_error("bad trajectory line: " + line);
        uint32_t id;
        while (ls >> id) f.active.push_back(id);
        frames.push_back(std::move(f));
    }
    return frames;
}

// ---------------------------------------------------------------------------
// Layout dumps: per time step, disks with region labels, one per line:
// "t label cx cy r". Corridors are sampled as disk chains.

inline std::string layout_dump_text(const RegionLayout& layout, uint32_t steps) {
    std::string s;
    auto emit = [&](uint32_t t, const char* label, Vec2 c, double r) {
        s += std::to_string(t) + " " + label + " " + fmt_double(c.x) + " " + fmt_double(c.y) +
             " " + fmt_double(r) + "\n";
    };
    for (uint32_t t = 0; t < steps; ++t) {
        for (const Disk& d : layout.static2_disks) emit(t, "II", d.center, d.radius);
        for (const Stadium& st : layout.static1_areas) {
            double len = dist(st.a, st.b);
            int n = std::max(1, int(len / st.radius));
            for (int k = 0; k <= n; ++k)
                emit(t, "I", st.a + (st.b - st.a) * (double(k) / n), st.radius);
        }
        for (const Stadium& st : layout.static2_areas) {
            double len = dist(st.a, st.b);
            int n = std::max(1, int(len / st.radius));
            for (int k = 0; k <= n; ++k)
                emit(t, "II", st.a + (st.b - st.a) * (double(k) / n), st.radius);
        }
        if (layout.target_zone) emit(t, "III", layout.target_zone->center, layout.target_zone->radius);
        for (const Disk& d : layout.input_zones) emit(t, "III", d.center, d.radius);
        for (size_t g = 0; g < layout.active_guns.size(); ++g) {
            const GunShots& gs = layout.active_guns[g];
            for (const ShotDisk& disk : shot_disks(gs, layout.phases[g], t, layout.steady_state))
                emit(t, "II", disk.center, gs.gun.radius_D);
        }
    }
    return s;
}

struct LayoutDumpEntry {
    uint64_t step = 0;
    std::string label;
    Vec2 center;
    double radius = 0.0;
};

inline std::vector<LayoutDumpEntry> layout_dump_from_text(const std::string& text) {
    std::vector<LayoutDumpEntry> entries;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        LayoutDumpEntry e;
        if (!(ls >> e.step >> e.label >> e.center.x >> e.center.y >> e.radius))
            throw std::runtime_error("bad layout dump line: " + line);
        entries.push_back(e);
    }
    return entries;
}

}  // namespace gg
