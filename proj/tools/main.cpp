// Command-line front end: generate networks, train glider guns and gates,
// measure error rates, and export animation frames.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glidergates/evaluator.hpp"
#include "glidergates/gate_trainer.hpp"
#include "glidergates/generation.hpp"
#include "glidergates/gun_trainer.hpp"
#include "glidergates/io.hpp"
#include "glidergates/render.hpp"

namespace {

gg::Vec2 as_vec2(const std::vector<double>& v, const char* what) {
    if (v.size() != 2) throw CLI::ValidationError(std::string(what) + " needs two values x,y");
    return {v[0], v[1]};
}

void print_result(const std::string& json_fields) {
    std::cout << "RESULT {\"version\": \"" << gg::kToolVersion << "\", " << json_fields << "}"
              << std::endl;
}

std::string q(const std::string& s) { return "\"" + s + "\""; }

// Nearest excitatory node to a point; used when the input node is given by
// coordinates rather than id.
uint32_t nearest_excitatory(const gg::Network& net, gg::Vec2 p) {
    uint32_t best = net.n();
    double best_d = 1e30;
    for (uint32_t i = 0; i < net.n(); ++i) {
        if (net.sign[i] != 1) continue;
        double d = gg::dist(net.pos[i], p);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    if (best == net.n()) throw std::runtime_error("no excitatory node found");
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collision-based logic gates from glider guns in spatial threshold networks"};
    app.require_subcommand(1);

    // ---- generate ----------------------------------------------------------
    auto* gen = app.add_subcommand("generate", "Calibrate the wiring law and generate a network");
    gg::NetworkParams params;
    uint64_t gen_seed = 1;
    uint64_t gen_samples = 200000;
    std::string gen_out = "network.json";
    std::string gen_stats_out;
    gen->add_option("--n", params.n_nodes, "number of nodes");
    gen->add_option("--threshold", params.threshold_h, "activation threshold h");
    gen->add_option("--k", params.target_mean_degree_k, "target mean degree");
    gen->add_option("--c", params.target_clustering_c, "target clustering coefficient");
    gen->add_option("--excitatory", params.excitatory_fraction, "excitatory node fraction");
    gen->add_option("--seed", gen_seed, "rng seed");
    gen->add_option("--samples", gen_samples, "calibration sample count");
    gen->add_option("--out", gen_out, "network file to write");
    gen->add_option("--stats-out", gen_stats_out, "stats sidecar file (default <out>.stats.json)");

    // ---- train-gun ---------------------------------------------------------
    auto* tgun = app.add_subcommand("train-gun", "Tune a gun's period, then shape its gliders");
    std::string tgun_net, tgun_out = "gun_net.json", tgun_journal, tgun_trace;
    std::string tgun_traj_out, tgun_layout_out;
    int64_t tgun_input_node = -1;
    std::vector<double> tgun_input_near, tgun_target;
    gg::GunTrainConfig gun_cfg;
    uint64_t tgun_seed = 1;
    uint32_t tgun_t_steps = gg::kDefaultTravelSteps;
    double tgun_radius = gg::kDefaultRadiusD;
    tgun->add_option("--net", tgun_net, "input network file")->required();
    tgun->add_option("--input-node", tgun_input_node, "input node id");
    tgun->add_option("--input-near", tgun_input_near, "pick nearest excitatory node to x,y")
        ->delimiter(',');
    tgun->add_option("--target", tgun_target, "target point x,y")->required()->delimiter(',');
    tgun->add_option("--period", gun_cfg.desired_period, "desired prime period")->required();
    tgun->add_option("--t-steps", tgun_t_steps, "steps from input to target");
    tgun->add_option("--radius-d", tgun_radius, "glider disk radius D");
    tgun->add_option("--period-budget", gun_cfg.period_budget, "period-stage swap attempts");
    tgun->add_option("--budget", gun_cfg.shape_budget, "shape-stage swap attempts");
    tgun->add_option("--max-steps", gun_cfg.cycle_max_steps, "cycle search step cap");
    tgun->add_option("--rest-steps", gun_cfg.rest_max_steps, "rest relaxation step cap");
    tgun->add_option("--seed", tgun_seed, "rng seed");
    tgun->add_option("--out", tgun_out, "trained network file");
    tgun->add_option("--journal", tgun_journal, "journal file for this run");
    tgun->add_option("--trace", tgun_trace, "shape-stage trace CSV");
    tgun->add_option("--traj-out", tgun_traj_out, "export the trained gun's cycle trajectory");
    tgun->add_option("--layout-out", tgun_layout_out, "export the gun's region layout dump");

    // ---- train-gate --------------------------------------------------------
    auto* tgate = app.add_subcommand("train-gate", "Train a multi-gun Boolean gate");
    std::string tgate_net, tgate_gate, tgate_out = "gate_net.json", tgate_journal, tgate_trace;
    gg::GateTrainConfig gate_cfg;
    uint64_t tgate_seed = 1;
    tgate->add_option("--net", tgate_net, "input network file (guns already trained)")->required();
    tgate->add_option("--gate", tgate_gate, "gate spec file")->required();
    tgate->add_option("--budget", gate_cfg.budget, "rewiring attempts");
    tgate->add_option("--eval-every", gate_cfg.eval_every, "measure error rate every N attempts");
    tgate->add_option("--trials", gate_cfg.eval_trials, "trials per pattern for periodic checks");
    tgate->add_option("--skip-factor", gate_cfg.skip_factor, "pattern skip threshold factor");
    tgate->add_option("--skip-limit", gate_cfg.skip_limit, "consecutive skips before rollback");
    tgate->add_option("--max-steps", gate_cfg.cycle_max_steps, "cycle search step cap");
    tgate->add_option("--rest-steps", gate_cfg.rest_max_steps, "rest relaxation step cap");
    tgate->add_option("--seed", tgate_seed, "rng seed");
    tgate->add_option("--out", tgate_out, "best network file");
    tgate->add_option("--journal", tgate_journal, "journal file for the best network");
    tgate->add_option("--trace", tgate_trace, "training trace CSV");

    // ---- eval --------------------------------------------------------------
    auto* ev = app.add_subcommand("eval", "Measure a gate's error rate");
    std::string ev_net, ev_gate, ev_report = "report.json", ev_csv, ev_export;
    uint32_t ev_trials = 1000;
    uint64_t ev_seed = 1;
    bool ev_certify = false;
    ev->add_option("--net", ev_net, "network file")->required();
    ev->add_option("--gate", ev_gate, "gate spec file")->required();
    ev->add_option("--trials", ev_trials, "trials per pattern");
    ev->add_option("--seed", ev_seed, "rng seed");
    ev->add_option("--report", ev_report, "report JSON file");
    ev->add_option("--csv", ev_csv, "per-pattern CSV file");
    ev->add_flag("--certify", ev_certify, "also require relaxation from every cycle phase");
    ev->add_option("--export", ev_export,
                   "prefix: write <prefix>.<pattern>.traj.txt and .layout.txt per pattern");

    // ---- render ------------------------------------------------------------
    auto* ren = app.add_subcommand("render", "Export trajectory frames as PPM images");
    std::string ren_net, ren_traj, ren_layout, ren_dir = "frames";
    int ren_size = 512;
    ren->add_option("--net", ren_net, "network file")->required();
    ren->add_option("--traj", ren_traj, "trajectory file")->required();
    ren->add_option("--layout", ren_layout, "layout dump file (optional)");
    ren->add_option("--out-dir", ren_dir, "output directory");
    ren->add_option("--size", ren_size, "frame size in pixels");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            params.rng_seed = gen_seed;
            gg::Rng rng(gen_seed);
            gg::Rng cal_rng = rng.child("calibrate");
            gg::CalibrationReport cal =
                gg::calibrate_connection_law_full(params, gen_samples, cal_rng);
            gg::Rng net_rng = rng.child("generate");
            gg::Network net = gg::generate_network(params, cal.law, net_rng);
            gg::GraphStats stats = gg::measure_graph_stats(net);
            gg::save_network(net, gen_out);
            std::string stats_path = gen_stats_out.empty() ? gen_out + ".stats.json" : gen_stats_out;
            std::string stats_json =
                "{\n  \"version\": " + q(gg::kToolVersion) +
                ",\n  \"seed\": " + std::to_string(gen_seed) +
                ",\n  \"n\": " + std::to_string(params.n_nodes) +
                ",\n  \"k_target\": " + gg::fmt_double(params.target_mean_degree_k) +
                ",\n  \"c_target\": " + gg::fmt_double(params.target_clustering_c) +
                ",\n  \"K\": " + gg::fmt_double(cal.law.amplitude_k) +
                ",\n  \"lambda\": " + gg::fmt_double(cal.law.decay_lambda) +
                ",\n  \"mean_degree\": " + gg::fmt_double(stats.mean_degree) +
                ",\n  \"clustering\": " + gg::fmt_double(stats.clustering) + "\n}\n";
            gg::write_text_file(stats_path, stats_json);
            print_result(q("cmd") + ": " + q("generate") + ", " + q("seed") + ": " +
                         std::to_string(gen_seed) + ", " + q("out") + ": " + q(gen_out) + ", " +
                         q("mean_degree") + ": " + gg::fmt_double(stats.mean_degree) + ", " +
                         q("clustering") + ": " + gg::fmt_double(stats.clustering));
        } else if (*tgun) {
            gg::Network net = gg::load_network(tgun_net);
            uint32_t input_node;
            if (tgun_input_node >= 0)
                input_node = static_cast<uint32_t>(tgun_input_node);
            else if (!tgun_input_near.empty())
                input_node = nearest_excitatory(net, as_vec2(tgun_input_near, "--input-near"));
            else
                throw CLI::ValidationError("train-gun needs --input-node or --input-near");
            if (!net.is_input[input_node]) net.designate_input(input_node);

            gg::GunSpec gun;
            gun.input_node = input_node;
            gun.target = as_vec2(tgun_target, "--target");
            gun.period_p = gun_cfg.desired_period;
            gun.travel_steps_T = tgun_t_steps;
            gun.radius_D = tgun_radius;

            gg::RewireJournal journal;
            gg::Rng rng(tgun_seed);
            gg::GunTrainResult res = gg::train_gun(net, journal, gun, gun_cfg, rng);
            gg::save_network(net, tgun_out);
            if (!tgun_journal.empty()) gg::save_journal(journal, tgun_journal);
            if (!tgun_trace.empty()) gg::write_text_file(tgun_trace, gg::gun_trace_csv(res.shape.trace, tgun_seed));
            if (!tgun_traj_out.empty() || !tgun_layout_out.empty()) {
                gg::Dynamics dyn(net);
                auto cyc = dyn.find_limit_cycle(dyn.zero_state(),
                                                gg::InputAssignment::single(input_node),
                                                gun_cfg.cycle_max_steps);
                if (cyc) {
                    if (!tgun_traj_out.empty())
                        gg::write_text_file(tgun_traj_out, gg::trajectory_to_text(cyc->states));
                    if (!tgun_layout_out.empty()) {
                        gg::RegionLayout layout = gg::build_gun_layout(net, gun);
                        layout.phases = gg::fitness(dyn, *cyc, layout).phases;
                        gg::write_text_file(tgun_layout_out,
                                            gg::layout_dump_text(layout, cyc->period));
                    }
                }
            }
            print_result(q("cmd") + ": " + q("train-gun") + ", " + q("seed") + ": " +
                         std::to_string(tgun_seed) + ", " + q("input_node") + ": " +
                         std::to_string(input_node) + ", " + q("period_ok") + ": " +
                         (res.period_ok ? "true" : "false") + ", " + q("period_attempts") + ": " +
                         std::to_string(res.period_attempts) + ", " + q("shape_ok") + ": " +
                         (res.shape_ok ? "true" : "false") + ", " + q("fitness") + ": " +
                         gg::fmt_double(res.shape.final_fitness) + ", " + q("progress") + ": " +
                         gg::fmt_double(res.shape.final_progress) + ", " + q("out") + ": " +
                         q(tgun_out));
            if (!res.period_ok) return 3;
        } else if (*tgate) {
            gg::Network net = gg::load_network(tgate_net);
            gg::GateSpec gate = gg::load_gate(tgate_gate, net);
            gg::RewireJournal journal;
            gg::Rng rng(tgate_seed);
            gg::GateTrainResult res = gg::train_gate(net, journal, gate, gate_cfg, rng);
            gg::save_network(res.best_net, tgate_out);
            if (!tgate_journal.empty()) gg::save_journal(res.best_journal, tgate_journal);
            if (!tgate_trace.empty())
                gg::write_text_file(tgate_trace, gg::gate_trace_csv(res.trace, tgate_seed));
            print_result(q("cmd") + ": " + q("train-gate") + ", " + q("seed") + ": " +
                         std::to_string(tgate_seed) + ", " + q("attempts") + ": " +
                         std::to_string(res.attempts) + ", " + q("accepted") + ": " +
                         std::to_string(res.accepted) + ", " + q("best_error") + ": " +
                         gg::fmt_double(res.best_error) + ", " + q("reached_zero") + ": " +
                         (res.reached_zero ? "true" : "false") + ", " + q("total_fitness") + ": " +
                         gg::fmt_double(res.final_total_fitness) + ", " + q("out") + ": " +
                         q(tgate_out));
        } else if (*ev) {
            gg::Network net = gg::load_network(ev_net);
            gg::GateSpec gate = gg::load_gate(ev_gate, net);
            gg::Rng rng(ev_seed);
            gg::Rng trial_rng = rng.child("evaluation");
            gg::ErrorReport report =
                gg::measure_error_rate(net, gate, ev_trials, trial_rng, ev_certify);
            gg::write_text_file(ev_report, gg::error_report_json(report, gate, ev_seed));
            if (!ev_csv.empty()) gg::write_text_file(ev_csv, gg::error_report_csv(report, gate));
            if (!ev_export.empty()) {
                // one representative macro cycle + layout dump per pattern
                gg::GateSession session(net, gate);
                session.reset_to_rest();
                gg::Rng export_rng = rng.child("export");
                for (gg::PatternMask m : gate.patterns()) {
                    gg::PatternResult r = session.evaluate_pattern(m, export_rng);
                    std::string base =
                        ev_export + "." + gg::pattern_to_bits(m, gate.guns.size());
                    if (r.cycle_found) {
                        gg::write_text_file(base + ".traj.txt",
                                            gg::trajectory_to_text(session.last_cycle().states));
                        gg::write_text_file(
                            base + ".layout.txt",
                            gg::layout_dump_text(session.layout(m), r.measured_period));
                    }
                    session.drop_and_settle(export_rng);
                }
            }
            print_result(q("cmd") + ": " + q("eval") + ", " + q("seed") + ": " +
                         std::to_string(ev_seed) + ", " + q("trials") + ": " +
                         std::to_string(report.trials_total) + ", " + q("errors") + ": " +
                         std::to_string(report.errors_total) + ", " + q("error_rate") + ": " +
                         gg::fmt_double(report.error_rate) + ", " + q("report") + ": " +
                         q(ev_report));
        } else if (*ren) {
            gg::Network net = gg::load_network(ren_net);
            std::vector<gg::TrajectoryFrame> frames =
                gg::trajectory_from_text(gg::read_text_file(ren_traj));
            std::vector<gg::LayoutDumpEntry> layout;
            if (!ren_layout.empty())
                layout = gg::layout_dump_from_text(gg::read_text_file(ren_layout));
            gg::RenderResult res = gg::render_frames(net, frames, layout, ren_dir, ren_size);
            print_result(q("cmd") + ": " + q("render") + ", " + q("frames") + ": " +
                         std::to_string(res.frame_files.size()) + ", " + q("manifest") + ": " +
                         q(res.manifest_file));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
