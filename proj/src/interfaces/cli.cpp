#include "evacast/interfaces/cli.hpp"

#include "evacast/core/error.hpp"
#include "evacast/interfaces/service.hpp"
#include "evacast/pipeline/ablation.hpp"
#include "evacast/pipeline/evaluate.hpp"
#include "evacast/pipeline/predict.hpp"
#include "evacast/pipeline/shortterm.hpp"
#include "evacast/synth/calibration.hpp"
#include "evacast/synth/dataset_io.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace evacast::interfaces {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
        dynamic_cast<const json::exception*>(&e) || dynamic_cast<const fs::filesystem_error*>(&e))
        return kExitData;
    return kExitRuntime;
}

namespace {

json read_json_file(const fs::path& p) {
    std::ifstream in(p);
    if (!in)
        throw ParseError("cannot open " + p.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(p.string() + ": " + e.what());
    }
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty())
            out.push_back(item);
    return out;
}

// Shared by the data-consuming commands.
struct DataOpts {
    std::string config;
    std::string data;
    std::size_t epochs = 0;
    std::size_t max_train = 0;

    void add(CLI::App* cmd) {
        cmd->add_option("--config", config, "ExperimentConfig JSON (or a result file holding one under \"config\")");
        cmd->add_option("--data", data, "dataset directory written by `evacast synth` (default: generated fixture)");
        cmd->add_option("--epochs", epochs, "override the training epochs");
        cmd->add_option("--max-train", max_train, "cap on balanced short-term training sequences");
    }

    pipeline::ExperimentConfig experiment() const {
        pipeline::ExperimentConfig c;
        if (!config.empty()) {
            const json j = read_json_file(config);
            c = pipeline::experiment_config_from_json(j.contains("config") ? j.at("config") : j);
        }
        if (!data.empty())
            c.data.data_dir = data;
        if (epochs > 0) {
            c.mlp_adam.epochs = epochs;
            c.seq_adam.epochs = epochs;
        }
        if (max_train > 0)
            c.max_train_sequences = max_train;
        c.validate();
        return c;
    }
};

pipeline::Logger logger(std::ostream& err) {
    const auto t0 = std::chrono::steady_clock::now();
    return [&err, t0](const std::string& msg) {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        char buf[32];
        std::snprintf(buf, sizeof buf, "[%7.1fs] ", s);
        err << buf << msg << std::endl;
    };
}

// Preset name or a hurricane JSON file.
domain::HurricaneEvent resolve_hurricane(const std::string& arg) {
    if (auto p = domain::find_preset(arg))
        return *p;
    if (fs::exists(arg))
        return domain::load_hurricane(arg);
    throw ValidationError("'" + arg + "' is neither a hurricane preset nor a file");
}

// The event's own regular stats when the data holds it, else the cross-event reference.
features::RegularStatsTable stats_for(const domain::EvacuationData& data, const domain::HurricaneEvent& h) {
    for (const auto& ev : data.events)
        if (ev.event.name == h.name)
            return features::compute_regular_stats_table(data.network, ev.event, ev.speeds).stats;
    return pipeline::reference_regular_stats(data);
}

void emit_json(const json& j, const std::string& path, std::ostream& out) {
    if (path.empty())
        out << j.dump(2) << "\n";
    else
        pipeline::save_json(j, path);
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"evacast: hurricane-evacuation congestion and speed prediction"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "evacast 1.0");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset and check its calibration");
    int n_links = 200;
    std::string hurricanes = "ida,delta,laura,zeta,barry";
    std::uint64_t seed = 1;
    std::string out_dir, scenario_file;
    synth->add_option("--links", n_links, "number of links")->check(CLI::PositiveNumber);
    synth->add_option("--hurricanes", hurricanes, "comma-separated preset names");
    synth->add_option("--seed", seed, "network and speed seed");
    synth->add_option("--out", out_dir, "output directory")->required();
    synth->add_option("--scenario", scenario_file, "ScenarioConfig JSON overriding generator defaults");

    // train
    auto* train = app.add_subcommand("train", "train one deployable model");
    DataOpts train_data;
    train_data.add(train);
    std::string task, model_out, cell_name = "lstm", drop_list;
    int horizon = 1;
    train->add_option("--task", task, "long | short")->required()->check(CLI::IsMember({"long", "short"}));
    train->add_option("--horizon", horizon, "short-term horizon in hours")->check(CLI::Range(1, 6));
    train->add_option("--cell", cell_name, "lstm | rnn")->check(CLI::IsMember({"lstm", "rnn"}));
    train->add_option("--out", model_out, "model JSON")->required();
    train->add_option("--seed", seed, "split and initialisation seed");
    train->add_option("--drop", drop_list, "long-term feature columns to leave out");

    // eval
    auto* eval = app.add_subcommand("eval", "run the repeat protocol, or score a saved model");
    DataOpts eval_data;
    eval_data.add(eval);
    std::string model_in, json_out;
    eval->add_option("--task", task, "long | short")->required()->check(CLI::IsMember({"long", "short"}));
    eval->add_option("--model", model_in, "saved model; scored on the test split of --seed");
    eval->add_option("--seed", seed, "split seed for --model");
    eval->add_option("--json", json_out, "write the JSON report here instead of stdout");

    // ablate
    auto* ablate = app.add_subcommand("ablate", "accuracy with and without feature groups");
    DataOpts ablate_data;
    ablate_data.add(ablate);
    ablate->add_option("--drop", drop_list, "comma-separated feature names");
    ablate->add_option("--json", json_out, "write the JSON report here instead of stdout");

    // predict-grid
    auto* grid = app.add_subcommand("predict-grid", "28-period congestion grid for a hurricane");
    std::string data_dir, hurricane_arg, grid_json;
    grid->add_option("--model", model_in, "long-term model JSON")->required();
    grid->add_option("--hurricane", hurricane_arg, "preset name or hurricane JSON")->required();
    grid->add_option("--data", data_dir, "dataset directory (default: generated fixture)");
    grid->add_option("--out", model_out, "GeoJSON output")->required();
    grid->add_option("--json", grid_json, "also write the grid JSON");

    // predict-speed
    auto* speed = app.add_subcommand("predict-speed", "speed forecast with a 95% interval");
    std::string link_id, history_csv;
    std::size_t passes = models::kDefaultMcPasses;
    std::uint64_t mc_seed = 0;
    speed->add_option("--model", model_in, "short-term model JSON")->required();
    speed->add_option("--link", link_id, "link id")->required();
    speed->add_option("--history", history_csv, "CSV link_id,timestamp,speed_mph")->required();
    speed->add_option("--horizon", horizon, "hours ahead; must match the model")->required()->check(CLI::Range(1, 6));
    speed->add_option("--hurricane", hurricane_arg, "preset name or hurricane JSON (default: first in the data)");
    speed->add_option("--data", data_dir, "dataset directory (default: generated fixture)");
    speed->add_option("--passes", passes, "MC dropout passes")->check(CLI::Range(2, 100000));
    speed->add_option("--seed", mc_seed, "MC dropout seed");

    // serve
    auto* serve = app.add_subcommand("serve", "HTTP service");
    const char* env_port = std::getenv("EVACAST_PORT");
    int port = env_port && *env_port ? std::atoi(env_port) : kDefaultPort;
    ServiceConfig svc_cfg = ServiceConfig::from_env();
    std::string host = "0.0.0.0";
    serve->add_option("--port", port, "listen port (env EVACAST_PORT)")->check(CLI::Range(1, 65535));
    serve->add_option("--host", host, "listen address");
    serve->add_option("--models", svc_cfg.model_dir, "model directory (env EVACAST_MODEL_DIR)");
    serve->add_option("--data", svc_cfg.data_dir, "dataset directory (env EVACAST_DATA_DIR)");
    serve->add_option("--workers", svc_cfg.workers, "scenario worker threads")->check(CLI::Range(1, 64));

    // experiment
    auto* experiment = app.add_subcommand("experiment", "long-term, short-term and ablation runs from one config");
    DataOpts exp_data;
    exp_data.add(experiment);
    std::string which = "all";
    experiment->add_option("--task", which, "long | short | ablation | all")
        ->check(CLI::IsMember({"long", "short", "ablation", "all"}));
    experiment->add_option("--out", json_out, "result JSON")->required();

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        if (rc == 0)
            return kExitOk;
        err << app.help();
        return kExitUsage;
    }

    const auto log = logger(err);
    try {
        if (*synth) {
            std::vector<domain::HurricaneEvent> hs;
            for (const auto& name : split_csv(hurricanes)) {
                const auto h = domain::find_preset(name);
                if (!h)
                    throw ValidationError("unknown hurricane preset: " + name);
                hs.push_back(*h);
            }
            synth::ScenarioConfig cfg;
            if (!scenario_file.empty())
                cfg = synth::config_from_json(read_json_file(scenario_file));
            cfg.rng_seed = seed;
            const auto net = synth::generate_network(n_links, domain::kLouisianaBox, seed);
            const auto ds = synth::generate_dataset(net, hs, cfg);
            synth::write_dataset(ds, cfg, out_dir);
            out << "wrote " << n_links << " links x " << hs.size() << " hurricanes to " << out_dir << "\n";
            out << synth::format_calibration(synth::calibration_check(ds));
            return kExitOk;
        }

        if (*train) {
            const auto cfg = train_data.experiment();
            log("loading data");
            const auto data = pipeline::load_or_generate(cfg.data);
            models::TrainHistory hist;
            if (task == "long") {
                auto d = pipeline::prepare_longterm(data, cfg.features);
                if (!drop_list.empty())
                    d = pipeline::drop_features(d, split_csv(drop_list));
                log("training MLP on " + std::to_string(d.samples.size()) + " samples");
                auto art = pipeline::train_longterm_model(d, cfg, seed, &hist);
                models::save_model(art, model_out);
            } else {
                const auto cell = models::parse_cell_type(cell_name);
                log("training " + cell_name + " for horizon " + std::to_string(horizon) + " h");
                auto art = pipeline::train_shortterm_model(data, cfg, horizon, cell, seed, &hist);
                models::save_model(art, model_out);
            }
            out << "saved " << model_out << " (best epoch " << hist.best_epoch + 1 << " of "
                << hist.train_loss.size() << ")\n";
            return kExitOk;
        }

        if (*eval) {
            const auto cfg = eval_data.experiment();
            const auto data = pipeline::load_or_generate(cfg.data);
            json report;
            if (!model_in.empty()) {
                if (task == "long") {
                    const auto art = models::load_mlp(model_in);
                    const auto rep =
                        pipeline::evaluate_longterm_model(art, pipeline::prepare_longterm(data, cfg.features), seed);
                    out << pipeline::format_evaluation(rep);
                    report = metrics::to_json(rep);
                } else {
                    const auto art = models::load_sequence_model(model_in);
                    const auto rep = pipeline::evaluate_shortterm_model(art, data, cfg, seed);
                    out << pipeline::format_evaluation(rep);
                    report = pipeline::to_json(rep);
                }
            } else {
                const auto r = task == "long" ? pipeline::run_longterm_experiment(data, cfg, log)
                                              : pipeline::run_shortterm_experiment(data, cfg, log);
                out << pipeline::format_result(r);
                report = pipeline::to_json(r);
            }
            emit_json(report, json_out, out);
            return kExitOk;
        }

        if (*ablate) {
            const auto cfg = ablate_data.experiment();
            const auto data = pipeline::load_or_generate(cfg.data);
            const auto drop = drop_list.empty() ? cfg.ablation_drop : split_csv(drop_list);
            const auto r = pipeline::run_ablation(pipeline::prepare_longterm(data, cfg.features), cfg, drop, nullptr, log);
            out << pipeline::format_ablation(r);
            emit_json(pipeline::to_json(r), json_out, out);
            return kExitOk;
        }

        if (*grid) {
            const auto data = pipeline::load_or_generate(pipeline::data_source_at(data_dir));
            const auto h = resolve_hurricane(hurricane_arg);
            const auto art = models::load_mlp(model_in);
            const auto g = pipeline::predict_congestion_grid(art, data.network, h, stats_for(data, h));
            pipeline::save_json(pipeline::grid_to_geojson(g, data.network), model_out);
            if (!grid_json.empty())
                pipeline::save_json(pipeline::grid_to_json(g), grid_json);
            std::size_t heavy = 0;
            for (const auto& row : g.rows)
                for (const auto l : row.labels)
                    heavy += l == features::CongestionLabel::HeavyCongestion;
            out << "grid for " << h.name << ": " << g.rows.size() << " links x " << features::kEventPeriods
                << " periods, " << heavy << " heavy cells, " << g.skipped_links.size() << " skipped\n";
            return kExitOk;
        }

        if (*speed) {
            const auto data = pipeline::load_or_generate(pipeline::data_source_at(data_dir));
            const auto art = models::load_sequence_model(model_in);
            if (art.horizon_h != horizon)
                throw ValidationError("model predicts " + std::to_string(art.horizon_h) + " h ahead, not " +
                                      std::to_string(horizon) + " h");
            const auto* link = data.network.find(link_id);
            if (!link)
                throw ValidationError("unknown link '" + link_id + "'");
            const auto table = domain::load_speeds_csv(history_csv);
            const auto series = table.find(link_id);
            if (series == table.end())
                throw ValidationError("history has no rows for link '" + link_id + "'");
            if (data.events.empty() && hurricane_arg.empty())
                throw ValidationError("no hurricane given and none in the data");
            const auto h = hurricane_arg.empty() ? data.events.front().event : resolve_hurricane(hurricane_arg);
            const auto stats = stats_for(data, h);
            const auto st = stats.find(link_id);
            if (st == stats.end())
                throw ValidationError("no regular statistics for link '" + link_id + "'");
            const auto p = pipeline::predict_speed_with_ci(art, series->second, *link, h, st->second, passes, mc_seed);
            out << pipeline::prediction_to_json(p).dump(2) << "\n";
            return kExitOk;
        }

        if (*serve) {
            Service svc(svc_cfg);
            std::string load_error;
            std::thread loader([&] {
                svc.wait_until_listening();
                try {
                    svc.load();
                    log("models loaded from " + svc_cfg.model_dir);
                } catch (const std::exception& e) {
                    load_error = e.what();
                    svc.stop();
                }
            });
            log("listening on " + host + ":" + std::to_string(port));
            const bool ok = svc.listen(host, port);
            loader.join();
            if (!ok)
                throw Error("cannot listen on " + host + ":" + std::to_string(port));
            if (!load_error.empty())
                throw ValidationError("cannot load service state: " + load_error);
            return kExitOk;
        }

        if (*experiment) {
            const auto cfg = exp_data.experiment();
            const auto data = pipeline::load_or_generate(cfg.data);
            json result{{"config", pipeline::config_to_json(cfg)}};
            if (which == "long" || which == "all" || which == "ablation") {
                const auto d = pipeline::prepare_longterm(data, cfg.features);
                const auto full = pipeline::run_longterm_experiment(d, cfg, log);
                out << pipeline::format_result(full);
                result["long"] = pipeline::to_json(full);
                if (which != "long") {
                    const auto ab = pipeline::run_ablation(d, cfg, cfg.ablation_drop, &full, log);
                    out << pipeline::format_ablation(ab);
                    result["ablation"] = pipeline::to_json(ab);
                }
            }
            if (which == "short" || which == "all") {
                const auto r = pipeline::run_shortterm_experiment(data, cfg, log);
                out << pipeline::format_result(r);
                result["short"] = pipeline::to_json(r);
            }
            pipeline::save_json(result, json_out);
            return kExitOk;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return kExitUsage;
}

} // namespace evacast::interfaces
