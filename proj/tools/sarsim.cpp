#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sarsim/config.hpp"
#include "sarsim/localization.hpp"
#include "sarsim/log.hpp"
#include "sarsim/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitTimeout = 3;

sarsim::RunConfig load_or_default(const std::string& path) {
    if (path.empty()) {
        sarsim::RunConfig cfg = sarsim::default_config();
        sarsim::validate_config(cfg);
        return cfg;
    }
    return sarsim::load_config_file(path);
}

std::string format_seconds(double s) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f", s);
    return buf;
}

// ---------------------------------------------------------------------------
// run

int cmd_run(const std::string& config_path, std::uint64_t seed, const std::string& out_dir) {
    sarsim::RunConfig cfg;
    try {
        cfg = load_or_default(config_path);
    } catch (const sarsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitBadInput;
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    fs::path log_path = fs::path(out_dir) / "mission.jsonl";
    fs::path metrics_path = fs::path(out_dir) / "metrics.json";
    std::ofstream log_file(log_path, std::ios::binary);
    if (!log_file) {
        std::cerr << "cannot open " << log_path.string() << " for writing\n";
        return kExitBadInput;
    }

    sarsim::SimOptions opts;
    opts.log_stream = &log_file;
    sarsim::RunResult result = sarsim::run_mission(cfg, seed, opts);
    log_file.close();

    std::ofstream metrics_file(metrics_path, std::ios::binary);
    if (!metrics_file) {
        std::cerr << "cannot open " << metrics_path.string() << " for writing\n";
        return kExitBadInput;
    }
    metrics_file << sarsim::metrics_to_json(result.metrics);
    metrics_file.close();

    const sarsim::Metrics& m = result.metrics;
    std::printf("seed %llu: %s t=%s s picks %ld/%ld delivered %ld violations %ld\n",
                static_cast<unsigned long long>(seed), m.complete ? "complete" : "INCOMPLETE",
                format_seconds(m.completion_time_s).c_str(), m.picks_succeeded, m.picks_attempted,
                m.objects_delivered, m.safety_violations());
    std::printf("wrote %s and %s\n", log_path.string().c_str(), metrics_path.string().c_str());
    return result.exit_code;
}

// ---------------------------------------------------------------------------
// batch

struct SeedRange {
    std::uint64_t first = 0;
    std::uint64_t last = 0;
};

std::optional<SeedRange> parse_seed_range(const std::string& text) {
    SeedRange r;
    auto pos = text.find("..");
    try {
        if (pos == std::string::npos) {
            r.first = r.last = std::stoull(text);
        } else {
            r.first = std::stoull(text.substr(0, pos));
            r.last = std::stoull(text.substr(pos + 2));
        }
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (r.last < r.first) return std::nullopt;
    return r;
}

int cmd_batch(const std::string& config_path, const std::string& seeds_text, int parallel,
              const std::string& out_dir) {
    auto range = parse_seed_range(seeds_text);
    if (!range) {
        std::cerr << "invalid --seeds value '" << seeds_text << "', expected A..B\n";
        return kExitBadInput;
    }
    sarsim::RunConfig cfg;
    try {
        cfg = load_or_default(config_path);
    } catch (const sarsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitBadInput;
    }

    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = range->first; s <= range->last; ++s) seeds.push_back(s);
    std::vector<sarsim::RunResult> results(seeds.size());

    auto wall_start = std::chrono::steady_clock::now();
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= seeds.size()) return;
            results[i] = sarsim::run_mission(cfg, seeds[i], sarsim::SimOptions{});
        }
    };
    int thread_count = std::max(1, std::min<int>(parallel, static_cast<int>(seeds.size())));
    if (thread_count == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(thread_count));
        for (int i = 0; i < thread_count; ++i) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    double wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start)
                        .count();

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    fs::path csv_path = fs::path(out_dir) / "summary.csv";
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) {
        std::cerr << "cannot open " << csv_path.string() << " for writing\n";
        return kExitBadInput;
    }
    csv << "seed,complete,completion_time_s,picks_attempted,picks_succeeded,"
           "drop_zone_violations,separation_violations,min_pairwise_distance_m,exit_code\n";

    std::printf("%6s  %8s  %10s  %6s  %10s  %4s\n", "seed", "complete", "time_s", "picks",
                "violations", "exit");
    long complete_count = 0;
    double sum = 0.0;
    double sum_sq = 0.0;
    std::vector<std::uint64_t> violating;
    bool any_incomplete = false;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const sarsim::Metrics& m = results[i].metrics;
        char picks[32];
        std::snprintf(picks, sizeof(picks), "%ld/%ld", m.picks_succeeded, m.picks_attempted);
        std::printf("%6llu  %8s  %10.1f  %6s  %10ld  %4d\n",
                    static_cast<unsigned long long>(seeds[i]), m.complete ? "yes" : "NO",
                    m.completion_time_s, picks, m.safety_violations(), results[i].exit_code);
        char mpd[32];
        if (m.min_pairwise_distance_m) {
            std::snprintf(mpd, sizeof(mpd), "%.6g", *m.min_pairwise_distance_m);
        } else {
            std::snprintf(mpd, sizeof(mpd), "%s", "");
        }
        char row[256];
        std::snprintf(row, sizeof(row), "%llu,%d,%.6g,%ld,%ld,%ld,%ld,%s,%d\n",
                      static_cast<unsigned long long>(seeds[i]), m.complete ? 1 : 0,
                      m.completion_time_s, m.picks_attempted, m.picks_succeeded,
                      m.drop_zone_violations, m.separation_violations, mpd,
                      results[i].exit_code);
        csv << row;
        if (m.complete) {
            ++complete_count;
            sum += m.completion_time_s;
            sum_sq += m.completion_time_s * m.completion_time_s;
        } else {
            any_incomplete = true;
        }
        if (m.safety_violations() > 0) violating.push_back(seeds[i]);
    }
    csv.close();

    double mean = complete_count > 0 ? sum / static_cast<double>(complete_count) : 0.0;
    double sigma = 0.0;
    if (complete_count > 1) {
        double var = (sum_sq - static_cast<double>(complete_count) * mean * mean) /
                     static_cast<double>(complete_count - 1);
        sigma = std::sqrt(std::max(0.0, var));
    }
    std::printf("complete %ld/%zu, mean completion %.1f s (%.2f min), sigma %.1f s, wall %.1f s\n",
                complete_count, seeds.size(), mean, mean / 60.0, sigma, wall_s);
    std::printf("wrote %s\n", csv_path.string().c_str());

    if (!violating.empty()) {
        std::string list;
        for (std::size_t i = 0; i < violating.size(); ++i) {
            if (i > 0) list += ", ";
            list += std::to_string(violating[i]);
        }
        std::printf("safety violations in seeds: %s\n", list.c_str());
        return kExitViolation;
    }
    if (any_incomplete) return kExitTimeout;
    return kExitOk;
}

// ---------------------------------------------------------------------------
// replay

struct ReplayCounts {
    long records = 0;
    long detections = 0;
    long comms = 0;
};

std::string json_or_empty(const ordered_json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return "";
    return it->get<std::string>();
}

int cmd_replay(const std::string& log_path, double speed, bool no_wait,
               const std::string& export_dir) {
    std::ifstream in(log_path, std::ios::binary);
    if (!in) {
        std::cerr << "cannot open " << log_path << "\n";
        return kExitBadInput;
    }

    std::ofstream events_out;
    std::ofstream altitude_csv;
    std::ofstream distance_csv;
    if (!export_dir.empty()) {
        std::error_code ec;
        fs::create_directories(export_dir, ec);
        events_out.open(fs::path(export_dir) / "events.jsonl", std::ios::binary);
        altitude_csv.open(fs::path(export_dir) / "altitude.csv", std::ios::binary);
        distance_csv.open(fs::path(export_dir) / "distance.csv", std::ios::binary);
        if (!events_out || !altitude_csv || !distance_csv) {
            std::cerr << "cannot open export files under " << export_dir << "\n";
            return kExitBadInput;
        }
        altitude_csv << "t,uav,alt_m,state,phase\n";
        distance_csv << "t,uav,distance_m\n";
    }

    ReplayCounts counts;
    std::map<int, std::string> final_state;
    std::map<int, double> last_trace_t;
    std::optional<ordered_json> metric_record;
    double t_prev = 0.0;
    bool have_prev = false;
    std::string line;
    long lineno = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        ordered_json rec;
        double t = 0.0;
        int uav = 0;
        std::string kind;
        try {
            rec = ordered_json::parse(line);
            t = rec.at("t").get<double>();
            uav = rec.at("uav").get<int>();
            kind = rec.at("kind").get<std::string>();
        } catch (const std::exception& e) {
            std::cerr << log_path << ":" << lineno << ": malformed record: " << e.what() << "\n";
            return kExitBadInput;
        }
        ++counts.records;
        if (events_out.is_open()) events_out << rec.dump() << '\n';

        if (!no_wait && speed > 0.0 && have_prev && t > t_prev) {
            std::this_thread::sleep_for(std::chrono::duration<double>((t - t_prev) / speed));
        }
        t_prev = t;
        have_prev = true;

        if (kind == "state_transition") {
            bool handled = rec.value("handled", true);
            std::string to = json_or_empty(rec, "to");
            if (!to.empty()) final_state[uav] = to;
            if (handled) {
                std::printf("t=%9.2f  uav %d  %s --%s--> %s\n", t, uav,
                            json_or_empty(rec, "from").c_str(),
                            json_or_empty(rec, "event").c_str(), to.c_str());
            }
        } else if (kind == "gripper") {
            char dist[32] = "n/a";
            auto it = rec.find("dist");
            if (it != rec.end() && !it->is_null()) {
                std::snprintf(dist, sizeof(dist), "%.3f m", it->get<double>());
            }
            std::printf("t=%9.2f  uav %d  gripper %s: %s feedback=%d dist=%s\n", t, uav,
                        json_or_empty(rec, "op").c_str(),
                        rec.value("success", false) ? "success" : "fail",
                        rec.value("feedback", 0), dist);
        } else if (kind == "violation") {
            std::printf("t=%9.2f  VIOLATION %s value=%.3f\n", t,
                        json_or_empty(rec, "rule").c_str(), rec.value("value", 0.0));
        } else if (kind == "setpoint") {
            std::string state = json_or_empty(rec, "state");
            if (!state.empty()) final_state[uav] = state;
            const auto& pos = rec.at("pos");
            double alt = pos.at(2).get<double>();
            std::string phase = json_or_empty(rec, "phase");
            auto dist_it = rec.find("dist");
            bool has_dist = dist_it != rec.end() && !dist_it->is_null();
            if (altitude_csv.is_open()) {
                char row[160];
                std::snprintf(row, sizeof(row), "%.12g,%d,%.12g,%s,%s\n", t, uav, alt,
                              state.c_str(), phase.c_str());
                altitude_csv << row;
            }
            if (has_dist && distance_csv.is_open()) {
                char row[96];
                std::snprintf(row, sizeof(row), "%.12g,%d,%.12g\n", t, uav,
                              dist_it->get<double>());
                distance_csv << row;
            }
            if (has_dist) {
                double& last = last_trace_t.try_emplace(uav, -1e9).first->second;
                if (t - last >= 0.5) {
                    last = t;
                    std::printf("t=%9.2f  uav %d  dist %.2f m  alt %.2f m  [%s%s%s]\n", t, uav,
                                dist_it->get<double>(), alt, state.c_str(),
                                phase.empty() ? "" : "/", phase.c_str());
                }
            }
        } else if (kind == "detection") {
            ++counts.detections;
        } else if (kind == "comms_tx" || kind == "comms_rx") {
            ++counts.comms;
        } else if (kind == "metric") {
            metric_record = rec;
        }
    }

    std::printf("replayed %ld records spanning %.1f s (%ld detections, %ld comms events)\n",
                counts.records, have_prev ? t_prev : 0.0, counts.detections, counts.comms);
    for (const auto& [uav, state] : final_state) {
        std::printf("uav %d: final state %s\n", uav, state.c_str());
    }
    if (metric_record) {
        std::printf("metrics: complete=%s time=%.1f s picks %lld/%lld delivered %lld "
                    "violations %lld\n",
                    metric_record->value("complete", false) ? "true" : "false",
                    metric_record->value("completion_time_s", 0.0),
                    metric_record->value("picks_succeeded", 0LL),
                    metric_record->value("picks_attempted", 0LL),
                    metric_record->value("objects_delivered", 0LL),
                    metric_record->value("drop_zone_violations", 0LL) +
                        metric_record->value("separation_violations", 0LL));
    }
    if (!export_dir.empty()) {
        std::printf("exported events.jsonl, altitude.csv, distance.csv to %s\n",
                    export_dir.c_str());
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// calibrate

int cmd_calibrate(const std::string& samples_path) {
    std::vector<sarsim::CalibrationSample> samples;
    sarsim::CalibrationFit fit;
    try {
        samples = sarsim::load_calibration_csv(samples_path);
        fit = sarsim::fit_calibration(samples);
    } catch (const std::exception& e) {
        std::cerr << "calibration failed: " << e.what() << "\n";
        return kExitBadInput;
    }

    std::printf("fitted %zu samples: a=%.9f b=%.9f residual rms=%.9f\n", samples.size(), fit.a,
                fit.b, fit.rms);

    sarsim::CalibrationModel defaults = sarsim::default_config().calibration;
    ordered_json snippet;
    snippet["a"] = fit.a;
    snippet["b"] = fit.b;
    snippet["h_c_m"] = defaults.h_c;
    snippet["units_to_meters"] = defaults.units_to_meters;
    snippet["image_width_px"] = defaults.image_width;
    snippet["image_height_px"] = defaults.image_height;
    std::printf("config snippet:\n\"calibration\": %s\n", snippet.dump(2).c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"search-and-rescue multi-UAV mission simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 42;
    std::string out_dir = "out";
    CLI::App* run = app.add_subcommand("run", "run one mission and write logs + metrics");
    run->add_option("--config", config_path, "config file (JSON)")->envname("SARSIM_CONFIG");
    run->add_option("--seed", seed, "RNG seed");
    run->add_option("--out", out_dir, "output directory");

    std::string seeds_text;
    int parallel = 1;
    std::string batch_out = "out";
    CLI::App* batch = app.add_subcommand("batch", "run a seed range and summarize");
    batch->add_option("--config", config_path, "config file (JSON)")->envname("SARSIM_CONFIG");
    batch->add_option("--seeds", seeds_text, "seed range A..B")->required();
    batch->add_option("--parallel", parallel, "worker thread count")
        ->check(CLI::PositiveNumber);
    batch->add_option("--out", batch_out, "output directory for summary.csv");

    std::string log_path;
    double speed = 1.0;
    bool no_wait = false;
    std::string export_dir;
    CLI::App* replay = app.add_subcommand("replay", "render a mission log to the terminal");
    replay->add_option("log", log_path, "mission.jsonl path")->required();
    replay->add_option("--speed", speed, "wall-time speed multiplier")
        ->check(CLI::PositiveNumber);
    replay->add_flag("--no-wait", no_wait, "render instantly without pacing");
    replay->add_option("--export", export_dir, "export events.jsonl + CSV traces to a directory");

    std::string samples_path;
    CLI::App* calibrate = app.add_subcommand("calibrate", "fit the pixel-to-ground model");
    calibrate->add_option("--samples", samples_path, "CSV with header pixels,meters")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadInput;
    }

    if (run->parsed()) return cmd_run(config_path, seed, out_dir);
    if (batch->parsed()) return cmd_batch(config_path, seeds_text, parallel, batch_out);
    if (replay->parsed()) return cmd_replay(log_path, speed, no_wait, export_dir);
    if (calibrate->parsed()) return cmd_calibrate(samples_path);
    return kExitBadInput;
}
