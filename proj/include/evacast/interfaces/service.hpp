#pragma once

#include "evacast/domain/evacuation_data.hpp"
#include "evacast/features/spi.hpp"
#include "evacast/models/serialize.hpp"
#include "evacast/pipeline/predict.hpp"

#include <nlohmann/json.hpp>

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace evacast::interfaces {

inline constexpr int kDefaultPort = 8080;
inline constexpr double kLandfallMarginDeg = 1.0;

struct ServiceConfig {
    std::string model_dir; // mlp.json, lstm_h{H}.json
    std::string data_dir;  // dataset written by `evacast synth`; empty = default fixture
    std::size_t workers = 2;
    std::size_t mc_passes = models::kDefaultMcPasses;
    double landfall_margin_deg = kLandfallMarginDeg;

    // EVACAST_MODEL_DIR and EVACAST_DATA_DIR override the defaults.
    static ServiceConfig from_env();
};

// Everything the handlers read. Immutable once published.
struct ServiceState {
    domain::EvacuationData data;
    features::RegularStatsTable reference_stats;
    models::MlpArtifact mlp;
    std::map<int, models::SequenceArtifact> speed_models; // by horizon
};

// Loads data (or the default fixture) and the model directory.
std::shared_ptr<const ServiceState> load_state(const ServiceConfig& cfg);

struct ScenarioSpec {
    std::string label;
    domain::HurricaneEvent hurricane;
};

// Field-level validation: returns the parsed spec or fills `errors` (field -> message).
std::optional<ScenarioSpec> parse_scenario(const nlohmann::json& body, const domain::BoundingBox& bbox,
                                           double margin_deg, std::map<std::string, std::string>& errors);

// Fixed-size pool; jobs run in submission order.
class WorkerPool {
public:
    explicit WorkerPool(std::size_t n);
    ~WorkerPool();
    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    void submit(std::function<void()> job);

private:
    void run();

    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<std::function<void()>> jobs_;
    bool stopping_ = false;
    std::vector<std::thread> threads_;
};

class Service {
public:
    explicit Service(ServiceConfig cfg);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Publishes a loaded state; until then every endpoint but /healthz answers 503.
    void set_state(std::shared_ptr<const ServiceState> state);
    void load() { set_state(load_state(cfg_)); }
    bool ready() const;

    // Binds (port 0 = any free port) and serves on a background thread. Returns the port.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    // Serves on the calling thread until stop(). False when the address cannot be bound.
    bool listen(const std::string& host, int port);
    void wait_until_listening() const;
    void stop();

private:
    struct Scenario {
        std::string id;
        ScenarioSpec spec;
        std::string status = "pending"; // pending | done | failed
        std::optional<pipeline::CongestionGrid> grid;
        std::string error;
    };

    void routes();
    std::shared_ptr<const ServiceState> state() const;
    void compute(const std::string& id, std::shared_ptr<const ServiceState> st);

    ServiceConfig cfg_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;

    mutable std::mutex state_mu_;
    std::shared_ptr<const ServiceState> state_;

    std::mutex scenarios_mu_;
    std::map<std::string, Scenario> scenarios_;
    std::map<std::string, std::string> label_index_;
    std::uint64_t next_id_ = 1;

    WorkerPool pool_;
};

} // namespace evacast::interfaces
