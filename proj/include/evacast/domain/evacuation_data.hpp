#pragma once

#include "evacast/domain/hurricane.hpp"
#include "evacast/domain/network.hpp"
#include "evacast/domain/speed.hpp"

#include <vector>

namespace evacast::domain {

struct HurricaneSpeeds {
    HurricaneEvent event;
    SpeedTable speeds;
};

// A road network plus per-hurricane speed tables over the same links.
struct EvacuationData {
    RoadNetwork network;
    std::vector<HurricaneSpeeds> events;
};

} // namespace evacast::domain
