#pragma once

#include <string>
#include <vector>

#include "dabsp/world.hpp"

namespace dabsp {

/// Three scenes on a line, each observable from a congruent stripe under
/// its anchor. Aliasing is configured by listing scene-id groups whose
/// appearance shifts get equated; ungrouped scenes keep distinct shifts.
struct AbstractWorldOptions {
    std::vector<double> sceneX{-5.0, 0.0, 5.0};
    double sceneY = 5.0;
    double regionHalfWidth = 1.5;
    double regionYLo = 0.5;
    double regionYHi = 2.0;
    double processNoise = 0.02;
    double measurementNoise = 0.01;
    std::vector<std::vector<std::string>> aliasSets;  // e.g. {{"A1","A3"}}
};

World makeAbstractWorld(const AbstractWorldOptions& opts = {});

/// Parallel corridors stacked along y, with identical-looking shelves
/// placed along x. A per-floor mask removes shelves, which is what makes
/// some viewpoints disambiguating.
struct CorridorWorldOptions {
    int floors = 2;
    double floorSpacing = 10.0;
    std::vector<double> shelfX{2.0, 4.0};
    std::vector<std::vector<bool>> shelfMask{{true, true}, {true, false}};
    double regionHalfWidth = 0.5;
    double regionHalfHeight = 1.0;
    double processNoise = 0.005;
    double measurementNoise = 0.01;
};

World makeCorridorWorld(const CorridorWorldOptions& opts = {});

}  // namespace dabsp
