#pragma once

#include "foldlab/cloth.hpp"
#include "foldlab/fold.hpp"

#include <json.hpp>

#include <string>

namespace foldlab {

struct SessionConfig {
    int n_folds = 2;
    bool preview_enabled = true;
    std::string goal_id = "G1";
    ClothSpec cloth;
    FoldParams fold;
    GridSpec grid;

    /// Throws InvalidConfig (wrapping any nested spec failure).
    void validate() const;
};

// Flat key/value documents. Missing keys keep their defaults; unknown keys and
// wrongly typed values are rejected with InvalidConfig.
nlohmann::ordered_json to_json(const ClothSpec& spec);
nlohmann::ordered_json to_json(const FoldParams& params);
nlohmann::ordered_json to_json(const GridSpec& grid);
nlohmann::ordered_json to_json(const SessionConfig& config);

ClothSpec cloth_spec_from_json(const nlohmann::ordered_json& j);
FoldParams fold_params_from_json(const nlohmann::ordered_json& j);
GridSpec grid_spec_from_json(const nlohmann::ordered_json& j);
SessionConfig session_config_from_json(const nlohmann::ordered_json& j);

} // namespace foldlab
