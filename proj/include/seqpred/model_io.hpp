#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "seqpred/measures.hpp"

namespace seqpred {

// Human-readable model documents. A measure object looks like
//   {"family": "iid", "theta": [0.25, 0.75]}
//   {"family": "uniform"} | {"family": "kt"}
//   {"family": "markov", "initial": [...], "transition": [[...], ...]}
//   {"family": "dirac", "head": "01", "period": "0"}
//   {"family": "mixture", "components": [{"weight": w, "measure": {...}}, ...]}
//   {"family": "mix_uniform", "base": {...}}
// and a model-class document is
//   {"alphabet": A, "members": [measure, ...], "weights": [...]?}
// Unknown keys are hard errors.

struct ModelClass {
    Alphabet alphabet;
    std::vector<MeasurePtr> members;
    std::vector<double> weights; // empty, or one positive weight per member
};

MeasurePtr measure_from_json(const nlohmann::json& j, Alphabet a);
nlohmann::json measure_to_json(const ProcessMeasure& m);

ModelClass class_from_json(const nlohmann::json& j);
nlohmann::json class_to_json(const ModelClass& c);

ModelClass load_class_file(const std::string& path);
void save_class_file(const ModelClass& c, const std::string& path);

// Throws InputError when `obj` holds a key outside `allowed`.
void reject_unknown_keys(const nlohmann::json& obj, const std::vector<std::string>& allowed,
                         const std::string& context);

} // namespace seqpred
