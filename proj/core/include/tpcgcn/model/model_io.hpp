#pragma once

#include <filesystem>
#include <string_view>
#include <variant>

#include "tpcgcn/model/batch.hpp"
#include "tpcgcn/model/dtpcgcn.hpp"
#include "tpcgcn/model/tpcgcn.hpp"

namespace tpcgcn::model {

// A single branch is a model of its own in the branch-only ablations.
using AnyModel = std::variant<TpcGcnModel, DtpcGcnModel, BranchModel>;

std::string_view model_kind(const AnyModel& m);  // "tpcgcn", "dtpcgcn", "branch"
ParameterList parameters_of(AnyModel& m);

void save_model(const std::filesystem::path& path, AnyModel& m);
// The architecture and dims are inferred from the parameter names and shapes.
// Throws DataError on an unknown or inconsistent parameter set.
AnyModel load_model(const std::filesystem::path& path);
AnyModel model_from_parameters(const std::vector<tensor::Parameter>& params);

// Controversy probabilities per post, dropout off. P x 2.
Matrix predict_probs(const AnyModel& m, const GraphBatch& batch);

}  // namespace tpcgcn::model
