#pragma once

#include <nlohmann/json.hpp>

#include "vlab/besov.hpp"
#include "vlab/drift.hpp"
#include "vlab/kernels.hpp"
#include "vlab/paths.hpp"
#include "vlab/smoothing.hpp"
#include "vlab/stats.hpp"

namespace vlab {

using Json = nlohmann::json;

void to_json(Json& j, const KernelSpec& k);
void to_json(Json& j, const TimeGrid& g);
void to_json(Json& j, const DriftSpec& d);
void to_json(Json& j, const PathDependentDrift& d);
void to_json(Json& j, const VProcessSpec& v);
void to_json(Json& j, const TestFunctionSpec& f);
void to_json(Json& j, const MeanSE& m);
void to_json(Json& j, const LinearFit& f);
void to_json(Json& j, const ConditionFit& f);
void to_json(Json& j, const ScalingFit& f);
void to_json(Json& j, const SweepRow& r);
void to_json(Json& j, const EpsRule& r);
void to_json(Json& j, const SmoothingReport& r);
void to_json(Json& j, const TheoremExponents& e);
void to_json(Json& j, const DensityEstimate& d);
void to_json(Json& j, const BesovReport& r);
void to_json(Json& j, const Verdict& v);

/// Sidecar description of a noise ensemble (kernel, grid, sampling parameters).
Json ensemble_metadata(const PathEnsemble& e);

}  // namespace vlab
