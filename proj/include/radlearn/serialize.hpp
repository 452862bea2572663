#pragma once

#include <filesystem>

#include <json.hpp>

#include "radlearn/cluster.hpp"
#include "radlearn/diagnostics.hpp"
#include "radlearn/forest.hpp"
#include "radlearn/rfe.hpp"
#include "radlearn/stats.hpp"
#include "radlearn/trace.hpp"

namespace radlearn {

using Json = nlohmann::ordered_json;

Json to_json(const ForestModel& m);
ForestModel forest_from_json(const Json& j);

Json to_json(const RfeTrace& t);
RfeTrace rfe_trace_from_json(const Json& j);

Json to_json(const Dendrogram& d);

Json to_json(const TrainTrace& t);
TrainTrace train_trace_from_json(const Json& j);

Json to_json(const DiagnosisReport& r);

Json to_json(const SignificanceReport& r);
SignificanceReport significance_from_json(const Json& j);

Json to_json(const IntersectionSummary& s);

/// Pretty-printed JSON plus trailing newline.
void write_json(const Json& j, const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

}  // namespace radlearn
