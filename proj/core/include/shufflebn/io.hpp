#pragma once

#include <iosfwd>
#include <string>

#include "shufflebn/dataset.hpp"
#include "shufflebn/deep_model.hpp"
#include "shufflebn/model.hpp"
#include "shufflebn/risks.hpp"
#include "shufflebn/robustness.hpp"
#include "shufflebn/separability.hpp"
#include "shufflebn/trainers.hpp"

namespace shufflebn {

const char* library_version();

// Header x1..xd,y for classification, x1..xd,y1..yp for regression. A single
// `y` column is read as labels when every entry is +-1.
void write_dataset_csv(const Dataset& ds, std::ostream& out);
void write_dataset_csv(const Dataset& ds, const std::string& path);
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::string& path);

// CSV of normalized columns plus a JSON sidecar with kind, B, epsilon and perms.
void write_normalized_dataset(const NormalizedDataset& nds, const std::string& csv_path,
                              const std::string& json_path);
NormalizedDataset read_normalized_dataset(const std::string& csv_path, const std::string& json_path);

// Checkpoints: {"shape": [rows, cols], "values": [...row-major...]} per matrix,
// printed with 17 significant digits.
std::string checkpoint_json(const ModelParams& params);
ModelParams parse_checkpoint(const std::string& json);
std::string checkpoint_json(const DeepLinearParams& params);
DeepLinearParams parse_deep_checkpoint(const std::string& json);

void write_trace_csv(const TrainTrace& trace, std::ostream& out);
void write_trace_csv(const TrainTrace& trace, const std::string& path);

// One row `epoch,kind,loss,value`.
void write_risk_row(std::ostream& out, Index epoch, const RiskReport& report);

std::string decomposition_json(const SeparabilityDecomposition& dec);
std::string robustness_json(const RobustnessReport& rep);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace shufflebn
