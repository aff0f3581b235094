#pragma once

#include <filesystem>
#include <string>

#include "axnn/ensemble.hpp"

namespace axnn {

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON model document. Doubles are written in shortest
/// round-trip form, so load(save(e)) reproduces every parameter bit.
std::string model_to_json(const Ensemble& ensemble);
/// Raises VersionError, MalformedDocumentError, ShapeError or
/// InvariantViolationError depending on what is wrong with the document.
Ensemble model_from_json(const std::string& text);

/// JSON of learners [0, stage_boundary) only; used to fingerprint stage 1.
std::string stage1_fingerprint_json(const Ensemble& ensemble);

void save_model(const Ensemble& ensemble, const std::filesystem::path& path);
Ensemble load_model(const std::filesystem::path& path);

}  // namespace axnn
