#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "goad/dataset.hpp"
#include "goad/goad.hpp"

namespace goad {

// What the model file stores next to the model itself so raw inputs can be
// encoded and normalized the same way at scoring time.
struct PreprocessInfo {
    std::vector<std::string> feature_names;
    std::vector<bool> continuous;
    NormalizationStats stats;  // stats.mode records the rescaling used
    std::uint64_t schema_hash = 0;
};

struct ModelFile {
    GoadModel model;
    std::optional<PreprocessInfo> preprocess;
};

// Binary container. The task bank is stored as its spec and regenerated
// bit-exactly on load; loading then scoring reproduces in-memory scores
// bit-for-bit. Layout documented in docs/model_format.md.
void save_model(const std::string& path, const ModelFile& file);
ModelFile load_model(const std::string& path);

void write_model(std::ostream& out, const ModelFile& file);
ModelFile read_model(std::istream& in);

}  // namespace goad
