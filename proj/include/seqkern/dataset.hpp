#ifndef SEQKERN_DATASET_HPP
#define SEQKERN_DATASET_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seqkern/seq_core.hpp"

namespace seqkern {

struct Sample {
    std::string id;
    std::optional<std::string> label;
    Sequence sequence;
};

/// Labelled sequences sharing one dimension; ids are unique.
struct Dataset {
    std::vector<Sample> samples;
    std::size_t dim = 0;

    std::size_t size() const { return samples.size(); }
    std::vector<Sequence> sequences() const;
    std::vector<std::string> ids() const;

    /// Appends a sample, enforcing the shared dimension and unique ids.
    void add(Sample sample);
};

enum class DatasetFormat { csv, jsonl };

DatasetFormat parse_dataset_format(std::string_view name);

/// JSONL: one object per line, {"id": str, "label": str|null, "series": [[x1..xd], ...]}.
/// Blank lines are skipped.
Dataset read_dataset_jsonl(std::istream& in);

/// CSV: header `id,label,t,x1,...,xd`, then one row per time step. Rows are
/// grouped by id and ordered by strictly increasing t; an empty label is null.
Dataset read_dataset_csv(std::istream& in);

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format);

void write_dataset_jsonl(std::ostream& out, const Dataset& data);

}  // namespace seqkern

#endif  // SEQKERN_DATASET_HPP
