#pragma once

#include <string>
#include <vector>

#include "ecoc/ensemble.hpp"
#include "ecoc/svm.hpp"

namespace ecoc {

/** Round-trip-exact JSON for one trained binary model. */
void write_model(const BinaryModel& model, const std::string& path);
BinaryModel read_model(const std::string& path);

/** Directory layout: `matrix` in the code-matrix text format, one
    `model_<j>.json` per column, and `manifest.json` carrying the decoder,
    scaling bounds, external class labels, and seed. */
void save_ensemble(const EcocEnsemble& ensemble, const std::string& dir);
EcocEnsemble load_ensemble(const std::string& dir);

/** Machine-readable results. Timing fields are off by default so reruns
    with the same seeds produce identical bytes. */
std::string report_to_json(const std::vector<PerfReport>& reports,
                           bool include_timings = false);

/** Aligned text table, one row per (dataset, strategy). */
std::string report_table(const std::vector<PerfReport>& reports);

}  // namespace ecoc
