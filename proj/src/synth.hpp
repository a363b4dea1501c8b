#pragma once

#include <cstdint>

#include "ingest.hpp"
#include "types.hpp"

namespace exeff::synth {

struct PlantSpec {
    std::size_t k = 2;
    std::size_t n = 8;  // support size, >= k
    std::uint64_t seed = 0;
    double min_det = 0.05;            // reject planted matrices below this
    double basis_concentration = 4.0; // larger = more peaked basis distributions
};

struct PlantedInstance {
    MixtureMatrix matrix;
    std::vector<Distribution> basis;
    SourceDistributions src;  // matrix * basis, row-wise
};

// Mixes the rows: source i = sum_j P(i,j) * basis_j. Variant labels
// default to "A", "B", ...
SourceDistributions compose(const MixtureMatrix& p, const std::vector<Distribution>& basis,
                            std::vector<std::string> variants = {});

// Draws peaked pairwise-distinct basis distributions and a row-stochastic
// matrix with |det| >= min_det, then emits the mixed sources. The planted
// matrix is feasible for the emitted sources by construction.
PlantedInstance plant(const PlantSpec& spec);

// I.i.d. categorical draws per variant; the recorded value is the sampled
// support index. Unit identifiers are sequential across the whole run.
std::vector<ingest::ObservationRecord> sample_observations(const SourceDistributions& src,
                                                           std::size_t n_per_variant,
                                                           std::uint64_t seed);

void write_observations_csv(const std::vector<ingest::ObservationRecord>& records,
                            const std::string& path);

}  // namespace exeff::synth
