#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "polarflow/calibration.hpp"
#include "polarflow/ensemble_flow.hpp"

namespace polarflow {

// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

// step,time,party,particle_index,position (party and particle 1-based / 0-based).
void write_trajectory_csv(std::ostream& out, const EnsembleTrajectory& traj);

// step,time,party,mean,std,vote_share,abstention,w2_1_2,...
void write_diagnostics_csv(std::ostream& out, const EnsembleTrajectory& traj);

// Snapshots in the calibration input schema: period = snapshot index.
void write_dataset_csv(std::ostream& out, const EnsembleTrajectory& traj);

// period,party,source,mean,std,w2 with source in {observed, model}.
void write_comparison_csv(std::ostream& out, const ObservedTrajectory& observed,
                          const std::vector<std::vector<ParticleEnsemble>>& predicted);

// Single-column position file: a header line, then one number per line.
std::vector<double> read_position_column(std::istream& in);

}  // namespace polarflow
