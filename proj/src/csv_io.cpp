#include "polarflow/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "polarflow/errors.hpp"
#include "text_util.hpp"

namespace polarflow {

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

void write_trajectory_csv(std::ostream& out, const EnsembleTrajectory& traj) {
  out << "step,time,party,particle_index,position\n";
  for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
    const std::string prefix =
        std::to_string(traj.steps[s]) + ',' + format_double(traj.times[s]) + ',';
    for (std::size_t i = 0; i < traj.snapshots[s].size(); ++i) {
      const auto positions = traj.snapshots[s][i].positions();
      for (std::size_t r = 0; r < positions.size(); ++r)
        out << prefix << (i + 1) << ',' << r << ',' << format_double(positions[r]) << '\n';
    }
  }
}

void write_diagnostics_csv(std::ostream& out, const EnsembleTrajectory& traj) {
  if (traj.diagnostics.size() != traj.snapshots.size())
    throw InputError("trajectory was simulated without diagnostics");
  const std::size_t n = traj.snapshots.empty() ? 0 : traj.snapshots.front().size();
  out << "step,time,party,mean,std,vote_share,abstention";
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out << ",w2_" << (i + 1) << '_' << (j + 1);
  out << '\n';
  for (std::size_t s = 0; s < traj.diagnostics.size(); ++s) {
    const auto& d = traj.diagnostics[s];
    std::string pairs;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) pairs += ',' + format_double(d.w2_between(i, j));
    for (std::size_t i = 0; i < n; ++i) {
      out << traj.steps[s] << ',' << format_double(traj.times[s]) << ',' << (i + 1) << ','
          << format_double(d.summaries[i].mean) << ',' << format_double(d.summaries[i].std) << ','
          << format_double(d.votes.shares[i]) << ',' << format_double(d.votes.abstention) << pairs
          << '\n';
    }
  }
}

void write_dataset_csv(std::ostream& out, const EnsembleTrajectory& traj) {
  out << "period,party,score\n";
  for (std::size_t s = 0; s < traj.snapshots.size(); ++s)
    for (std::size_t i = 0; i < traj.snapshots[s].size(); ++i)
      for (double y : traj.snapshots[s][i].positions())
        out << s << ',' << (i + 1) << ',' << format_double(y) << '\n';
}

void write_comparison_csv(std::ostream& out, const ObservedTrajectory& observed,
                          const std::vector<std::vector<ParticleEnsemble>>& predicted) {
  out << "period,party,source,mean,std,w2\n";
  for (std::size_t t = 0; t < observed.periods.size() && t < predicted.size(); ++t) {
    for (std::size_t i = 0; i < observed.parties.size(); ++i) {
      const auto obs = summarize(observed.ensembles[t][i]);
      const auto mod = summarize(predicted[t][i]);
      const std::string dist = format_double(w2(observed.ensembles[t][i], predicted[t][i]));
      out << observed.periods[t] << ',' << observed.parties[i] << ",observed,"
          << format_double(obs.mean) << ',' << format_double(obs.std) << ',' << dist << '\n';
      out << observed.periods[t] << ',' << observed.parties[i] << ",model,"
          << format_double(mod.mean) << ',' << format_double(mod.std) << ',' << dist << '\n';
    }
  }
}

std::vector<double> read_position_column(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  std::vector<double> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) detail::strip_bom(line);
    const auto field = detail::trim(line);
    if (field.empty()) continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto v = detail::parse_double(field);
    if (!v || !std::isfinite(*v))
      throw ParseError("'" + std::string(field) + "' is not a finite number", line_no);
    out.push_back(*v);
  }
  if (!header) throw ParseError("missing header row", 0);
  if (out.empty()) throw InputError("position file has no values");
  return out;
}

}  // namespace polarflow
