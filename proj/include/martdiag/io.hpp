#pragma once

#include <string>
#include <utility>
#include <vector>

#include "martdiag/diagnostics.hpp"
#include "martdiag/filter.hpp"
#include "martdiag/stochastic_sim.hpp"
#include "martdiag/threshold_martingale.hpp"
#include "martdiag/winprob.hpp"

namespace martdiag {

// Key/value pairs echoed into output headers as "# key=value" provenance.
using Provenance = std::vector<std::pair<std::string, std::string>>;

// Doubles are serialized with 17 significant digits so files round-trip
// exactly.
std::string fmt_double(double x);

void write_series_csv(const std::string& path, const std::vector<SeriesPath>& series,
                      const Provenance& prov);

// Shared schema: series_id,t,p,d,S,V with d = 0 at t = 0.
void write_prob_csv(const std::string& path, const std::vector<ProbPath>& paths,
                    const Provenance& prov);
std::vector<ProbPath> read_prob_csv(const std::string& path);

void write_scatter_csv(const std::string& path, const ScatterData& scatter,
                       const Provenance& prov);

// series_id,stat,value rows for boxplot export.
void write_boxplot_csv(const std::string& path, const PrequentialReport& report,
                       const Provenance& prov);

// Canonical game schema: game_id,season,i,t_min,score_diff,home_win.
void write_games_csv(const std::string& path, const std::vector<GamePath>& games,
                     const Provenance& prov);
std::vector<GamePath> read_games_csv(const std::string& path);

void write_calibration_json(const std::string& path, const CalibrationReport& rep,
                            const Provenance& prov);
void write_volatility_json(const std::string& path, const VolatilityTestReport& rep,
                           const Provenance& prov);
void write_prequential_json(const std::string& path, const PrequentialReport& rep,
                            const Provenance& prov);

void write_filter_json(const std::string& path, const FilterModel& model,
                       const Provenance& prov);
FilterModel read_filter_json(const std::string& path);

void write_model_simple_json(const std::string& path, const ModelSimple& m,
                             const Provenance& prov);
ModelSimple read_model_simple_json(const std::string& path);
void write_model_weighted_json(const std::string& path, const ModelWeighted& m,
                               const Provenance& prov);
ModelWeighted read_model_weighted_json(const std::string& path);

}  // namespace martdiag
