#ifndef AQUACAST_SERIALIZE_HPP
#define AQUACAST_SERIALIZE_HPP

#include "aquacast/baseline.hpp"
#include "aquacast/evaluation.hpp"
#include "aquacast/forecaster.hpp"
#include "aquacast/tuner.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace aquacast {

inline constexpr const char* kModelFormatVersion = "1";

/// Model files are JSON; parameters round-trip bit-exactly. The
/// `model_type` key distinguishes forecaster and lag-baseline files.
void save_forecaster(const FittedForecaster& model, std::ostream& out);
FittedForecaster load_forecaster(std::istream& in);

/// The baseline file carries the tail window of training values so a
/// recursive forecast can start where training ended.
struct SavedLagModel {
    FittedLagModel model;
    LagModelConfig config;
    Date last_train_date;
    std::vector<double> tail_window; // last T_x training values, oldest first
};

void save_lag_model(const SavedLagModel& model, std::ostream& out);
SavedLagModel load_lag_model(std::istream& in);

/// "forecaster" or "ols_lag"; peeks at the model_type key.
std::string model_file_type(std::istream& in);

void write_forecast_csv(const Forecast& forecast, std::ostream& out);
void write_components_csv(const std::vector<ComponentCurve>& curves,
                          std::ostream& out);
void write_cv_report_csv(const CVReport& report, std::ostream& out);
void write_history_csv(const SearchSpace& space,
                       const std::vector<TrialRecord>& history, std::ostream& out);
void write_pdp_csv(const std::vector<PdpGrid>& grids, std::ostream& out);
void write_gap_report_csv(const std::vector<GapRange>& gaps, std::ostream& out);

ForecasterConfig forecaster_config_from_json(std::istream& in);
void forecaster_config_to_json(const ForecasterConfig& config, std::ostream& out);

} // namespace aquacast

#endif
