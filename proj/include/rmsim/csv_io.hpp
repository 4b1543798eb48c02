#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rmsim/booking.hpp"
#include "rmsim/extrapolate.hpp"
#include "rmsim/evaluate.hpp"

namespace rmsim::csv {

/// Splits one CSV line on commas (no quoting; fields are trimmed).
std::vector<std::string> split(const std::string& line);

/// Formats a double with up to 10 significant digits, "inf"/"nan" for non-finite values.
std::string fmt(double v);
std::string fmt(const std::optional<double>& v);

/// Columns pattern_id,interval_index,cumulative_bookings,truth_label,kind.
void write_patterns(std::ostream& os, const Collection& c);
/// Columns pattern_id,interval_index,class_label,cumulative_bookings,cumulative_revenue.
void write_pattern_classes(std::ostream& os, const Collection& c, const FareStructure& fares);
/// Reads the write_patterns() format back. Capacity is not stored and must be supplied.
/// @throws DataError on malformed input.
Collection read_patterns(std::istream& in, int capacity);

/// Columns method,pattern_id,interval_index,score,flagged.
void write_flags(std::ostream& os, const DetectionRun& run);
/// Columns pattern_id,interval_count_used,depth,threshold,flagged,iteration_flagged.
void write_depths(std::ostream& os, const FunctionalResult& r, int tau);
/// Columns pattern_id,interval_index,value,is_extrapolated,method,fitted_orders.
void write_completions(std::ostream& os, const std::vector<CompletedPattern>& completed);
/// Columns detector,interval,tpr,fpr,bcr,lr_plus.
void write_sweep(std::ostream& os, const std::vector<SweepRow>& rows);
/// Columns detector,interval,threshold,fpr,tpr.
void write_roc(std::ostream& os, const std::string& detector, int tau, const RocCurve& roc);
/// Columns heuristic,f_D,magnitude,correction_interval,pct_revenue_change,ci_low,ci_high.
void write_revenue_gain(std::ostream& os, const std::vector<RevenueGainRow>& rows);

}  // namespace rmsim::csv
