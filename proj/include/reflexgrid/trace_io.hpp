#pragma once

// Trace serialization: the CSV trace schema, the metrics summary text and
// the SVG chart.

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "reflexgrid/engine.hpp"

namespace reflexgrid::cli {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Header `t,v_source,v_load,i_total,n_flex_on`, plus `shift_0..shift_{N-1}`
/// when with_shifts is set (the trace must then carry shifts).
void write_trace_csv(std::ostream& out, const engine::Trace& trace, bool with_shifts);

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads a trace written by write_trace_csv. Throws CsvError on a malformed
/// header, row, or non-consecutive step index.
engine::Trace read_trace_csv(std::istream& in);

/// Text block printed by `run` and `metrics`; identical inputs render
/// identically.
std::string format_summary(const engine::Metrics& metrics, const engine::Band& band, engine::Window window);

/// Fixed 1000x400 chart: v_load, v_low and v_high as polylines over a shaded
/// disturbance window.
void write_svg(std::ostream& out, const engine::Trace& trace, const engine::Band& band,
               const engine::Disturbance& disturbance);

} // namespace reflexgrid::cli
