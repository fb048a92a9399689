#include "reflexgrid/trace_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

namespace reflexgrid::cli {

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

void write_trace_csv(std::ostream& out, const engine::Trace& trace, bool with_shifts) {
    if (with_shifts && !trace.has_shifts()) {
        throw std::invalid_argument("trace has no recorded shifts");
    }
    std::string line = "t,v_source,v_load,i_total,n_flex_on";
    if (with_shifts) {
        for (std::size_t i = 0; i < trace.agent_count; ++i) line += ",shift_" + std::to_string(i);
    }
    out << line << '\n';
    for (std::size_t t = 0; t < trace.size(); ++t) {
        const engine::StepRecord& s = trace.steps[t];
        line.clear();
        line += std::to_string(t);
        line += ',';
        line += format_double(s.v_source);
        line += ',';
        line += format_double(s.v_load);
        line += ',';
        line += format_double(s.i_total);
        line += ',';
        line += std::to_string(s.n_flex_on);
        if (with_shifts) {
            for (std::int64_t shift : trace.shifts_at(t)) {
                line += ',';
                line += std::to_string(shift);
            }
        }
        out << line << '\n';
    }
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

template <typename T>
T field(std::string_view text, std::size_t line_no, const char* name) {
    T out{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw CsvError("line " + std::to_string(line_no) + ": bad " + name + " value '" + std::string(text) + "'");
    }
    return out;
}

} // namespace

engine::Trace read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw CsvError("empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split(line);
    constexpr std::array<std::string_view, 5> base{"t", "v_source", "v_load", "i_total", "n_flex_on"};
    if (header.size() < base.size() || !std::equal(base.begin(), base.end(), header.begin())) {
        throw CsvError("line 1: header must start with t,v_source,v_load,i_total,n_flex_on");
    }
    const std::size_t n_shifts = header.size() - base.size();
    for (std::size_t i = 0; i < n_shifts; ++i) {
        if (header[base.size() + i] != "shift_" + std::to_string(i)) {
            throw CsvError("line 1: expected column shift_" + std::to_string(i));
        }
    }

    engine::Trace trace;
    trace.agent_count = n_shifts;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != header.size()) {
            throw CsvError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                           " fields, got " + std::to_string(f.size()));
        }
        const auto t = field<std::size_t>(f[0], line_no, "t");
        if (t != trace.size()) {
            throw CsvError("line " + std::to_string(line_no) + ": expected t = " + std::to_string(trace.size()));
        }
        trace.steps.push_back({field<double>(f[1], line_no, "v_source"), field<double>(f[2], line_no, "v_load"),
                               field<double>(f[3], line_no, "i_total"),
                               field<std::size_t>(f[4], line_no, "n_flex_on")});
        for (std::size_t i = 0; i < n_shifts; ++i) {
            trace.shifts.push_back(field<std::int64_t>(f[base.size() + i], line_no, "shift"));
        }
    }
    if (trace.steps.empty()) throw CsvError("CSV has a header but no rows");
    return trace;
}

std::string format_summary(const engine::Metrics& m, const engine::Band& band, engine::Window window) {
    std::ostringstream s;
    s << "window = [" << window.begin << ", " << window.end << ")\n"
      << "band = [" << format_double(band.v_low) << ", " << format_double(band.v_high) << "]\n"
      << "outside_band_fraction = " << format_double(m.outside_band_fraction) << '\n'
      << "band_crossings = " << m.band_crossings << '\n'
      << "max_overshoot = " << format_double(m.max_overshoot) << '\n'
      << "max_undershoot = " << format_double(m.max_undershoot) << '\n'
      << "settled = " << (m.settled ? "true" : "false") << '\n';
    return s.str();
}

void write_svg(std::ostream& out, const engine::Trace& trace, const engine::Band& band,
               const engine::Disturbance& disturbance) {
    constexpr double width = 1000.0;
    constexpr double height = 400.0;
    constexpr double margin = 40.0;
    const std::size_t n = trace.size();

    double lo = band.v_low;
    double hi = band.v_high;
    for (const auto& s : trace.steps) {
        lo = std::min(lo, s.v_load);
        hi = std::max(hi, s.v_load);
    }
    const double pad = (hi - lo) * 0.05 + 1e-12;
    lo -= pad;
    hi += pad;

    const double span_t = n > 1 ? static_cast<double>(n - 1) : 1.0;
    auto x_of = [&](double t) { return margin + (width - 2 * margin) * t / span_t; };
    auto y_of = [&](double v) { return height - margin - (height - 2 * margin) * (v - lo) / (hi - lo); };
    auto num = [](double v) {
        std::ostringstream s;
        s.setf(std::ios::fixed);
        s.precision(2);
        s << v;
        return s.str();
    };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"400\" viewBox=\"0 0 1000 400\">\n"
        << "  <rect x=\"0\" y=\"0\" width=\"1000\" height=\"400\" fill=\"white\"/>\n";
    if (disturbance.t_end > disturbance.t_start) {
        const double x0 = x_of(static_cast<double>(disturbance.t_start));
        const double x1 = x_of(static_cast<double>(disturbance.t_end));
        out << "  <rect class=\"disturbance\" x=\"" << num(x0) << "\" y=\"" << num(margin) << "\" width=\""
            << num(x1 - x0) << "\" height=\"" << num(height - 2 * margin) << "\" fill=\"#f4d9d9\"/>\n";
    }
    out << "  <line x1=\"" << num(margin) << "\" y1=\"" << num(height - margin) << "\" x2=\"" << num(width - margin)
        << "\" y2=\"" << num(height - margin) << "\" stroke=\"black\"/>\n"
        << "  <line x1=\"" << num(margin) << "\" y1=\"" << num(margin) << "\" x2=\"" << num(margin) << "\" y2=\""
        << num(height - margin) << "\" stroke=\"black\"/>\n";

    auto edge = [&](const char* cls, double v) {
        out << "  <polyline class=\"" << cls << "\" fill=\"none\" stroke=\"#888888\" stroke-dasharray=\"4 3\" points=\""
            << num(x_of(0)) << ',' << num(y_of(v)) << ' ' << num(x_of(span_t)) << ',' << num(y_of(v)) << "\"/>\n";
    };
    edge("v_low", band.v_low);
    edge("v_high", band.v_high);

    out << "  <polyline class=\"v_load\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1\" points=\"";
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) out << ' ';
        out << num(x_of(static_cast<double>(t))) << ',' << num(y_of(trace.steps[t].v_load));
    }
    out << "\"/>\n";
    out << "  <text x=\"" << num(margin) << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"12\">v_load [V], "
        << n << " steps, band [" << format_double(band.v_low) << ", " << format_double(band.v_high)
        << "]</text>\n"
        << "</svg>\n";
}

} // namespace reflexgrid::cli
