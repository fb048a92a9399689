#include <doctest.h>

#include <sstream>

#include "reflexgrid/trace_io.hpp"

using namespace reflexgrid;
using namespace reflexgrid::cli;

namespace {

engine::Trace sample() {
    engine::HomogeneousSpec spec;
    spec.count = 6;
    spec.period = 6;
    spec.on_steps = 3;
    spec.rule = regulatory::Rule::reactive();
    spec.disturbance = {5, 12, 0.3};
    spec.horizon = 40;
    return engine::run(engine::build_homogeneous(spec));
}

} // namespace

TEST_CASE("format_double round-trips") {
    for (double v : {0.0, 1.0, 0.1, 9.090909090909092, 1e-300, 123456789.125, -2.5}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(10.0) == "10");
}

TEST_CASE("CSV schema") {
    const engine::Trace tr = sample();
    std::ostringstream out;
    write_trace_csv(out, tr, false);
    std::istringstream lines(out.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header == "t,v_source,v_load,i_total,n_flex_on");
    std::string first;
    std::getline(lines, first);
    CHECK(first.rfind("0,10,", 0) == 0);

    std::ostringstream with;
    write_trace_csv(with, tr, true);
    CHECK(with.str().substr(0, with.str().find('\n')) ==
          "t,v_source,v_load,i_total,n_flex_on,shift_0,shift_1,shift_2,shift_3,shift_4,shift_5");
}

TEST_CASE("CSV round trip is exact") {
    const engine::Trace tr = sample();
    std::ostringstream out;
    write_trace_csv(out, tr, true);
    std::istringstream in(out.str());
    const engine::Trace back = read_trace_csv(in);
    REQUIRE(back.size() == tr.size());
    CHECK(back.agent_count == tr.agent_count);
    CHECK(back.shifts == tr.shifts);
    for (std::size_t t = 0; t < tr.size(); ++t) {
        CHECK(back.steps[t].v_load == tr.steps[t].v_load);
        CHECK(back.steps[t].v_source == tr.steps[t].v_source);
        CHECK(back.steps[t].i_total == tr.steps[t].i_total);
        CHECK(back.steps[t].n_flex_on == tr.steps[t].n_flex_on);
    }
}

TEST_CASE("CSV reader rejects malformed input") {
    auto bad = [](const std::string& text) {
        std::istringstream in(text);
        CHECK_THROWS_AS(read_trace_csv(in), CsvError);
    };
    bad("");
    bad("t,v_source,v_load,i_total,n_flex_on\n");
    bad("t,v,v_load,i_total,n_flex_on\n0,1,1,1,1\n");
    bad("t,v_source,v_load,i_total,n_flex_on\n0,1,1,1\n");
    bad("t,v_source,v_load,i_total,n_flex_on\n1,1,1,1,1\n");
    bad("t,v_source,v_load,i_total,n_flex_on\n0,1,x,1,1\n");
    bad("t,v_source,v_load,i_total,n_flex_on,shift_1\n0,1,1,1,1,0\n");
    std::istringstream crlf("t,v_source,v_load,i_total,n_flex_on\r\n0,1,0.5,2,3\r\n");
    CHECK(read_trace_csv(crlf).steps[0].n_flex_on == 3);
}

TEST_CASE("writing shifts requires recorded shifts") {
    engine::Trace tr = sample();
    tr.shifts.clear();
    std::ostringstream out;
    CHECK_THROWS(write_trace_csv(out, tr, true));
}

TEST_CASE("summary text") {
    engine::Metrics m;
    m.outside_band_fraction = 0.25;
    m.band_crossings = 4;
    m.max_overshoot = 0.125;
    m.settled = true;
    CHECK(format_summary(m, {9.0, 9.5}, {10, 20}) ==
          "window = [10, 20)\n"
          "band = [9, 9.5]\n"
          "outside_band_fraction = 0.25\n"
          "band_crossings = 4\n"
          "max_overshoot = 0.125\n"
          "max_undershoot = 0\n"
          "settled = true\n");
}

TEST_CASE("svg output") {
    const engine::Trace tr = sample();
    std::ostringstream out;
    write_svg(out, tr, {9.0, 9.2}, {5, 12, 0.3});
    const std::string svg = out.str();
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("class=\"v_load\"") != std::string::npos);
    CHECK(svg.find("class=\"disturbance\"") != std::string::npos);
    CHECK(svg.find("class=\"v_low\"") != std::string::npos);
    CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
}
