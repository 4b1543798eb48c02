#include <sstream>

#include "doctest.h"
#include "rmsim/csv_io.hpp"
#include "rmsim/errors.hpp"

using namespace rmsim;

TEST_CASE("field formatting") {
    CHECK(csv::fmt(0.1) == "0.1");
    CHECK(csv::fmt(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(csv::fmt(std::optional<double>{}) == "NA");
    CHECK(csv::split(" a, b ,c") == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("pattern files round trip") {
    const DemandScenario sc = default_regular_scenario();
    CollectionConfig cfg{25, 0.4, {OutlierSpec::volume(0.25), OutlierSpec::wtp({0.2, 0.8}), OutlierSpec::arrival(2)}};
    const auto c = build_collection(cfg, sc, fcfs(7, 200), RngSeed{3});
    std::ostringstream os;
    csv::write_patterns(os, c);
    std::istringstream in(os.str());
    const auto back = csv::read_patterns(in, 200);
    CHECK(back.size() == c.size());
    CHECK(back.totals(30) == c.totals(30));
    CHECK(back.truth() == c.truth());
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(back.patterns[i].truth.kind == c.patterns[i].truth.kind);

    std::istringstream bad("pattern_id,interval_index\n1,2\n");
    CHECK_THROWS_AS(csv::read_patterns(bad, 200), DataError);
}
