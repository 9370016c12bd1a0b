#include "qcap/report.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace qcap;

TEST_CASE("number formatting") {
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()).empty());
    double v = 1.0 / 3.0;
    CHECK(std::stod(format_number(v)) == v);
}

TEST_CASE("capacitance csv") {
    CapacitanceMatrix c{DenseMatrix(2, 2)};
    c.values(0, 0) = 2.0;
    c.values(0, 1) = -1.0;
    c.values(1, 0) = -1.0;
    c.values(1, 1) = 2.0;
    std::ostringstream os;
    write_capacitance_csv(os, c);
    CHECK(os.str().find("-1") != std::string::npos);
}

TEST_CASE("trace csv") {
    ConvergenceTrace t;
    t.records.push_back({0, 4, 1.0, std::numeric_limits<double>::quiet_NaN(), 160, 0.1});
    t.records.push_back({1, 8, 1.01, 0.01, 576, 0.2});
    t.status = RunStatus::Converged;
    std::ostringstream os;
    write_trace_csv(os, t);
    std::istringstream in(os.str());
    std::string header, first, second;
    std::getline(in, header);
    std::getline(in, first);
    std::getline(in, second);
    CHECK(header == "iter,N,control,delta_rel,mem_bytes,seconds,status");
    CHECK(first == "0,4,1,,160,0.1,continue");
    CHECK(second == "1,8,1.01,0.01,576,0.2,Converged");
}

TEST_CASE("mesh csv") {
    Mesh m;
    m.n_cond = 1;
    m.elements.push_back(make_element({0, 1}, {1, 1}, ConductorFace{0, 2.0}, 0));
    m.elements.push_back(make_element({0, 3}, {1, 3}, DielectricInterface{1.0, 2.0}, 1));
    std::ostringstream os;
    write_mesh_csv(os, m);
    std::istringstream in(os.str());
    std::string header, cond, iface;
    std::getline(in, header);
    std::getline(in, cond);
    std::getline(in, iface);
    CHECK(header == "index,ax,ay,bx,by,kind,cond_id,eps_r_pos,eps_r_neg,length");
    CHECK(cond == "0,0,1,1,1,conductor,0,2,,1");
    CHECK(iface == "1,0,3,1,3,interface,,1,2,1");
}

TEST_CASE("manifest comments") {
    RunManifest m;
    m.input_path = "x.json";
    m.parameters = {{"w", 0.05}};
    m.timestamp = "2026-01-01T00:00:00Z";
    std::ostringstream os;
    write_manifest_comments(os, m);
    std::istringstream in(os.str());
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        CHECK(line.rfind("# ", 0) == 0);
        ++lines;
    }
    CHECK(lines >= 3);
    auto j = m.to_json();
    CHECK(j["tool_version"] == tool_version);
    CHECK(j["parameters"]["w"] == 0.05);
}
