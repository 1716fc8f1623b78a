#pragma once

// Reference values produced by tests/oracles/oracle.py.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace huflow::test {

inline const nlohmann::json& oracle()
{
    static const nlohmann::json values = [] {
        std::ifstream in(HUFLOW_ORACLE_FILE);
        if (!in) throw std::runtime_error("cannot open " HUFLOW_ORACLE_FILE);
        return nlohmann::json::parse(in);
    }();
    return values;
}

inline bool close_rel(double a, double b, double tol, double floor = 1.0)
{
    return std::abs(a - b) <= tol * std::max({floor, std::abs(a), std::abs(b)});
}

}  // namespace huflow::test
