#pragma once

#include <string>

#include "accltl/accltl.hpp"

namespace testutil {

inline std::string fixture_path(const std::string& name) {
    return std::string(ACCLTL_FIXTURE_DIR) + "/" + name;
}

inline std::string fixture(const std::string& name) {
    return accltl::read_file(fixture_path(name));
}

inline accltl::Schema s0() {
    return accltl::parse_schema(fixture("s0.acs"), "s0.acs");
}

// t_J from the running example.
inline accltl::Tuple jones_tuple() {
    using accltl::Value;
    return {Value::str("Jones"), Value::str("OX13QD"), Value::str("Parks Rd"),
            Value::str("23")};
}

inline accltl::Access acm1(const std::string& name) {
    accltl::Access a;
    a.method = "AcM1";
    a.binding[1] = accltl::Value::str(name);
    return a;
}

inline accltl::Access acm2(const std::string& street, const std::string& postcode) {
    accltl::Access a;
    a.method = "AcM2";
    a.binding[1] = accltl::Value::str(street);
    a.binding[2] = accltl::Value::str(postcode);
    return a;
}

// A compact synthetic schema for exhaustive searches: one unary and one
// binary relation over strings.
inline accltl::Schema tiny_schema() {
    return accltl::parse_schema(R"(
relation R(a:string)
relation S(a:string, b:string)
access getR on R inputs (1)
access allR on R inputs ()
access getS on S inputs (1)
)",
                                "tiny.acs");
}

} // namespace testutil
