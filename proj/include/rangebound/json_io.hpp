#pragma once

#include <string>

#include "rangebound/bounds.hpp"
#include "rangebound/extremal.hpp"
#include "rangebound/moments.hpp"
#include "rangebound/verify.hpp"

// JSON forms of the library types. Numbers are written in their shortest
// round-trip form, so parse(dump(x)) == x exactly. Parsers throw ParseError
// on malformed text and DomainError when the content violates an invariant.
namespace rangebound::json {

MomentSpec parse_spec(const std::string& text);
std::string dump(const MomentSpec& spec);

std::string dump(const BoundReport& report);

JointDiscreteDistribution parse_joint(const std::string& text);
std::string dump(const JointDiscreteDistribution& joint);

ProbabilityMatrix parse_matrix(const std::string& text);
std::string dump(const ProbabilityMatrix& m);

std::string dump(const MomentCheckReport& report);

}  // namespace rangebound::json
