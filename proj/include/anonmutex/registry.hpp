#pragma once

#include <memory>
#include <string>
#include <vector>

#include "anonmutex/error.hpp"
#include "anonmutex/fig1.hpp"
#include "anonmutex/toys.hpp"

namespace anonmutex {

inline const std::vector<std::string>& program_names() {
  static const std::vector<std::string> names = {"fig1",      "fig1-no-gate", "fig1-one-reserved", "toy-frozen", "toy-spin",
                                                 "toy-leaky", "toy-claim",    "toy-claim-mid",     "toy-flip"};
  return names;
}

/// Builds a registered program by name.
inline ProgramPtr make_program(const std::string& name, int m, bool allow_invalid_m = false) {
  auto fig1 = [&](Fig1Variant v) { return build_program(Fig1Config{m, v, allow_invalid_m}); };
  if (name == "fig1") return fig1(Fig1Variant::Standard);
  if (name == "fig1-no-gate") return fig1(Fig1Variant::NoPriorityGate);
  if (name == "fig1-one-reserved") return fig1(Fig1Variant::OneReservedRegister);
  if (m < 1) throw Error(ErrorKind::InvalidConfiguration, "register count must be at least 1");
  if (name == "toy-frozen") return std::make_shared<const FrozenProgram>(m);
  if (name == "toy-spin") return std::make_shared<const SpinReader>(m);
  if (name == "toy-leaky") return std::make_shared<const LeakyWriter>(m);
  if (name == "toy-claim") return std::make_shared<const ClaimProgram>(m, ClaimProgram::Order::Ascending, false);
  if (name == "toy-claim-mid") return std::make_shared<const ClaimProgram>(m, ClaimProgram::Order::MiddleFirst, false);
  if (name == "toy-flip") return std::make_shared<const ClaimProgram>(m, ClaimProgram::Order::Ascending, true);
  throw Error(ErrorKind::InvalidConfiguration, "unknown program '" + name + "'");
}

}  // namespace anonmutex
